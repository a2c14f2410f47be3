#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcph/bignum.hpp"
#include "rcph/projection_hash.hpp"
#include "rcph/zkp.hpp"

namespace rcph::wire {

// Frame: length u32 LE (bytes after the length field, i.e. 1 + payload size),
// type u8, payload. Big integers are a u32 LE byte count followed by the
// big-endian magnitude.
enum class MessageType : std::uint8_t {
  kRegister = 0x01,     // public_id 32B, verifier
  kRegisterOk = 0x02,
  kLoginStart = 0x10,   // public_id 32B, commitment
  kChallenge = 0x11,    // e 16B
  kResponse = 0x12,     // z
  kLoginOk = 0x13,
  kLoginFail = 0x14,
  kError = 0x7F,        // code u8, UTF-8 message (rest of payload)
};

enum class ErrorCode : std::uint8_t {
  kMalformed = 1,
  kUnknownUser = 2,
  kDuplicateUser = 3,
  kUnexpectedMessage = 4,
  kInvalidElement = 5,
  kInternal = 6,
};

inline constexpr std::uint32_t kMaxFrameBytes = 64 * 1024;
inline constexpr std::uint32_t kMaxIntegerBytes = 1024;

/// Raised for frames or payloads that do not follow the wire format.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Frame {
  MessageType type{};
  std::vector<std::uint8_t> payload;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);

/// Incremental decoder over a byte buffer; returns nullopt until a full frame
/// is available. Throws ProtocolError on oversized or empty frames.
std::optional<Frame> try_decode_frame(std::vector<std::uint8_t>& buffer);

struct RegisterMsg {
  Digest public_id;
  BigInt verifier;
};
struct LoginStartMsg {
  Digest public_id;
  BigInt commitment;
};
struct ErrorMsg {
  ErrorCode code{};
  std::string message;
};

Frame make_register(const RegisterMsg& msg);
Frame make_login_start(const LoginStartMsg& msg);
Frame make_challenge(const Challenge& e);
Frame make_response(const BigInt& z);
Frame make_error(const ErrorMsg& msg);
Frame make_empty(MessageType type);

RegisterMsg parse_register(const Frame& frame);
LoginStartMsg parse_login_start(const Frame& frame);
Challenge parse_challenge(const Frame& frame);
BigInt parse_response(const Frame& frame);
ErrorMsg parse_error(const Frame& frame);

/// Blocking socket helpers. read_frame returns nullopt on orderly EOF and
/// throws std::system_error on socket errors (including receive timeouts).
void write_frame(int fd, const Frame& frame);
std::optional<Frame> read_frame(int fd);

}  // namespace rcph::wire
