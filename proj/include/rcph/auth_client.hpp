#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "rcph/wire.hpp"
#include "rcph/zkp.hpp"

namespace rcph {

struct LoginOutcome {
  enum class Status { kOk, kFail, kError };
  Status status = Status::kError;
  std::optional<wire::ErrorMsg> error;
};

struct RegisterOutcome {
  bool ok = false;
  std::optional<wire::ErrorMsg> error;
};

/// Blocking client for the authentication protocol.
class AuthClient {
 public:
  AuthClient(const std::string& host, std::uint16_t port,
             std::chrono::milliseconds timeout = std::chrono::milliseconds{5000});
  ~AuthClient();
  AuthClient(AuthClient&& other) noexcept;
  AuthClient& operator=(AuthClient&&) = delete;
  AuthClient(const AuthClient&) = delete;
  AuthClient& operator=(const AuthClient&) = delete;

  RegisterOutcome register_user(const Digest& public_id, const BigInt& verifier);
  /// Runs the three-move proof with a fresh nonce.
  LoginOutcome login(const Digest& public_id, const Digest& secret,
                     const GroupParams& group = GroupParams::standard());

  void send(const wire::Frame& frame);
  /// nullopt when the server closed the connection.
  std::optional<wire::Frame> receive();

 private:
  int fd_ = -1;
};

}  // namespace rcph
