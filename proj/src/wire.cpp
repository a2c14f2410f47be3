#include "rcph/wire.hpp"

#include <cerrno>
#include <system_error>

#include <sys/socket.h>
#include <sys/types.h>

#include "rcph/byte_io.hpp"

namespace rcph::wire {

namespace {

void put_integer(bytes::Writer& w, const BigInt& x) {
  const auto b = x.to_bytes_be();
  w.u32(static_cast<std::uint32_t>(b.size()));
  w.raw(b);
}

BigInt get_integer(bytes::Reader& r) {
  const std::uint32_t len = r.u32();
  if (len > kMaxIntegerBytes) throw ProtocolError("integer field too large");
  return BigInt::from_bytes_be(r.raw(len));
}

Digest get_digest(bytes::Reader& r) {
  Digest d;
  auto raw = r.raw(d.bytes.size());
  std::copy(raw.begin(), raw.end(), d.bytes.begin());
  return d;
}

void expect_type(const Frame& frame, MessageType type) {
  if (frame.type != type) throw ProtocolError("unexpected message type");
}

template <typename F>
auto parse_payload(const Frame& frame, F&& body) {
  try {
    bytes::Reader r(frame.payload, "frame payload");
    auto out = body(r);
    r.expect_end();
    return out;
  } catch (const DataError& e) {
    throw ProtocolError(e.what());
  }
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  if (frame.payload.size() + 1 > kMaxFrameBytes) throw ProtocolError("frame exceeds maximum size");
  bytes::Writer w;
  w.u32(static_cast<std::uint32_t>(frame.payload.size() + 1));
  w.u8(static_cast<std::uint8_t>(frame.type));
  w.raw(frame.payload);
  return std::move(w).take();
}

std::optional<Frame> try_decode_frame(std::vector<std::uint8_t>& buffer) {
  if (buffer.size() < 4) return std::nullopt;
  const std::uint32_t len = std::uint32_t{buffer[0]} | std::uint32_t{buffer[1]} << 8 |
                            std::uint32_t{buffer[2]} << 16 | std::uint32_t{buffer[3]} << 24;
  if (len == 0) throw ProtocolError("empty frame");
  if (len > kMaxFrameBytes) throw ProtocolError("frame exceeds maximum size");
  if (buffer.size() < 4 + std::size_t{len}) return std::nullopt;
  Frame f;
  f.type = static_cast<MessageType>(buffer[4]);
  f.payload.assign(buffer.begin() + 5, buffer.begin() + 4 + len);
  buffer.erase(buffer.begin(), buffer.begin() + 4 + len);
  return f;
}

Frame make_register(const RegisterMsg& msg) {
  bytes::Writer w;
  w.raw(msg.public_id.bytes);
  put_integer(w, msg.verifier);
  return {MessageType::kRegister, std::move(w).take()};
}

Frame make_login_start(const LoginStartMsg& msg) {
  bytes::Writer w;
  w.raw(msg.public_id.bytes);
  put_integer(w, msg.commitment);
  return {MessageType::kLoginStart, std::move(w).take()};
}

Frame make_challenge(const Challenge& e) {
  return {MessageType::kChallenge, std::vector<std::uint8_t>(e.begin(), e.end())};
}

Frame make_response(const BigInt& z) {
  bytes::Writer w;
  put_integer(w, z);
  return {MessageType::kResponse, std::move(w).take()};
}

Frame make_error(const ErrorMsg& msg) {
  bytes::Writer w;
  w.u8(static_cast<std::uint8_t>(msg.code));
  w.raw(msg.message);
  return {MessageType::kError, std::move(w).take()};
}

Frame make_empty(MessageType type) { return {type, {}}; }

RegisterMsg parse_register(const Frame& frame) {
  expect_type(frame, MessageType::kRegister);
  return parse_payload(frame, [](bytes::Reader& r) {
    Digest id = get_digest(r);
    return RegisterMsg{id, get_integer(r)};
  });
}

LoginStartMsg parse_login_start(const Frame& frame) {
  expect_type(frame, MessageType::kLoginStart);
  return parse_payload(frame, [](bytes::Reader& r) {
    Digest id = get_digest(r);
    return LoginStartMsg{id, get_integer(r)};
  });
}

Challenge parse_challenge(const Frame& frame) {
  expect_type(frame, MessageType::kChallenge);
  return parse_payload(frame, [](bytes::Reader& r) {
    Challenge e{};
    auto raw = r.raw(e.size());
    std::copy(raw.begin(), raw.end(), e.begin());
    return e;
  });
}

BigInt parse_response(const Frame& frame) {
  expect_type(frame, MessageType::kResponse);
  return parse_payload(frame, [](bytes::Reader& r) { return get_integer(r); });
}

ErrorMsg parse_error(const Frame& frame) {
  expect_type(frame, MessageType::kError);
  return parse_payload(frame, [](bytes::Reader& r) {
    ErrorMsg msg;
    msg.code = static_cast<ErrorCode>(r.u8());
    auto rest = r.raw(r.remaining());
    msg.message.assign(rest.begin(), rest.end());
    return msg;
  });
}

void write_frame(int fd, const Frame& frame) {
  const auto data = encode_frame(frame);
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t rv = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (rv < 0) {
      if (errno == EINTR) continue;
      throw std::system_error(errno, std::generic_category(), "send");
    }
    sent += static_cast<std::size_t>(rv);
  }
}

namespace {

// Returns false on EOF before any byte was read.
bool read_exact(int fd, std::uint8_t* out, std::size_t count, bool eof_ok) {
  std::size_t got = 0;
  while (got < count) {
    const ssize_t rv = ::recv(fd, out + got, count - got, 0);
    if (rv == 0) {
      if (got == 0 && eof_ok) return false;
      throw ProtocolError("connection closed mid-frame");
    }
    if (rv < 0) {
      if (errno == EINTR) continue;
      throw std::system_error(errno, std::generic_category(), "recv");
    }
    got += static_cast<std::size_t>(rv);
  }
  return true;
}

}  // namespace

std::optional<Frame> read_frame(int fd) {
  std::uint8_t header[4];
  if (!read_exact(fd, header, 4, true)) return std::nullopt;
  const std::uint32_t len = std::uint32_t{header[0]} | std::uint32_t{header[1]} << 8 |
                            std::uint32_t{header[2]} << 16 | std::uint32_t{header[3]} << 24;
  if (len == 0) throw ProtocolError("empty frame");
  if (len > kMaxFrameBytes) throw ProtocolError("frame exceeds maximum size");
  std::vector<std::uint8_t> body(len);
  read_exact(fd, body.data(), len, false);
  Frame f;
  f.type = static_cast<MessageType>(body[0]);
  f.payload.assign(body.begin() + 1, body.end());
  return f;
}

}  // namespace rcph::wire
