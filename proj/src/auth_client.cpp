#include "rcph/auth_client.hpp"

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <system_error>

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

namespace rcph {

using wire::MessageType;

AuthClient::AuthClient(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw std::runtime_error("cannot resolve '" + host + "': " + ::gai_strerror(rc));
  }
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0 || ::connect(fd_, res->ai_addr, res->ai_addrlen) < 0) {
    const int err = errno;
    ::freeaddrinfo(res);
    if (fd_ >= 0) ::close(fd_);
    throw std::system_error(err, std::generic_category(), "connect to " + host + ":" + service);
  }
  ::freeaddrinfo(res);
  const int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

AuthClient::~AuthClient() {
  if (fd_ >= 0) ::close(fd_);
}

AuthClient::AuthClient(AuthClient&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}

void AuthClient::send(const wire::Frame& frame) { wire::write_frame(fd_, frame); }

std::optional<wire::Frame> AuthClient::receive() { return wire::read_frame(fd_); }

RegisterOutcome AuthClient::register_user(const Digest& public_id, const BigInt& verifier) {
  send(wire::make_register({public_id, verifier}));
  const auto reply = receive();
  if (!reply) throw wire::ProtocolError("server closed the connection");
  if (reply->type == MessageType::kRegisterOk) return {true, std::nullopt};
  if (reply->type == MessageType::kError) return {false, wire::parse_error(*reply)};
  throw wire::ProtocolError("unexpected reply to REGISTER");
}

LoginOutcome AuthClient::login(const Digest& public_id, const Digest& secret, const GroupParams& group) {
  ProverSession prover(secret, group);
  send(wire::make_login_start({public_id, prover.commitment()}));
  auto reply = receive();
  if (!reply) throw wire::ProtocolError("server closed the connection");
  if (reply->type == MessageType::kError) return {LoginOutcome::Status::kError, wire::parse_error(*reply)};
  send(wire::make_response(prover.respond(wire::parse_challenge(*reply))));
  reply = receive();
  if (!reply) throw wire::ProtocolError("server closed the connection");
  switch (reply->type) {
    case MessageType::kLoginOk:
      return {LoginOutcome::Status::kOk, std::nullopt};
    case MessageType::kLoginFail:
      return {LoginOutcome::Status::kFail, std::nullopt};
    case MessageType::kError:
      return {LoginOutcome::Status::kError, wire::parse_error(*reply)};
    default:
      throw wire::ProtocolError("unexpected reply to RESPONSE");
  }
}

}  // namespace rcph
