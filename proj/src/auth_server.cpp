#include "rcph/auth_server.hpp"

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <system_error>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "rcph/wire.hpp"

namespace rcph {

namespace {

using wire::ErrorCode;
using wire::Frame;
using wire::MessageType;

void send_error(int fd, ErrorCode code, const std::string& message) {
  try {
    wire::write_frame(fd, wire::make_error({code, message}));
  } catch (const std::exception&) {
    // Peer already gone.
  }
}

void set_timeout(int fd, std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

}  // namespace

std::pair<std::string, std::uint16_t> parse_listen_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon + 1 == address.size()) {
    throw std::invalid_argument("address must look like HOST:PORT, got '" + address + "'");
  }
  std::string host = address.substr(0, colon);
  if (host.empty()) host = "0.0.0.0";
  unsigned long port = 0;
  try {
    std::size_t used = 0;
    port = std::stoul(address.substr(colon + 1), &used);
    if (used != address.size() - colon - 1) throw std::invalid_argument("port");
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid port in '" + address + "'");
  }
  if (port > 65535) throw std::invalid_argument("port out of range in '" + address + "'");
  return {host, static_cast<std::uint16_t>(port)};
}

AuthServer::AuthServer(UserStore& store, const GroupParams& group, ServerOptions options)
    : store_(store), group_(group), options_(options) {}

AuthServer::~AuthServer() { stop(); }

void AuthServer::start(const std::string& host, std::uint16_t port) {
  if (listen_fd_ >= 0) throw std::logic_error("server already started");
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  if (int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res); rc != 0) {
    throw std::runtime_error("cannot resolve '" + host + "': " + ::gai_strerror(rc));
  }
  sockaddr_in addr{};
  std::memcpy(&addr, res->ai_addr, sizeof addr);
  ::freeaddrinfo(res);
  addr.sin_port = htons(port);

  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw std::system_error(errno, std::generic_category(), "socket");
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd, options_.backlog) < 0) {
    const int err = errno;
    ::close(fd);
    throw std::system_error(err, std::generic_category(), "bind/listen on " + host + ":" + std::to_string(port));
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  listen_fd_ = fd;
  stopping_ = false;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void AuthServer::stop() {
  if (stopping_.exchange(true)) {
    if (acceptor_.joinable()) acceptor_.join();
    return;
  }
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<Connection> connections;
  {
    std::lock_guard lock(connections_mutex_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
    connections.swap(connections_);
  }
  for (auto& c : connections) {
    if (c.worker.joinable()) c.worker.join();
  }
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
}

void AuthServer::wait() {
  while (!stopping_) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

void AuthServer::reap_finished() {
  std::lock_guard lock(connections_mutex_);
  for (auto it = connections_.begin(); it != connections_.end();) {
    if (it->done->load()) {
      it->worker.join();
      it = connections_.erase(it);
    } else {
      ++it;
    }
  }
}

void AuthServer::accept_loop() {
  while (!stopping_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    set_timeout(fd, options_.session_timeout);
    reap_finished();
    auto done = std::make_shared<std::atomic<bool>>(false);
    std::lock_guard lock(connections_mutex_);
    open_fds_.insert(fd);
    connections_.push_back({std::thread([this, fd, done] {
                              handle_connection(fd);
                              {
                                std::lock_guard inner(connections_mutex_);
                                open_fds_.erase(fd);
                              }
                              ::close(fd);
                              done->store(true);
                            }),
                            done});
  }
}

void AuthServer::handle_connection(int fd) {
  try {
    while (auto frame = wire::read_frame(fd)) {
      switch (frame->type) {
        case MessageType::kRegister: {
          const auto msg = wire::parse_register(*frame);
          if (!group_.is_subgroup_element(msg.verifier)) {
            send_error(fd, ErrorCode::kInvalidElement, "verifier is not a subgroup element");
            return;
          }
          try {
            store_.register_user({msg.public_id, msg.verifier});
            wire::write_frame(fd, wire::make_empty(MessageType::kRegisterOk));
          } catch (const DuplicateUserError&) {
            send_error(fd, ErrorCode::kDuplicateUser, "public id already registered");
          }
          break;
        }
        case MessageType::kLoginStart: {
          const auto msg = wire::parse_login_start(*frame);
          auto record = store_.lookup(msg.public_id);
          if (!record) {
            send_error(fd, ErrorCode::kUnknownUser, "unknown-user");
            break;
          }
          if (!group_.is_subgroup_element(msg.commitment)) {
            send_error(fd, ErrorCode::kInvalidElement, "commitment is not a subgroup element");
            return;
          }
          VerifierSession session(std::move(*record), msg.commitment, group_);
          wire::write_frame(fd, wire::make_challenge(session.challenge()));
          auto reply = wire::read_frame(fd);
          if (!reply) return;
          if (reply->type != MessageType::kResponse) {
            send_error(fd, ErrorCode::kUnexpectedMessage, "expected RESPONSE");
            return;
          }
          const bool accepted = session.finish(wire::parse_response(*reply));
          wire::write_frame(fd, wire::make_empty(accepted ? MessageType::kLoginOk : MessageType::kLoginFail));
          break;
        }
        default:
          send_error(fd, ErrorCode::kUnexpectedMessage, "unexpected message type");
          return;
      }
    }
  } catch (const wire::ProtocolError& e) {
    send_error(fd, ErrorCode::kMalformed, e.what());
  } catch (const std::system_error&) {
    // Timeout or reset: drop the session.
  } catch (const std::exception& e) {
    send_error(fd, ErrorCode::kInternal, e.what());
  }
}

}  // namespace rcph
