#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rcph/user_store.hpp"
#include "rcph/zkp.hpp"

namespace rcph {

/// Splits "host:port"; throws std::invalid_argument on malformed input.
std::pair<std::string, std::uint16_t> parse_listen_address(const std::string& address);

struct ServerOptions {
  std::chrono::milliseconds session_timeout{5000};
  int backlog = 64;
};

/// TCP front end for registration and zero-knowledge login. One thread per
/// connection; each connection's session state lives on that thread only.
/// The server never receives the secret digest, only V at registration and
/// (t, z) transcripts at login.
class AuthServer {
 public:
  explicit AuthServer(UserStore& store, const GroupParams& group = GroupParams::standard(),
                      ServerOptions options = {});
  ~AuthServer();
  AuthServer(const AuthServer&) = delete;
  AuthServer& operator=(const AuthServer&) = delete;

  /// Binds and starts accepting in the background. Port 0 picks a free port.
  void start(const std::string& host, std::uint16_t port);
  std::uint16_t port() const noexcept { return port_; }
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

 private:
  struct Connection {
    std::thread worker;
    std::shared_ptr<std::atomic<bool>> done;
  };

  void accept_loop();
  void handle_connection(int fd);
  void reap_finished();

  UserStore& store_;
  const GroupParams& group_;
  ServerOptions options_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex connections_mutex_;
  std::vector<Connection> connections_;
  std::set<int> open_fds_;
};

}  // namespace rcph
