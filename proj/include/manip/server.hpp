#pragma once

// TCP endpoint for the session protocol. One thread and one Session per
// connection. The last object pose is remembered in memory so that a client
// reconnecting later engages from where the previous connection left off.

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <list>
#include <mutex>
#include <string>
#include <thread>

#include "manip/geometry.hpp"
#include "manip/mapping.hpp"

namespace manip {

/// Lines longer than this are rejected with an error message.
inline constexpr std::size_t kMaxLineBytes = 64 * 1024;

class ObjectMemory {
 public:
  Pose load() const;
  void store(const Pose& pose);

 private:
  mutable std::mutex mutex_;
  Pose pose_{};
};

class Server {
 public:
  Server(const MappingConfig& config, double tol);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting in a background thread. Port 0 picks a free
  /// port. Returns the bound port. Throws std::runtime_error.
  std::uint16_t start(const std::string& host, std::uint16_t port);

  /// Closes the listener and all connections, then joins every thread.
  void stop();

  /// Blocks until stop() is called from elsewhere.
  void wait();

  const ObjectMemory& memory() const noexcept { return memory_; }

  /// Connections whose handler has not finished yet.
  std::size_t active_connections();

 private:
  struct Client {
    int fd;
    std::atomic<bool> done{false};
    std::thread thread;
  };

  void accept_loop();
  void serve_client(int fd);
  /// Joins and closes finished connections. Caller holds clients_mutex_.
  void reap_finished();

  MappingConfig config_;
  double tol_;
  ObjectMemory memory_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex clients_mutex_;
  std::list<Client> clients_;
};

/// Speaks the protocol over a pair of streams until end of input.
void serve_stream(std::istream& in, std::ostream& out, const MappingConfig& config, double tol,
                  const Pose& object = {});

/// Splits "host:port". Throws ConfigError.
std::pair<std::string, std::uint16_t> parse_address(const std::string& address);

}  // namespace manip
