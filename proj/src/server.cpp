#include "manip/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "manip/errors.hpp"
#include "manip/protocol.hpp"

namespace manip {

namespace {

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

std::string oversize_error() {
  return R"({"kind":"error","message":"line exceeds )" + std::to_string(kMaxLineBytes) + R"( bytes"})";
}

}  // namespace

Pose ObjectMemory::load() const {
  std::lock_guard lock(mutex_);
  return pose_;
}

void ObjectMemory::store(const Pose& pose) {
  std::lock_guard lock(mutex_);
  pose_ = pose;
}

Server::Server(const MappingConfig& config, double tol) : config_(config), tol_(tol) { validate(config_); }

Server::~Server() { stop(); }

std::uint16_t Server::start(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0) {
    throw std::runtime_error("cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* a = found; a != nullptr; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd, 16) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) throw std::runtime_error("cannot listen on " + host + ":" + service + ": " + std::strerror(errno));

  sockaddr_storage bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  const std::uint16_t actual = bound.ss_family == AF_INET6
                                   ? ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port)
                                   : ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
  listen_fd_ = fd;
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
  return actual;
}

void Server::accept_loop() {
  while (running_) {
    const int client = ::accept(listen_fd_, nullptr, nullptr);
    if (client < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      break;
    }
    std::lock_guard lock(clients_mutex_);
    if (!running_) {
      ::close(client);
      break;
    }
    reap_finished();
    Client& c = clients_.emplace_back();
    c.fd = client;
    c.thread = std::thread([this, &c] {
      serve_client(c.fd);
      c.done = true;
    });
  }
}

void Server::reap_finished() {
  for (auto it = clients_.begin(); it != clients_.end();) {
    if (it->done) {
      it->thread.join();
      ::close(it->fd);
      it = clients_.erase(it);
    } else {
      ++it;
    }
  }
}

void Server::serve_client(int fd) {
  ProtocolSession session(config_, memory_.load(), tol_);
  std::string buffer;
  bool discarding = false;
  char chunk[4096];
  for (;;) {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::string out;
    std::size_t start = 0;
    for (std::size_t nl; (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
      if (discarding) {
        discarding = false;
        continue;
      }
      std::string_view line(buffer.data() + start, nl - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      for (const auto& reply : session.handle(line)) {
        out += reply;
        out += '\n';
      }
    }
    buffer.erase(0, start);
    if (buffer.size() > kMaxLineBytes) {
      if (!discarding) out += oversize_error() + "\n";
      discarding = true;
      buffer.clear();
    }
    memory_.store(session.object());
    if (!out.empty() && !send_all(fd, out)) break;
  }
  memory_.store(session.object());
  ::shutdown(fd, SHUT_RDWR);
}

void Server::stop() {
  if (!running_.exchange(false)) {
    if (acceptor_.joinable()) acceptor_.join();
    return;
  }
  ::shutdown(listen_fd_, SHUT_RDWR);
  if (acceptor_.joinable()) acceptor_.join();
  ::close(listen_fd_);
  std::lock_guard lock(clients_mutex_);
  for (auto& c : clients_) ::shutdown(c.fd, SHUT_RDWR);
  for (auto& c : clients_) {
    c.thread.join();
    ::close(c.fd);
  }
  clients_.clear();
}

std::size_t Server::active_connections() {
  std::lock_guard lock(clients_mutex_);
  std::size_t n = 0;
  for (const auto& c : clients_) n += c.done ? 0 : 1;
  return n;
}

void Server::wait() {
  if (acceptor_.joinable()) acceptor_.join();
}

void serve_stream(std::istream& in, std::ostream& out, const MappingConfig& config, double tol, const Pose& object) {
  ProtocolSession session(config, object, tol);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.size() > kMaxLineBytes) {
      out << oversize_error() << '\n';
    } else {
      for (const auto& reply : session.handle(line)) out << reply << '\n';
    }
    out.flush();
  }
}

std::pair<std::string, std::uint16_t> parse_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError("address must be host:port (got '" + address + "')");
  std::string host = address.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  const std::string port_text = address.substr(colon + 1);
  unsigned port = 0;
  const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port > 65535) {
    throw ConfigError("invalid port '" + port_text + "'");
  }
  return {host, static_cast<std::uint16_t>(port)};
}

}  // namespace manip
