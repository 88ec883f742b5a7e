/*
 * Copyright 2026 The attest authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace attest::wire {

// Framing: every message is a 4-byte big-endian unsigned payload length
// followed by that many bytes of UTF-8 JSON. Byte counters below include
// the length prefixes.

inline constexpr std::uint32_t max_frame_bytes = 1u << 20;

inline std::string encode_frame(std::string_view payload) {
  std::string frame;
  frame.reserve(4 + payload.size());
  auto size = static_cast<std::uint32_t>(payload.size());
  frame.push_back(static_cast<char>((size >> 24) & 0xff));
  frame.push_back(static_cast<char>((size >> 16) & 0xff));
  frame.push_back(static_cast<char>((size >> 8) & 0xff));
  frame.push_back(static_cast<char>(size & 0xff));
  frame.append(payload);
  return frame;
}

/// Owning wrapper around a connected stream socket.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}

  Socket(Socket&& other) noexcept { *this = std::move(other); }
  Socket& operator=(Socket&& other) noexcept {
    if (this != &other) {
      close();
      fd_ = std::exchange(other.fd_, -1);
      bytes_sent_ = other.bytes_sent_;
      bytes_received_ = other.bytes_received_;
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  ~Socket() { close(); }

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }

  void close() {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

  /// Wakes up any thread blocked on this socket; it will see EOF.
  void shutdown() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

  bool send_frame(std::string_view payload) {
    if (payload.size() > max_frame_bytes) return false;
    std::string frame = encode_frame(payload);
    if (!send_all(frame.data(), frame.size())) return false;
    bytes_sent_ += frame.size();
    return true;
  }

  /// Next payload; nullopt on orderly shutdown or any transport error.
  std::optional<std::string> recv_frame() {
    unsigned char prefix[4];
    if (!recv_exact(reinterpret_cast<char*>(prefix), 4)) return std::nullopt;
    std::uint32_t size = (static_cast<std::uint32_t>(prefix[0]) << 24) |
                         (static_cast<std::uint32_t>(prefix[1]) << 16) |
                         (static_cast<std::uint32_t>(prefix[2]) << 8) |
                         static_cast<std::uint32_t>(prefix[3]);
    if (size > max_frame_bytes) return std::nullopt;
    std::string payload(size, '\0');
    if (size > 0 && !recv_exact(payload.data(), size)) return std::nullopt;
    bytes_received_ += 4 + static_cast<std::uint64_t>(size);
    return payload;
  }

  std::uint64_t bytes_sent() const { return bytes_sent_; }
  std::uint64_t bytes_received() const { return bytes_received_; }

  static std::optional<Socket> connect_loopback(std::uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return std::nullopt;
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      ::close(fd);
      return std::nullopt;
    }
    return Socket(fd);
  }

 private:
  bool send_all(const char* data, std::size_t size) {
    std::size_t sent = 0;
    while (sent < size) {
      ssize_t n = ::send(fd_, data + sent, size - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  bool recv_exact(char* data, std::size_t size) {
    std::size_t got = 0;
    while (got < size) {
      ssize_t n = ::recv(fd_, data + got, size - got, 0);
      if (n == 0) return false;
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      got += static_cast<std::size_t>(n);
    }
    return true;
  }

  int fd_ = -1;
  std::uint64_t bytes_sent_ = 0;
  std::uint64_t bytes_received_ = 0;
};

/// Loopback listener. Binding port 0 picks an ephemeral port; port()
/// reports the actual one.
class Listener {
 public:
  Listener() = default;
  Listener(Listener&& other) noexcept { *this = std::move(other); }
  Listener& operator=(Listener&& other) noexcept {
    if (this != &other) {
      close();
      fd_ = std::exchange(other.fd_, -1);
      port_ = other.port_;
    }
    return *this;
  }
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;
  ~Listener() { close(); }

  static std::optional<Listener> bind_loopback(std::uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return std::nullopt;
    int on = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &on, sizeof(on));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
        ::listen(fd, 16) != 0) {
      ::close(fd);
      return std::nullopt;
    }
    socklen_t len = sizeof(addr);
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
      ::close(fd);
      return std::nullopt;
    }
    Listener out;
    out.fd_ = fd;
    out.port_ = ntohs(addr.sin_port);
    return out;
  }

  std::uint16_t port() const { return port_; }
  bool valid() const { return fd_ >= 0; }

  std::optional<Socket> accept_one() {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) return std::nullopt;
    return Socket(fd);
  }

  /// Unblocks a pending accept (it returns nullopt) and stops listening.
  void close() {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/**
 * One wire message: a request carrying a method and text arguments, a
 * response carrying a text result, or an error carrying a reason.
 * Responses and errors echo the id of the request they answer.
 */
struct WireMessage {
  enum class Kind { Request, Response, Error };

  Kind kind = Kind::Request;
  std::uint64_t id = 0;
  std::string method;             // request
  std::vector<std::string> args;  // request
  std::string result;             // response
  std::string reason;             // error

  static WireMessage request(std::uint64_t id, std::string method,
                             std::vector<std::string> args = {}) {
    WireMessage m;
    m.kind = Kind::Request;
    m.id = id;
    m.method = std::move(method);
    m.args = std::move(args);
    return m;
  }

  static WireMessage response(std::uint64_t id, std::string result) {
    WireMessage m;
    m.kind = Kind::Response;
    m.id = id;
    m.result = std::move(result);
    return m;
  }

  static WireMessage error(std::uint64_t id, std::string reason) {
    WireMessage m;
    m.kind = Kind::Error;
    m.id = id;
    m.reason = std::move(reason);
    return m;
  }

  std::string encode() const {
    nlohmann::json j;
    j["id"] = id;
    switch (kind) {
      case Kind::Request:
        j["method"] = method;
        j["args"] = args;
        break;
      case Kind::Response:
        j["result"] = result;
        break;
      case Kind::Error:
        j["reason"] = reason;
        break;
    }
    return j.dump();
  }

  static std::optional<WireMessage> decode(const std::string& payload) {
    nlohmann::json j = nlohmann::json::parse(payload, nullptr, false);
    if (!j.is_object() || !j.contains("id") || !j["id"].is_number_unsigned()) {
      return std::nullopt;
    }
    WireMessage m;
    m.id = j["id"].get<std::uint64_t>();
    if (j.contains("method")) {
      if (!j["method"].is_string() || !j.contains("args") || !j["args"].is_array()) {
        return std::nullopt;
      }
      m.kind = Kind::Request;
      m.method = j["method"].get<std::string>();
      for (const auto& arg : j["args"]) {
        if (!arg.is_string()) return std::nullopt;
        m.args.push_back(arg.get<std::string>());
      }
    } else if (j.contains("result")) {
      if (!j["result"].is_string()) return std::nullopt;
      m.kind = Kind::Response;
      m.result = j["result"].get<std::string>();
    } else if (j.contains("reason")) {
      if (!j["reason"].is_string()) return std::nullopt;
      m.kind = Kind::Error;
      m.reason = j["reason"].get<std::string>();
    } else {
      return std::nullopt;
    }
    return m;
  }
};

/// Sends a request and waits for the matching reply on `sock`. Any
/// transport or codec failure, or an id mismatch, yields nullopt.
inline std::optional<WireMessage> call(Socket& sock, const WireMessage& request) {
  if (!sock.send_frame(request.encode())) return std::nullopt;
  auto payload = sock.recv_frame();
  if (!payload) return std::nullopt;
  auto reply = WireMessage::decode(*payload);
  if (!reply || reply->kind == WireMessage::Kind::Request || reply->id != request.id) {
    return std::nullopt;
  }
  return reply;
}

}  // namespace attest::wire
