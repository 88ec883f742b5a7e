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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "attest/hbw.hpp"
#include "attest/monitor.hpp"
#include "attest/wire.hpp"

namespace attest::sim {

using hbw::Bays;
using hbw::Color;
using hbw::HbwAp;
using hbw::HbwCmd;
using hbw::HbwState;
using hbw::Input;
using hbw::ItemColor;

using HbwMonitor = SessionMonitor<HbwCmd, HbwAp, HbwState>;

// ---------------------------------------------------------------------------
// Wire vocabulary. Method and result spellings follow the generated
// schema: camelCase methods, camelCase enum variant results.

inline const char* method_name(const Input& input) {
  return input.kind == Input::Kind::Store ? "storeRequest" : "retrieveRequest";
}

inline std::optional<Input> request_to_input(const wire::WireMessage& m) {
  if (m.args.size() != 1) return std::nullopt;
  auto color = hbw::parse_item_color(m.args[0]);
  if (!color) return std::nullopt;
  if (m.method == "storeRequest") return Input::store(*color);
  if (m.method == "retrieveRequest") return Input::retrieve(*color);
  return std::nullopt;
}

inline std::optional<HbwCmd> driver_call_to_cmd(const wire::WireMessage& m) {
  if (m.args.size() != 1) return std::nullopt;
  auto color = hbw::parse_item_color(m.args[0]);
  if (!color) return std::nullopt;
  if (m.method == "store") return HbwCmd::store(*color);
  if (m.method == "retrieve") return HbwCmd::retrieve(*color);
  return std::nullopt;
}

inline std::optional<HbwCmd> response_to_cmd(const std::string& result) {
  if (result == "isFull") return HbwCmd::is_full();
  if (result == "notFull") return HbwCmd::not_full();
  if (result == "hasColor") return HbwCmd::has_color();
  if (result == "doesNotHaveColor") return HbwCmd::no_color();
  return std::nullopt;
}

inline const char* response_name(const HbwCmd& cmd) {
  switch (cmd.op) {
    case HbwCmd::Op::IsFull: return "isFull";
    case HbwCmd::Op::NotFull: return "notFull";
    case HbwCmd::Op::HasColor: return "hasColor";
    case HbwCmd::Op::NoColor: return "doesNotHaveColor";
    default: return "";
  }
}

// ---------------------------------------------------------------------------
// Service plumbing.

namespace detail {

/// Live connections of a service, so stop() can wake threads blocked in
/// recv. Entries are owned by their handler threads; they deregister
/// before destroying the socket.
class ConnectionRegistry {
 public:
  void add(wire::Socket* sock) {
    std::lock_guard lock(mu_);
    socks_.insert(sock);
    if (closed_) sock->shutdown();
  }

  void remove(wire::Socket* sock) {
    std::lock_guard lock(mu_);
    socks_.erase(sock);
  }

  void shutdown_all() {
    std::lock_guard lock(mu_);
    closed_ = true;
    for (wire::Socket* sock : socks_) sock->shutdown();
  }

 private:
  std::mutex mu_;
  std::set<wire::Socket*> socks_;
  bool closed_ = false;
};

/// Accept loop plus one handler thread per connection.
class Acceptor {
 public:
  Acceptor() = default;
  Acceptor(const Acceptor&) = delete;
  Acceptor& operator=(const Acceptor&) = delete;
  ~Acceptor() { stop(); }

  /// Binds the loopback port (0 = ephemeral) and starts accepting.
  /// Throws std::runtime_error when the port cannot be bound.
  void start(std::uint16_t port, std::function<void(wire::Socket&)> handler) {
    auto listener = wire::Listener::bind_loopback(port);
    if (!listener) {
      throw std::runtime_error("cannot bind loopback port " + std::to_string(port));
    }
    listener_ = std::move(*listener);
    handler_ = std::move(handler);
    accept_thread_ = std::thread([this] { accept_loop(); });
  }

  std::uint16_t port() const { return listener_.port(); }

  ConnectionRegistry& registry() { return conns_; }

  void stop() {
    listener_.close();
    if (accept_thread_.joinable()) accept_thread_.join();
    conns_.shutdown_all();
    std::vector<std::thread> handlers;
    {
      std::lock_guard lock(handlers_mu_);
      handlers.swap(handlers_);
    }
    for (std::thread& t : handlers) t.join();
  }

 private:
  void accept_loop() {
    while (auto sock = listener_.accept_one()) {
      std::lock_guard lock(handlers_mu_);
      handlers_.emplace_back(
          [this](wire::Socket s) {
            conns_.add(&s);
            handler_(s);
            conns_.remove(&s);
          },
          std::move(*sock));
    }
  }

  wire::Listener listener_;
  std::function<void(wire::Socket&)> handler_;
  std::thread accept_thread_;
  std::mutex handlers_mu_;
  std::vector<std::thread> handlers_;
  ConnectionRegistry conns_;
};

inline void send_message(wire::Socket& sock, const wire::WireMessage& msg) {
  sock.send_frame(msg.encode());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Driver: ground truth for the physical warehouse.

/// Physical warehouse state as the driver sees it. `damaged` latches on
/// the two dangerous scenarios: storing into a full warehouse, or
/// retrieving a color that is not stored.
struct DriverState {
  Bays bays;
  bool damaged = false;
};

/**
 * Low-level driver service. Faithfully executes every store/retrieve it
 * receives — including dangerous ones, which latch `damaged` — and
 * answers "ok". `_inspect` reports (bays, damaged) for assertions.
 */
class DriverService {
 public:
  explicit DriverService(Bays initial = {}, std::uint16_t port = 0) {
    state_.bays = initial;
    acceptor_.start(port, [this](wire::Socket& sock) { serve(sock); });
  }

  ~DriverService() { stop(); }

  std::uint16_t port() const { return acceptor_.port(); }

  DriverState state() const {
    std::lock_guard lock(mu_);
    return state_;
  }

  void stop() { acceptor_.stop(); }

 private:
  void serve(wire::Socket& sock) {
    while (auto payload = sock.recv_frame()) {
      auto msg = wire::WireMessage::decode(*payload);
      if (!msg || msg->kind != wire::WireMessage::Kind::Request) {
        detail::send_message(sock, wire::WireMessage::error(msg ? msg->id : 0, "malformed frame"));
        continue;
      }
      detail::send_message(sock, handle(*msg));
    }
  }

  wire::WireMessage handle(const wire::WireMessage& req) {
    std::lock_guard lock(mu_);
    if (req.method == "_inspect") {
      nlohmann::json j;
      j["bays"] = hbw::to_string(state_.bays);
      j["damaged"] = state_.damaged;
      return wire::WireMessage::response(req.id, j.dump());
    }
    auto cmd = driver_call_to_cmd(req);
    if (!cmd) {
      return wire::WireMessage::error(
          req.id, req.method == "store" || req.method == "retrieve" ? "bad argument"
                                                                    : "unknown method");
    }
    if (cmd->op == HbwCmd::Op::Store) {
      if (auto n = hbw::find_color(Color::Empty, state_.bays)) {
        state_.bays = hbw::update_bay(state_.bays, *n, hbw::to_color(cmd->color));
      } else {
        state_.damaged = true;  // dangerous: store into a full warehouse
      }
    } else {
      if (auto n = hbw::find_color(hbw::to_color(cmd->color), state_.bays)) {
        state_.bays = hbw::update_bay(state_.bays, *n, Color::Empty);
      } else {
        state_.damaged = true;  // dangerous: retrieve an absent color
      }
    }
    return wire::WireMessage::response(req.id, "ok");
  }

  detail::Acceptor acceptor_;
  mutable std::mutex mu_;
  DriverState state_;
};

// ---------------------------------------------------------------------------
// Attack patterns: the five compromised-controller behaviors, with the
// warehouse configuration and the first client request that exhibits
// each. All are one-shot: the first matching request triggers the
// malicious handling, everything afterwards is handled honestly.

struct AttackPattern {
  int id;
  const char* name;
  Bays bays;
  Input first_request;
};

inline const AttackPattern& attack_pattern(int id) {
  static const std::vector<AttackPattern> patterns = [] {
    auto bays = [](const char* text) { return *hbw::parse_bays(text); };
    std::vector<AttackPattern> out;
    out.push_back({1, "store-wrong-color",
                   bays("white blue empty white red red empty empty empty"),
                   Input::store(ItemColor::Red)});
    out.push_back({2, "store-with-full", bays("white blue white white red red red blue blue"),
                   Input::store(ItemColor::Red)});
    out.push_back({3, "command-mismatch",
                   bays("white blue empty white red red empty empty empty"),
                   Input::store(ItemColor::Red)});
    out.push_back({4, "response-mismatch",
                   bays("white blue empty white red red empty empty empty"),
                   Input::retrieve(ItemColor::Red)});
    out.push_back({5, "retrieve-no-color",
                   bays("white blue empty white blue blue empty empty empty"),
                   Input::retrieve(ItemColor::Red)});
    return out;
  }();
  if (id < 1 || id > static_cast<int>(patterns.size())) {
    throw std::out_of_range("attack pattern id must be 1..5");
  }
  return patterns[static_cast<std::size_t>(id - 1)];
}

// ---------------------------------------------------------------------------
// Controller: all policy decisions, tracked against a bays mirror.

/**
 * Controller service. Honest behavior per the protocol: a store request
 * is answered isFull when the mirror is full, otherwise notFull followed
 * by a store call to the driver; a retrieve request is answered
 * doesNotHaveColor when the mirror lacks the color, otherwise hasColor
 * followed by a retrieve call. The mirror tracks every accepted request.
 *
 * With `compromised` set, the first request matching the pattern's
 * trigger is handled maliciously instead (see attack_pattern).
 */
class ControllerService {
 public:
  ControllerService(Bays initial, std::uint16_t driver_port, std::uint16_t port = 0,
                    std::optional<int> compromised = std::nullopt)
      : mirror_(initial), attack_(compromised) {
    if (auto sock = wire::Socket::connect_loopback(driver_port)) {
      driver_sock_ = std::move(*sock);
      acceptor_.registry().add(&driver_sock_);
    }
    acceptor_.start(port, [this](wire::Socket& sock) { serve(sock); });
  }

  ~ControllerService() { stop(); }

  std::uint16_t port() const { return acceptor_.port(); }

  Bays mirror() const {
    std::lock_guard lock(mu_);
    return mirror_;
  }

  void stop() {
    {
      std::lock_guard lock(mu_);
      driver_sock_.shutdown();
    }
    acceptor_.stop();
  }

 private:
  void serve(wire::Socket& sock) {
    while (auto payload = sock.recv_frame()) {
      auto msg = wire::WireMessage::decode(*payload);
      if (!msg || msg->kind != wire::WireMessage::Kind::Request) {
        detail::send_message(sock, wire::WireMessage::error(msg ? msg->id : 0, "malformed frame"));
        continue;
      }
      handle(sock, *msg);
    }
  }

  void handle(wire::Socket& sock, const wire::WireMessage& req) {
    std::lock_guard lock(mu_);  // total order on policy decisions and driver calls
    if (req.method == "_inspect") {
      nlohmann::json j;
      j["bays"] = hbw::to_string(mirror_);
      detail::send_message(sock, wire::WireMessage::response(req.id, j.dump()));
      return;
    }
    auto input = request_to_input(req);
    if (!input) {
      detail::send_message(sock, wire::WireMessage::error(req.id, "unknown method"));
      return;
    }
    if (attack_ && !attack_fired_ && *input == attack_pattern(*attack_).first_request) {
      attack_fired_ = true;
      handle_maliciously(sock, req, *input);
      return;
    }
    handle_honestly(sock, req, *input);
  }

  void handle_honestly(wire::Socket& sock, const wire::WireMessage& req, const Input& input) {
    if (!driver_sock_.valid()) {
      detail::send_message(sock, wire::WireMessage::error(req.id, "driver unavailable"));
      return;
    }
    if (input.kind == Input::Kind::Store) {
      auto n = hbw::find_color(Color::Empty, mirror_);
      if (!n) {
        detail::send_message(sock, wire::WireMessage::response(req.id, "isFull"));
        return;
      }
      detail::send_message(sock, wire::WireMessage::response(req.id, "notFull"));
      if (driver_call(HbwCmd::store(input.color))) {
        mirror_ = hbw::update_bay(mirror_, *n, hbw::to_color(input.color));
      }
    } else {
      auto n = hbw::find_color(hbw::to_color(input.color), mirror_);
      if (!n) {
        detail::send_message(sock, wire::WireMessage::response(req.id, "doesNotHaveColor"));
        return;
      }
      detail::send_message(sock, wire::WireMessage::response(req.id, "hasColor"));
      if (driver_call(HbwCmd::retrieve(input.color))) {
        mirror_ = hbw::update_bay(mirror_, *n, Color::Empty);
      }
    }
  }

  // The five compromised behaviors. Each sends a deliberately wrong
  // response and/or driver call; the mirror is updated with whatever
  // fiction hides the deviation from later honest handling.
  void handle_maliciously(wire::Socket& sock, const wire::WireMessage& req, const Input& input) {
    auto reply = [&](const char* result) {
      detail::send_message(sock, wire::WireMessage::response(req.id, result));
    };
    auto mirror_add = [&](ItemColor c) {
      if (auto n = hbw::find_color(Color::Empty, mirror_)) {
        mirror_ = hbw::update_bay(mirror_, *n, hbw::to_color(c));
      }
    };
    switch (*attack_) {
      case 1:  // claim the store happened, but store the wrong color
        reply("notFull");
        driver_call(HbwCmd::store(ItemColor::Blue));
        mirror_add(input.color);
        break;
      case 2:  // warehouse is full, store anyway
        reply("notFull");
        driver_call(HbwCmd::store(input.color));
        break;
      case 3:  // answer a store request with the retrieve-side commands
        reply("hasColor");
        driver_call(HbwCmd::retrieve(input.color));
        mirror_add(input.color);
        break;
      case 4:  // answer a retrieve request with the store-side response
        reply("notFull");
        driver_call(HbwCmd::retrieve(input.color));
        mirror_add(input.color);
        break;
      case 5:  // claim an absent color is present and retrieve it
        reply("hasColor");
        driver_call(HbwCmd::retrieve(input.color));
        break;
      default:
        reply("notFull");
        break;
    }
  }

  bool driver_call(const HbwCmd& cmd) {
    if (!driver_sock_.valid()) return false;
    wire::WireMessage req = wire::WireMessage::request(
        next_driver_id_++, cmd.op == HbwCmd::Op::Store ? "store" : "retrieve",
        {hbw::to_string(cmd.color)});
    auto reply = wire::call(driver_sock_, req);
    return reply && reply->kind == wire::WireMessage::Kind::Response;
  }

  detail::Acceptor acceptor_;
  mutable std::mutex mu_;
  Bays mirror_;
  wire::Socket driver_sock_;
  std::uint64_t next_driver_id_ = 1;
  std::optional<int> attack_;
  bool attack_fired_ = false;
};

// ---------------------------------------------------------------------------
// Attestation proxy.

/// Point-in-time view of the proxy's session monitor.
struct GateSnapshot {
  bool halted = false;
  bool at_boundary = true;
  std::uint64_t events = 0;
  std::uint64_t rejected = 0;
  std::string state_text;
  std::optional<HbwMonitor::Offense> offense;
};

inline nlohmann::json to_json(const GateSnapshot& snap) {
  nlohmann::json j;
  j["halted"] = snap.halted;
  j["at_boundary"] = snap.at_boundary;
  j["events"] = snap.events;
  j["rejected"] = snap.rejected;
  j["state"] = snap.state_text;
  if (snap.offense) {
    nlohmann::json o;
    o["position"] = snap.offense->position;
    if (snap.offense->cmd) o["cmd"] = hbw::to_string(*snap.offense->cmd);
    o["reason"] = snap.offense->reason;
    j["offense"] = o;
  }
  return j;
}

namespace detail {

/**
 * Serializes all attestation observations through one session monitor
 * and enforces the cross-connection ordering the protocol fixes: a
 * response the controller sends mid-cycle is held back from the client
 * until the cycle's remaining commands were observed, and a driver call
 * arriving while a response is still unobserved at a cycle boundary
 * waits for that response to be fed first.
 */
class AttestationGate {
 public:
  explicit AttestationGate(HbwState initial)
      : monitor_(hbw::hbw_protocol(), hbw::hbw_spec(), std::move(initial)) {}

  Verdict input(const Input& input) {
    std::lock_guard lock(mu_);
    Verdict v = monitor_.observe_input(monitor_.state().with_input(input));
    if (!v) ++rejected_;
    cv_.notify_all();
    return v;
  }

  /// Marks a client-bound response in flight (sent upstream, reply not
  /// yet observed). Keeps driver calls from overtaking it at a cycle
  /// boundary.
  void begin_response() {
    std::lock_guard lock(mu_);
    ++pending_responses_;
  }

  /// Withdraws begin_response when no observable response came back.
  void abort_response() {
    std::lock_guard lock(mu_);
    --pending_responses_;
    cv_.notify_all();
  }

  Verdict response_command(const HbwCmd& cmd) {
    std::lock_guard lock(mu_);
    Verdict v = monitor_.observe_command(cmd);
    --pending_responses_;
    if (!v) ++rejected_;
    cv_.notify_all();
    return v;
  }

  /// Blocks until the held response may be released to the client: the
  /// cycle completed. False = the session halted (or the proxy is
  /// stopping) and the response must be replaced with an error.
  bool wait_release() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return stopping_ || monitor_.halted() || monitor_.at_cycle_boundary(); });
    return !stopping_ && !monitor_.halted();
  }

  Verdict driver_command(const HbwCmd& cmd) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] {
      return stopping_ || monitor_.halted() ||
             !(monitor_.at_cycle_boundary() && pending_responses_ > 0);
    });
    if (stopping_) return Verdict{false, "proxy stopping"};
    Verdict v = monitor_.observe_command(cmd);
    if (!v) ++rejected_;
    cv_.notify_all();
    return v;
  }

  void stop() {
    std::lock_guard lock(mu_);
    stopping_ = true;
    cv_.notify_all();
  }

  GateSnapshot snapshot() const {
    std::lock_guard lock(mu_);
    GateSnapshot snap;
    snap.halted = monitor_.halted();
    snap.at_boundary = monitor_.at_cycle_boundary();
    snap.events = monitor_.events_observed();
    snap.rejected = rejected_;
    snap.state_text = hbw::to_string(monitor_.state());
    snap.offense = monitor_.offense();
    return snap;
  }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  HbwMonitor monitor_;
  int pending_responses_ = 0;
  std::uint64_t rejected_ = 0;
  bool stopping_ = false;
};

}  // namespace detail

/**
 * Attestation proxy. Interposes on both links: clients connect to
 * port() instead of the controller, and the controller's "driver" is
 * driver_side_port() instead of the real driver. Every protocol RPC is
 * mapped to an event and fed to one session monitor in arrival order;
 * conformant traffic is forwarded unchanged, the first nonconformant
 * event halts the session and everything from then on is answered
 * error("fail-safe") without being forwarded.
 */
class ProxyService {
 public:
  ProxyService(HbwState initial, std::uint16_t driver_port, std::uint16_t front_port = 0,
               std::uint16_t driver_side_port = 0)
      : gate_(std::move(initial)), real_driver_port_(driver_port) {
    front_.start(front_port, [this](wire::Socket& sock) { serve_front(sock); });
    driver_side_.start(driver_side_port, [this](wire::Socket& sock) { serve_driver_side(sock); });
  }

  ~ProxyService() { stop(); }

  /// Where clients connect.
  std::uint16_t port() const { return front_.port(); }

  /// Where the controller connects believing it is the driver.
  std::uint16_t driver_side_port() const { return driver_side_.port(); }

  /// Must be set before the first client request arrives.
  void set_controller_port(std::uint16_t port) { controller_port_ = port; }

  GateSnapshot snapshot() const { return gate_.snapshot(); }

  void stop() {
    gate_.stop();
    front_.stop();
    driver_side_.stop();
  }

 private:
  void serve_front(wire::Socket& client) {
    wire::Socket upstream;
    if (auto sock = wire::Socket::connect_loopback(controller_port_.load())) {
      upstream = std::move(*sock);
      front_.registry().add(&upstream);
    }

    while (auto payload = client.recv_frame()) {
      auto msg = wire::WireMessage::decode(*payload);
      if (!msg || msg->kind != wire::WireMessage::Kind::Request) {
        detail::send_message(client,
                             wire::WireMessage::error(msg ? msg->id : 0, "malformed frame"));
        continue;
      }
      if (msg->method == "_inspect") {
        detail::send_message(client,
                             wire::WireMessage::response(msg->id, to_json(snapshot()).dump()));
        continue;
      }
      auto input = request_to_input(*msg);
      if (!input) {
        detail::send_message(client, wire::WireMessage::error(msg->id, "unknown method"));
        continue;
      }
      if (!gate_.input(*input)) {
        detail::send_message(client, wire::WireMessage::error(msg->id, "fail-safe"));
        continue;
      }
      gate_.begin_response();
      std::optional<std::string> reply_payload;
      if (upstream.valid() && upstream.send_frame(*payload)) {
        reply_payload = upstream.recv_frame();
      }
      if (!reply_payload) {
        gate_.abort_response();
        detail::send_message(client, wire::WireMessage::error(msg->id, "upstream unavailable"));
        continue;
      }
      auto reply = wire::WireMessage::decode(*reply_payload);
      std::optional<HbwCmd> cmd;
      if (reply && reply->kind == wire::WireMessage::Kind::Response) {
        cmd = response_to_cmd(reply->result);
      }
      if (!cmd) {
        // Error frames and non-protocol results pass through unobserved.
        gate_.abort_response();
        client.send_frame(*reply_payload);
        continue;
      }
      if (!gate_.response_command(*cmd) || !gate_.wait_release()) {
        detail::send_message(client, wire::WireMessage::error(msg->id, "fail-safe"));
        continue;
      }
      client.send_frame(*reply_payload);  // forward unchanged
    }

    if (upstream.valid()) front_.registry().remove(&upstream);
  }

  void serve_driver_side(wire::Socket& controller) {
    wire::Socket driver;
    if (auto sock = wire::Socket::connect_loopback(real_driver_port_)) {
      driver = std::move(*sock);
      driver_side_.registry().add(&driver);
    }

    while (auto payload = controller.recv_frame()) {
      auto msg = wire::WireMessage::decode(*payload);
      if (!msg || msg->kind != wire::WireMessage::Kind::Request) {
        detail::send_message(controller,
                             wire::WireMessage::error(msg ? msg->id : 0, "malformed frame"));
        continue;
      }
      auto cmd = driver_call_to_cmd(*msg);
      if (!cmd) {
        detail::send_message(controller, wire::WireMessage::error(msg->id, "unknown method"));
        continue;
      }
      if (!gate_.driver_command(*cmd)) {
        detail::send_message(controller, wire::WireMessage::error(msg->id, "fail-safe"));
        continue;
      }
      std::optional<std::string> reply_payload;
      if (driver.valid() && driver.send_frame(*payload)) {
        reply_payload = driver.recv_frame();
      }
      if (!reply_payload) {
        detail::send_message(controller, wire::WireMessage::error(msg->id, "driver unavailable"));
        continue;
      }
      controller.send_frame(*reply_payload);
    }

    if (driver.valid()) driver_side_.registry().remove(&driver);
  }

  detail::AttestationGate gate_;
  std::uint16_t real_driver_port_;
  std::atomic<std::uint16_t> controller_port_{0};
  detail::Acceptor front_;
  detail::Acceptor driver_side_;
};

// ---------------------------------------------------------------------------
// Client and orchestration.

struct SimConfig {
  std::uint64_t requests = 100;
  std::uint64_t seed = 1;
  bool attested = false;
  std::optional<int> compromised;  // attack pattern 1..5
  std::uint16_t driver_port = 0;   // 0 = ephemeral
  std::uint16_t controller_port = 0;
  std::uint16_t proxy_port = 0;
  std::uint16_t proxy_driver_port = 0;
};

struct ClientSummary {
  std::uint64_t sent = 0;
  std::uint64_t ok = 0;
  std::uint64_t rejected = 0;
  bool aborted = false;  // transport failure mid-run
  std::vector<double> latencies_ms;
  std::uint64_t wire_bytes = 0;  // frames in both directions, prefixes included
};

/// Deterministic request stream for a seed: uniformly random kind and
/// color per request. `first` overrides request 1 (attack triggers).
inline Input nth_request(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 1);
  std::uniform_int_distribution<int> color(0, 2);
  int k = kind(rng);
  auto c = static_cast<ItemColor>(color(rng));
  return k == 0 ? Input::store(c) : Input::retrieve(c);
}

inline ClientSummary run_client(std::uint16_t port, std::uint64_t requests, std::uint64_t seed,
                                std::optional<Input> first = std::nullopt) {
  ClientSummary summary;
  auto sock = wire::Socket::connect_loopback(port);
  if (!sock) {
    summary.aborted = true;
    return summary;
  }
  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < requests; ++i) {
    Input input = nth_request(rng);
    if (i == 0 && first) input = *first;
    wire::WireMessage req =
        wire::WireMessage::request(i + 1, method_name(input), {hbw::to_string(input.color)});
    ++summary.sent;
    auto started = std::chrono::steady_clock::now();
    auto reply = wire::call(*sock, req);
    auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             started);
    if (!reply) {
      summary.aborted = true;
      break;
    }
    summary.latencies_ms.push_back(elapsed.count());
    if (reply->kind == wire::WireMessage::Kind::Response) {
      ++summary.ok;
    } else {
      ++summary.rejected;
    }
  }
  summary.wire_bytes = sock->bytes_sent() + sock->bytes_received();
  return summary;
}

struct SimReport {
  ClientSummary client;
  DriverState driver;
  Bays mirror;
  bool mirror_divergence = false;
  std::optional<GateSnapshot> gate;  // present iff attested
};

/**
 * Boots driver, controller and (when attested) the proxy on loopback,
 * runs the seeded client against the front-most service, then tears
 * everything down and reports ground truth, mirror and monitor state.
 * With `compromised` set, services start from the pattern's warehouse
 * configuration and the client's first request is the pattern trigger.
 */
inline SimReport run_simulation(const SimConfig& cfg) {
  Bays initial;
  std::optional<Input> first;
  if (cfg.compromised) {
    const AttackPattern& pattern = attack_pattern(*cfg.compromised);
    initial = pattern.bays;
    first = pattern.first_request;
  }

  DriverService driver(initial, cfg.driver_port);
  std::optional<ProxyService> proxy;
  std::uint16_t driver_target = driver.port();
  if (cfg.attested) {
    proxy.emplace(HbwState::sigma(initial, std::nullopt), driver.port(), cfg.proxy_port,
                  cfg.proxy_driver_port);
    driver_target = proxy->driver_side_port();
  }
  ControllerService controller(initial, driver_target, cfg.controller_port, cfg.compromised);
  if (proxy) proxy->set_controller_port(controller.port());

  SimReport report;
  report.client =
      run_client(proxy ? proxy->port() : controller.port(), cfg.requests, cfg.seed, first);

  if (proxy) report.gate = proxy->snapshot();
  report.mirror = controller.mirror();
  if (proxy) proxy->stop();
  controller.stop();
  driver.stop();
  report.driver = driver.state();
  report.mirror_divergence = !(report.mirror == report.driver.bays);
  return report;
}

}  // namespace attest::sim
