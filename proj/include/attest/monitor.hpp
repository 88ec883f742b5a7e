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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "attest/protocol.hpp"

namespace attest {

namespace detail {

template <typename EC>
std::string describe_cmd(const EC& cmd) {
  if constexpr (requires { to_string(cmd); }) {
    return to_string(cmd);
  } else {
    (void)cmd;
    return "command";
  }
}

}  // namespace detail

/**
 * Decides whether a finite command sequence is a trace of the protocol:
 * each observed command must be exactly the next command the
 * specification emits, and must keep the state valid. When a pass
 * through the specification exhausts, the next command is matched
 * against a fresh copy of the specification from the reached state.
 */
template <typename EC, typename AP, typename S>
bool is_trace(const ProtocolDef<EC, AP, S>& def, const IntCom<EC, AP>& spec,
              const std::vector<EC>& cmds, S state) {
  if (state == def.wrong) return false;
  IntCom<EC, AP> term = spec;
  for (const EC& observed : cmds) {
    auto step = eval_until_next_com(def, term, state);
    if (!step.next) return false;
    if (!(*step.next == observed)) return false;
    if (step.state_after == def.wrong) return false;
    state = std::move(step.state_after);
    term = step.continuation ? std::move(*step.continuation) : spec;
  }
  return true;
}

/// Outcome of observing one event.
struct Verdict {
  bool ok = true;
  std::string reason;

  explicit operator bool() const { return ok; }
};

/**
 * Streaming conformance monitor for one protocol session.
 *
 * Events arrive one at a time: an optional initial state (before
 * anything else), inputs at cycle boundaries, and external commands.
 * The monitor tracks the protocol state and the remaining specification
 * term for the current cycle; the first event that deviates from the
 * specification halts the session permanently and is recorded as the
 * offense. Event positions are 1-based over everything observed.
 */
template <typename EC, typename AP, typename S>
class SessionMonitor {
 public:
  struct Offense {
    std::uint64_t position = 0;
    std::optional<EC> cmd;  // set when the offending event was a command
    std::string reason;
  };

  SessionMonitor(ProtocolDef<EC, AP, S> def, IntCom<EC, AP> spec, S initial)
      : def_(std::move(def)), spec_(std::move(spec)), state_(std::move(initial)) {}

  /// Replaces the session state wholesale. Legal only as the very first
  /// observed event.
  Verdict observe_state(S state) {
    if (halted_) return already_halted();
    ++events_;
    if (events_ != 1) return fail(std::nullopt, "state event after session start");
    if (state == def_.wrong) return fail(std::nullopt, "state event carries the invalid state");
    state_ = std::move(state);
    return Verdict{};
  }

  /// Feeds the next environment input, given as the state it moves the
  /// session into (inputs act on the state component the environment
  /// owns, so the caller derives `next` from state()). Legal only
  /// between cycles, i.e. while no partially handled command sequence is
  /// pending.
  Verdict observe_input(S next) {
    if (halted_) return already_halted();
    ++events_;
    if (continuation_) return fail(std::nullopt, "input arrived mid-cycle");
    if (next == def_.wrong) return fail(std::nullopt, "input produced the invalid state");
    state_ = std::move(next);
    return Verdict{};
  }

  /// Feeds the next observed external command.
  Verdict observe_command(const EC& cmd) {
    if (halted_) return already_halted();
    ++events_;
    const IntCom<EC, AP>& term = continuation_ ? *continuation_ : spec_;
    auto step = eval_until_next_com(def_, term, state_);
    if (!step.next) {
      return fail(cmd, "specification emits no command here, observed " +
                           detail::describe_cmd(cmd));
    }
    if (!(*step.next == cmd)) {
      return fail(cmd, "expected " + detail::describe_cmd(*step.next) + ", observed " +
                           detail::describe_cmd(cmd));
    }
    if (step.state_after == def_.wrong) {
      return fail(cmd, detail::describe_cmd(cmd) + " is invalid in the current state");
    }
    state_ = std::move(step.state_after);
    continuation_ = std::move(step.continuation);
    return Verdict{};
  }

  bool halted() const { return halted_; }

  /// True when no cycle is in progress, so an input may arrive next.
  bool at_cycle_boundary() const { return !continuation_.has_value(); }

  const S& state() const { return state_; }

  std::uint64_t events_observed() const { return events_; }

  const std::optional<Offense>& offense() const { return offense_; }

 private:
  Verdict already_halted() const {
    return Verdict{false, "session halted: " + offense_->reason};
  }

  Verdict fail(std::optional<EC> cmd, std::string reason) {
    halted_ = true;
    offense_ = Offense{events_, std::move(cmd), reason};
    return Verdict{false, std::move(reason)};
  }

  ProtocolDef<EC, AP, S> def_;
  IntCom<EC, AP> spec_;
  S state_;
  std::optional<IntCom<EC, AP>> continuation_;
  bool halted_ = false;
  std::optional<Offense> offense_;
  std::uint64_t events_ = 0;
};

}  // namespace attest
