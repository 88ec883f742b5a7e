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

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "attest/hbw.hpp"
#include "attest/monitor.hpp"

namespace attest::hbw {

// Recorded session events. A trace file holds one event per line:
//
//   state <bay1> ... <bay9>      full bay snapshot, first event only
//   input store|retrieve <color>
//   cmd isfull|notfull|hascolor|nocolor
//   cmd store|retrieve <color>
//
// '#' starts a comment, blank lines are skipped, keywords are
// case-insensitive.

struct StateEvent {
  Bays bays;
  friend bool operator==(const StateEvent&, const StateEvent&) = default;
};

struct InputEvent {
  Input input;
  friend bool operator==(const InputEvent&, const InputEvent&) = default;
};

struct CommandEvent {
  HbwCmd cmd;
  friend bool operator==(const CommandEvent& a, const CommandEvent& b) {
    return a.cmd == b.cmd;
  }
};

using TraceEvent = std::variant<StateEvent, InputEvent, CommandEvent>;

struct TraceParseError {
  std::size_t line = 0;  // 1-based; 0 for file-level errors
  std::string message;
};

struct ParsedTrace {
  std::vector<TraceEvent> events;
  std::vector<std::size_t> lines;  // source line of each event, parallel to events
  std::optional<TraceParseError> error;

  bool ok() const { return !error.has_value(); }
};

namespace detail {

inline std::vector<std::string> tokenize_lower(const std::string& line) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : line) {
    if (ch == '#') break;
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace detail

inline ParsedTrace parse_trace(std::istream& in) {
  ParsedTrace out;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](std::string message) {
    out.error = TraceParseError{lineno, std::move(message)};
    return out;
  };

  while (std::getline(in, line)) {
    ++lineno;
    auto tokens = detail::tokenize_lower(line);
    if (tokens.empty()) continue;
    out.lines.push_back(lineno);
    const std::string& keyword = tokens[0];

    if (keyword == "state") {
      if (tokens.size() != 1 + bay_count) {
        return fail("state event needs exactly " + std::to_string(bay_count) + " bay colors");
      }
      StateEvent ev;
      for (int n = 1; n <= bay_count; ++n) {
        auto color = parse_color(tokens[static_cast<std::size_t>(n)]);
        if (!color) return fail("unknown color '" + tokens[static_cast<std::size_t>(n)] + "'");
        ev.bays = update_bay(ev.bays, n, *color);
      }
      out.events.emplace_back(ev);
    } else if (keyword == "input") {
      if (tokens.size() != 3) return fail("input event needs a kind and a color");
      auto color = parse_item_color(tokens[2]);
      if (!color) return fail("unknown item color '" + tokens[2] + "'");
      if (tokens[1] == "store") {
        out.events.emplace_back(InputEvent{Input::store(*color)});
      } else if (tokens[1] == "retrieve") {
        out.events.emplace_back(InputEvent{Input::retrieve(*color)});
      } else {
        return fail("unknown input kind '" + tokens[1] + "'");
      }
    } else if (keyword == "cmd") {
      if (tokens.size() < 2) return fail("cmd event needs a command name");
      const std::string& name = tokens[1];
      if (name == "isfull" || name == "notfull" || name == "hascolor" || name == "nocolor") {
        if (tokens.size() != 2) return fail("'" + name + "' takes no color");
        HbwCmd cmd = name == "isfull"     ? HbwCmd::is_full()
                     : name == "notfull"  ? HbwCmd::not_full()
                     : name == "hascolor" ? HbwCmd::has_color()
                                          : HbwCmd::no_color();
        out.events.emplace_back(CommandEvent{cmd});
      } else if (name == "store" || name == "retrieve") {
        if (tokens.size() != 3) return fail("'" + name + "' needs a color");
        auto color = parse_item_color(tokens[2]);
        if (!color) return fail("unknown item color '" + tokens[2] + "'");
        out.events.emplace_back(
            CommandEvent{name == "store" ? HbwCmd::store(*color) : HbwCmd::retrieve(*color)});
      } else {
        return fail("unknown command '" + name + "'");
      }
    } else {
      return fail("unknown event keyword '" + keyword + "'");
    }
  }
  return out;
}

inline ParsedTrace parse_trace_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

inline ParsedTrace load_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    ParsedTrace out;
    out.error = TraceParseError{0, "cannot open '" + path.string() + "'"};
    return out;
  }
  return parse_trace(in);
}

inline std::string format_trace(const std::vector<TraceEvent>& events) {
  std::string out;
  for (const TraceEvent& event : events) {
    if (const auto* st = std::get_if<StateEvent>(&event)) {
      out += "state " + to_string(st->bays);
    } else if (const auto* in = std::get_if<InputEvent>(&event)) {
      out += "input " + to_string(in->input);
    } else {
      out += "cmd " + to_string(std::get<CommandEvent>(event).cmd);
    }
    out += '\n';
  }
  return out;
}

using HbwMonitor = SessionMonitor<HbwCmd, HbwAp, HbwState>;

/// Replay outcome. `states` holds the protocol state after each accepted
/// event, in order, so callers can check intermediate bay snapshots.
struct TraceCheck {
  bool conformant = true;
  std::optional<HbwMonitor::Offense> offense;
  HbwState final_state;
  std::vector<HbwState> states;
};

/// Replays recorded events through a fresh session monitor. The session
/// starts from `initial` (all bays empty, no input, unless the trace
/// opens with a state event). Replay stops at the first offense.
inline TraceCheck check_trace(const std::vector<TraceEvent>& events,
                              HbwState initial = HbwState()) {
  HbwMonitor monitor(hbw_protocol(), hbw_spec(), std::move(initial));
  TraceCheck out;
  for (const TraceEvent& event : events) {
    Verdict verdict;
    if (const auto* st = std::get_if<StateEvent>(&event)) {
      verdict = monitor.observe_state(HbwState::sigma(st->bays, std::nullopt));
    } else if (const auto* in = std::get_if<InputEvent>(&event)) {
      verdict = monitor.observe_input(monitor.state().with_input(in->input));
    } else {
      verdict = monitor.observe_command(std::get<CommandEvent>(event).cmd);
    }
    if (!verdict) {
      out.conformant = false;
      out.offense = monitor.offense();
      break;
    }
    out.states.push_back(monitor.state());
  }
  out.final_state = monitor.state();
  return out;
}

}  // namespace attest::hbw
