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

#include <array>
#include <cassert>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attest/protocol.hpp"

namespace attest::hbw {

/// Content of a bay. Empty precedes the item colors in the enumeration
/// order used throughout (state indexing, serialization, iteration).
enum class Color : std::uint8_t { Empty = 0, Red = 1, White = 2, Blue = 3 };

/// Color of an actual item; requests and stored workpieces are never
/// "empty", so APIs that mean an item use this type.
enum class ItemColor : std::uint8_t { Red = 0, White = 1, Blue = 2 };

inline constexpr std::array<ItemColor, 3> all_item_colors = {ItemColor::Red, ItemColor::White,
                                                             ItemColor::Blue};

constexpr Color to_color(ItemColor c) {
  switch (c) {
    case ItemColor::Red: return Color::Red;
    case ItemColor::White: return Color::White;
    case ItemColor::Blue: return Color::Blue;
  }
  return Color::Empty;  // unreachable
}

constexpr std::optional<ItemColor> to_item_color(Color c) {
  switch (c) {
    case Color::Empty: return std::nullopt;
    case Color::Red: return ItemColor::Red;
    case Color::White: return ItemColor::White;
    case Color::Blue: return ItemColor::Blue;
  }
  return std::nullopt;  // unreachable
}

inline constexpr int bay_count = 9;

/// The nine storage bays. Bays are addressed 1..9 everywhere, matching
/// the numbering on the physical rack.
struct Bays {
  std::array<Color, bay_count> slot{};  // defaults to all Empty

  Color at(int n) const {
    assert(n >= 1 && n <= bay_count);
    return slot[static_cast<std::size_t>(n - 1)];
  }

  friend bool operator==(const Bays&, const Bays&) = default;
};

/// Smallest bay number >= start whose content is exactly `target`
/// (which may be Empty to search for a free bay).
inline std::optional<int> find_color(Color target, int start, const Bays& bays) {
  for (int n = start < 1 ? 1 : start; n <= bay_count; ++n) {
    if (bays.at(n) == target) return n;
  }
  return std::nullopt;
}

inline std::optional<int> find_color(Color target, const Bays& bays) {
  return find_color(target, 1, bays);
}

/// Copy of `bays` with bay n replaced by c.
inline Bays update_bay(const Bays& bays, int n, Color c) {
  assert(n >= 1 && n <= bay_count);
  Bays next = bays;
  next.slot[static_cast<std::size_t>(n - 1)] = c;
  return next;
}

/// A pending customer request: store an item of some color, or retrieve
/// one.
struct Input {
  enum class Kind : std::uint8_t { Store = 0, Retrieve = 1 };

  Kind kind = Kind::Store;
  ItemColor color = ItemColor::Red;

  static constexpr Input store(ItemColor c) { return Input{Kind::Store, c}; }
  static constexpr Input retrieve(ItemColor c) { return Input{Kind::Retrieve, c}; }

  friend bool operator==(const Input&, const Input&) = default;
};

/**
 * Warehouse protocol state: either the distinguished invalid state, or a
 * bay configuration together with an optional pending request. The
 * invalid state is absorbing under every transition.
 */
class HbwState {
 public:
  HbwState() = default;  // all bays empty, no input

  static HbwState wrong() {
    HbwState s;
    s.wrong_ = true;
    return s;
  }

  static HbwState sigma(Bays bays, std::optional<Input> input) {
    HbwState s;
    s.bays_ = bays;
    s.input_ = input;
    return s;
  }

  bool is_wrong() const { return wrong_; }

  const Bays& bays() const {
    assert(!wrong_);
    return bays_;
  }

  const std::optional<Input>& input() const {
    assert(!wrong_);
    return input_;
  }

  /// Same bays, new (or cleared) pending request.
  HbwState with_input(std::optional<Input> input) const {
    assert(!wrong_);
    return sigma(bays_, input);
  }

  friend bool operator==(const HbwState& a, const HbwState& b) {
    if (a.wrong_ != b.wrong_) return false;
    if (a.wrong_) return true;
    return a.bays_ == b.bays_ && a.input_ == b.input_;
  }

 private:
  bool wrong_ = false;
  Bays bays_{};
  std::optional<Input> input_;
};

/**
 * External commands of the warehouse protocol: the four responses sent
 * back to the requesting client and the two actuator commands sent on
 * to the hardware. `color` is meaningful only for Store and Retrieve.
 */
struct HbwCmd {
  enum class Op : std::uint8_t { IsFull, NotFull, HasColor, NoColor, Store, Retrieve };

  Op op = Op::IsFull;
  ItemColor color = ItemColor::Red;

  static constexpr HbwCmd is_full() { return HbwCmd{Op::IsFull, ItemColor::Red}; }
  static constexpr HbwCmd not_full() { return HbwCmd{Op::NotFull, ItemColor::Red}; }
  static constexpr HbwCmd has_color() { return HbwCmd{Op::HasColor, ItemColor::Red}; }
  static constexpr HbwCmd no_color() { return HbwCmd{Op::NoColor, ItemColor::Red}; }
  static constexpr HbwCmd store(ItemColor c) { return HbwCmd{Op::Store, c}; }
  static constexpr HbwCmd retrieve(ItemColor c) { return HbwCmd{Op::Retrieve, c}; }

  bool carries_color() const { return op == Op::Store || op == Op::Retrieve; }

  friend bool operator==(const HbwCmd& a, const HbwCmd& b) {
    if (a.op != b.op) return false;
    return a.carries_color() ? a.color == b.color : true;
  }
  friend bool operator!=(const HbwCmd& a, const HbwCmd& b) { return !(a == b); }
};

/// The full ten-command alphabet, in a fixed deterministic order.
inline std::vector<HbwCmd> all_commands() {
  std::vector<HbwCmd> cmds = {HbwCmd::is_full(), HbwCmd::not_full(), HbwCmd::has_color(),
                              HbwCmd::no_color()};
  for (ItemColor c : all_item_colors) cmds.push_back(HbwCmd::store(c));
  for (ItemColor c : all_item_colors) cmds.push_back(HbwCmd::retrieve(c));
  return cmds;
}

/// Atomic propositions the warehouse specification branches on.
enum class HbwAp : std::uint8_t {
  BaysFull,
  HasStoreRequest,
  HasRetrieveRequest,
  RequestRed,
  RequestWhite,
  RequestBlue,
  ContainsRed,
  ContainsWhite,
  ContainsBlue,
};

inline constexpr std::array<HbwAp, 9> all_props = {
    HbwAp::BaysFull,      HbwAp::HasStoreRequest, HbwAp::HasRetrieveRequest,
    HbwAp::RequestRed,    HbwAp::RequestWhite,    HbwAp::RequestBlue,
    HbwAp::ContainsRed,   HbwAp::ContainsWhite,   HbwAp::ContainsBlue,
};

/// Command precondition. The invalid state admits nothing; response
/// commands additionally constrain the pending request, while actuator
/// commands only require the bays to support them.
inline bool hbw_phi(const HbwCmd& cmd, const HbwState& state) {
  if (state.is_wrong()) return false;
  const Bays& bays = state.bays();
  const std::optional<Input>& input = state.input();
  switch (cmd.op) {
    case HbwCmd::Op::IsFull:
      return input && input->kind == Input::Kind::Store && !find_color(Color::Empty, bays);
    case HbwCmd::Op::NotFull:
      return input && input->kind == Input::Kind::Store && find_color(Color::Empty, bays).has_value();
    case HbwCmd::Op::HasColor:
      return input && input->kind == Input::Kind::Retrieve &&
             find_color(to_color(input->color), bays).has_value();
    case HbwCmd::Op::NoColor:
      return input && input->kind == Input::Kind::Retrieve &&
             !find_color(to_color(input->color), bays);
    case HbwCmd::Op::Store:
      return find_color(Color::Empty, bays).has_value();
    case HbwCmd::Op::Retrieve:
      return find_color(to_color(cmd.color), bays).has_value();
  }
  return false;  // unreachable
}

/// Command transition. Responses leave the state untouched; Store fills
/// the first empty bay, Retrieve empties the first bay holding the
/// requested color. Invalid pairs (and the invalid state) map to wrong.
inline HbwState hbw_step(const HbwCmd& cmd, const HbwState& state) {
  if (!hbw_phi(cmd, state)) return HbwState::wrong();
  const Bays& bays = state.bays();
  switch (cmd.op) {
    case HbwCmd::Op::IsFull:
    case HbwCmd::Op::NotFull:
    case HbwCmd::Op::HasColor:
    case HbwCmd::Op::NoColor:
      return state;
    case HbwCmd::Op::Store: {
      int n = *find_color(Color::Empty, bays);
      return HbwState::sigma(update_bay(bays, n, to_color(cmd.color)), state.input());
    }
    case HbwCmd::Op::Retrieve: {
      int n = *find_color(to_color(cmd.color), bays);
      return HbwState::sigma(update_bay(bays, n, Color::Empty), state.input());
    }
  }
  return HbwState::wrong();  // unreachable
}

/// Labeling of valid states with atomic propositions. The Request*
/// propositions look only at the color of the pending request, not at
/// whether it stores or retrieves.
inline bool hbw_holds(HbwAp prop, const HbwState& state) {
  assert(!state.is_wrong());
  const Bays& bays = state.bays();
  const std::optional<Input>& input = state.input();
  switch (prop) {
    case HbwAp::BaysFull:
      return !find_color(Color::Empty, bays);
    case HbwAp::HasStoreRequest:
      return input && input->kind == Input::Kind::Store;
    case HbwAp::HasRetrieveRequest:
      return input && input->kind == Input::Kind::Retrieve;
    case HbwAp::RequestRed:
      return input && input->color == ItemColor::Red;
    case HbwAp::RequestWhite:
      return input && input->color == ItemColor::White;
    case HbwAp::RequestBlue:
      return input && input->color == ItemColor::Blue;
    case HbwAp::ContainsRed:
      return find_color(Color::Red, bays).has_value();
    case HbwAp::ContainsWhite:
      return find_color(Color::White, bays).has_value();
    case HbwAp::ContainsBlue:
      return find_color(Color::Blue, bays).has_value();
  }
  return false;  // unreachable
}

using HbwTerm = IntCom<HbwCmd, HbwAp>;
using HbwProtocol = ProtocolDef<HbwCmd, HbwAp, HbwState>;

/**
 * The warehouse specification term: answer a store request with
 * IsFull or with NotFull followed by the matching Store, answer a
 * retrieve request with HasColor followed by the matching Retrieve or
 * with NoColor, and do nothing when no request is pending.
 */
inline HbwTerm hbw_spec() {
  using T = HbwTerm;
  auto store_arm = [](ItemColor c) { return T::ext(HbwCmd::store(c)); };
  auto retrieve_arm = [](HbwAp contains, ItemColor c) {
    return T::branch(contains,
                     T::seq(T::ext(HbwCmd::has_color()), T::ext(HbwCmd::retrieve(c))),
                     T::ext(HbwCmd::no_color()));
  };

  T store_side = T::branch(
      HbwAp::BaysFull, T::ext(HbwCmd::is_full()),
      T::seq(T::ext(HbwCmd::not_full()),
             T::branch(HbwAp::RequestRed, store_arm(ItemColor::Red),
                       T::branch(HbwAp::RequestWhite, store_arm(ItemColor::White),
                                 T::branch(HbwAp::RequestBlue, store_arm(ItemColor::Blue),
                                           T::skip())))));

  T retrieve_side = T::branch(
      HbwAp::HasRetrieveRequest,
      T::branch(HbwAp::RequestRed, retrieve_arm(HbwAp::ContainsRed, ItemColor::Red),
                T::branch(HbwAp::RequestWhite, retrieve_arm(HbwAp::ContainsWhite, ItemColor::White),
                          T::branch(HbwAp::RequestBlue,
                                    retrieve_arm(HbwAp::ContainsBlue, ItemColor::Blue),
                                    T::skip()))),
      T::skip());

  return T::branch(HbwAp::HasStoreRequest, store_side, retrieve_side);
}

/// The warehouse protocol bundled for the generic machinery.
inline HbwProtocol hbw_protocol() {
  HbwProtocol def;
  def.wrong = HbwState::wrong();
  def.phi = [](const HbwCmd& c, const HbwState& s) { return hbw_phi(c, s); };
  def.step = [](const HbwCmd& c, const HbwState& s) { return hbw_step(c, s); };
  def.holds = [](HbwAp p, const HbwState& s) { return hbw_holds(p, s); };
  return def;
}

// ---------------------------------------------------------------------------
// Text forms. These are the canonical spellings used by trace files, the
// wire protocol and diagnostics, so keep them stable.

inline std::string to_string(Color c) {
  switch (c) {
    case Color::Empty: return "empty";
    case Color::Red: return "red";
    case Color::White: return "white";
    case Color::Blue: return "blue";
  }
  return "?";  // unreachable
}

inline std::string to_string(ItemColor c) { return to_string(to_color(c)); }

inline std::optional<Color> parse_color(std::string_view text) {
  if (text == "empty") return Color::Empty;
  if (text == "red") return Color::Red;
  if (text == "white") return Color::White;
  if (text == "blue") return Color::Blue;
  return std::nullopt;
}

inline std::optional<ItemColor> parse_item_color(std::string_view text) {
  if (auto c = parse_color(text); c && *c != Color::Empty) return to_item_color(*c);
  return std::nullopt;
}

inline std::string to_string(const Input& input) {
  return (input.kind == Input::Kind::Store ? std::string("store ") : std::string("retrieve ")) +
         to_string(input.color);
}

inline std::string to_string(const HbwCmd& cmd) {
  switch (cmd.op) {
    case HbwCmd::Op::IsFull: return "isfull";
    case HbwCmd::Op::NotFull: return "notfull";
    case HbwCmd::Op::HasColor: return "hascolor";
    case HbwCmd::Op::NoColor: return "nocolor";
    case HbwCmd::Op::Store: return "store " + to_string(cmd.color);
    case HbwCmd::Op::Retrieve: return "retrieve " + to_string(cmd.color);
  }
  return "?";  // unreachable
}

inline std::string to_string(const Bays& bays) {
  std::string out;
  for (int n = 1; n <= bay_count; ++n) {
    if (n > 1) out += ' ';
    out += to_string(bays.at(n));
  }
  return out;
}

/// Parses nine whitespace-separated color names into a bay
/// configuration; the inverse of to_string(Bays).
inline std::optional<Bays> parse_bays(std::string_view text) {
  Bays bays;
  int n = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    auto color = parse_color(text.substr(pos, end - pos));
    if (!color || n >= bay_count) return std::nullopt;
    bays = update_bay(bays, ++n, *color);
    pos = end;
  }
  if (n != bay_count) return std::nullopt;
  return bays;
}

inline std::string to_string(const HbwState& state) {
  if (state.is_wrong()) return "wrong";
  std::string out = to_string(state.bays());
  out += " input ";
  out += state.input() ? to_string(*state.input()) : std::string("none");
  return out;
}

inline std::string to_string(HbwAp prop) {
  switch (prop) {
    case HbwAp::BaysFull: return "bays-full";
    case HbwAp::HasStoreRequest: return "has-store-request";
    case HbwAp::HasRetrieveRequest: return "has-retrieve-request";
    case HbwAp::RequestRed: return "request-red";
    case HbwAp::RequestWhite: return "request-white";
    case HbwAp::RequestBlue: return "request-blue";
    case HbwAp::ContainsRed: return "contains-red";
    case HbwAp::ContainsWhite: return "contains-white";
    case HbwAp::ContainsBlue: return "contains-blue";
  }
  return "?";  // unreachable
}

}  // namespace attest::hbw
