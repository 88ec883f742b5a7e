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

#include <chrono>
#include <cstdint>
#include <functional>
#include <thread>
#include <utility>
#include <vector>

#include "attest/hbw.hpp"
#include "attest/protocol.hpp"

namespace attest {

/// A state whose one-cycle evaluation under the specification reached
/// the invalid state, together with that final state.
template <typename S>
struct SafetyViolation {
  std::uint64_t index;
  S state;
  S final_state;
};

template <typename S>
struct SafetyReport {
  std::uint64_t states_checked = 0;
  std::vector<SafetyViolation<S>> violations;
  std::chrono::duration<double> elapsed{0};

  bool safe() const { return violations.empty(); }
};

/**
 * Exhaustive safety check: evaluates the specification term once from
 * every state produced by `state_at` over [0, count) and records each
 * state whose evaluation ends invalid. The index range is split across
 * `workers` threads; per-worker results are concatenated in range order,
 * so the report does not depend on the partitioning.
 */
template <typename EC, typename AP, typename S>
SafetyReport<S> check_safety(const ProtocolDef<EC, AP, S>& def, const IntCom<EC, AP>& spec,
                             std::uint64_t count,
                             const std::function<S(std::uint64_t)>& state_at,
                             unsigned workers = std::thread::hardware_concurrency()) {
  if (workers == 0) workers = 1;
  if (workers > count && count > 0) workers = static_cast<unsigned>(count);

  auto started = std::chrono::steady_clock::now();
  std::vector<std::vector<SafetyViolation<S>>> found(workers);

  auto sweep = [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      S state = state_at(i);
      S final_state = eval_ic(def, spec, state);
      if (final_state == def.wrong) {
        found[w].push_back(SafetyViolation<S>{i, std::move(state), std::move(final_state)});
      }
    }
  };

  if (workers == 1) {
    sweep(0, 0, count);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::uint64_t chunk = count / workers;
    std::uint64_t rest = count % workers;
    std::uint64_t begin = 0;
    for (unsigned w = 0; w < workers; ++w) {
      std::uint64_t end = begin + chunk + (w < rest ? 1 : 0);
      threads.emplace_back(sweep, w, begin, end);
      begin = end;
    }
    for (auto& t : threads) t.join();
  }

  SafetyReport<S> report;
  report.states_checked = count;
  for (auto& part : found) {
    report.violations.insert(report.violations.end(), std::make_move_iterator(part.begin()),
                             std::make_move_iterator(part.end()));
  }
  report.elapsed = std::chrono::steady_clock::now() - started;
  return report;
}

namespace hbw {

/// Number of distinct valid warehouse states: four possible contents for
/// each of the nine bays, and seven possibilities for the pending
/// request (none, or store/retrieve of three colors each).
inline constexpr std::uint64_t state_count = []() {
  std::uint64_t bays = 1;
  for (int i = 0; i < bay_count; ++i) bays *= 4;
  return bays * 7;
}();

namespace detail {

inline constexpr std::uint64_t inputs_per_bays = 7;

inline std::optional<Input> input_at(std::uint64_t k) {
  // 0: none, 1..3: store red/white/blue, 4..6: retrieve red/white/blue.
  if (k == 0) return std::nullopt;
  ItemColor color = static_cast<ItemColor>((k - 1) % 3);
  return k <= 3 ? Input::store(color) : Input::retrieve(color);
}

inline std::uint64_t input_index(const std::optional<Input>& input) {
  if (!input) return 0;
  std::uint64_t color = static_cast<std::uint64_t>(input->color);
  return (input->kind == Input::Kind::Store ? 1 : 4) + color;
}

}  // namespace detail

/**
 * Bijective enumeration of the valid states. Bay contents act as a
 * base-4 counter (bay 1 is the least significant digit, Empty < Red <
 * White < Blue), and for each bay configuration the seven inputs are
 * visited in a fixed order. Index 0 is the all-empty, no-input state.
 */
inline HbwState state_at(std::uint64_t index) {
  assert(index < state_count);
  std::uint64_t input_part = index % detail::inputs_per_bays;
  std::uint64_t digits = index / detail::inputs_per_bays;
  Bays bays;
  for (int n = 1; n <= bay_count; ++n) {
    bays = update_bay(bays, n, static_cast<Color>(digits % 4));
    digits /= 4;
  }
  return HbwState::sigma(bays, detail::input_at(input_part));
}

/// Inverse of state_at. Valid states only.
inline std::uint64_t state_index(const HbwState& state) {
  assert(!state.is_wrong());
  std::uint64_t digits = 0;
  for (int n = bay_count; n >= 1; --n) {
    digits = digits * 4 + static_cast<std::uint64_t>(state.bays().at(n));
  }
  return digits * detail::inputs_per_bays + detail::input_index(state.input());
}

/// Exhaustive safety check of a specification term against the full
/// warehouse state space.
inline SafetyReport<HbwState> check_safety(const HbwTerm& spec,
                                           unsigned workers = std::thread::hardware_concurrency()) {
  return attest::check_safety<HbwCmd, HbwAp, HbwState>(
      hbw_protocol(), spec, state_count, [](std::uint64_t i) { return state_at(i); }, workers);
}

}  // namespace hbw

}  // namespace attest
