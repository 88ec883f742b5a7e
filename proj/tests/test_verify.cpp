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

#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "attest/verify.hpp"

using namespace attest;
using namespace attest::hbw;

TEST_CASE("the state space has the advertised size", "[verify]") {
  STATIC_REQUIRE(state_count == 1835008);  // 4^9 bay contents times 7 requests
}

TEST_CASE("state enumeration is a bijection", "[verify]") {
  SECTION("index 0 is the all-empty, idle state") {
    HbwState s = state_at(0);
    CHECK(s.bays() == Bays{});
    CHECK_FALSE(s.input().has_value());
  }

  SECTION("the seven inputs cycle fastest") {
    CHECK_FALSE(state_at(0).input().has_value());
    CHECK(state_at(1).input() == Input::store(ItemColor::Red));
    CHECK(state_at(2).input() == Input::store(ItemColor::White));
    CHECK(state_at(3).input() == Input::store(ItemColor::Blue));
    CHECK(state_at(4).input() == Input::retrieve(ItemColor::Red));
    CHECK(state_at(5).input() == Input::retrieve(ItemColor::White));
    CHECK(state_at(6).input() == Input::retrieve(ItemColor::Blue));
    for (int i = 0; i <= 6; ++i) CHECK(state_at(static_cast<std::uint64_t>(i)).bays() == Bays{});
  }

  SECTION("bay 1 is the least significant digit") {
    HbwState s = state_at(7);  // bays counter = 1
    CHECK(s.bays().at(1) == Color::Red);
    for (int n = 2; n <= bay_count; ++n) CHECK(s.bays().at(n) == Color::Empty);
    CHECK_FALSE(s.input().has_value());

    HbwState t = state_at(3 * 7);  // bays counter = 3
    CHECK(t.bays().at(1) == Color::Blue);
    HbwState u = state_at(4 * 7);  // bays counter = 4 -> carries into bay 2
    CHECK(u.bays().at(1) == Color::Empty);
    CHECK(u.bays().at(2) == Color::Red);
  }

  SECTION("the last index is all-blue with a retrieve-blue request") {
    HbwState s = state_at(state_count - 1);
    for (int n = 1; n <= bay_count; ++n) CHECK(s.bays().at(n) == Color::Blue);
    CHECK(s.input() == Input::retrieve(ItemColor::Blue));
  }

  SECTION("state_index inverts state_at across the space") {
    for (std::uint64_t i = 0; i < state_count; i += 9973) {  // prime stride
      CHECK(state_index(state_at(i)) == i);
    }
    CHECK(state_index(state_at(state_count - 1)) == state_count - 1);
    // And distinct indices give distinct states on a sample window.
    std::set<std::string> seen;
    for (std::uint64_t i = 0; i < 2000; ++i) seen.insert(to_string(state_at(i)));
    CHECK(seen.size() == 2000);
  }
}

TEST_CASE("check_safety reports violating states with their outcome", "[verify]") {
  HbwProtocol def = hbw_protocol();

  SECTION("the specification is safe on a window of the space") {
    auto report = attest::check_safety<HbwCmd, HbwAp, HbwState>(
        def, hbw_spec(), 70000, [](std::uint64_t i) { return state_at(i); }, 2);
    CHECK(report.states_checked == 70000);
    CHECK(report.safe());
    CHECK(report.violations.empty());
    CHECK(report.elapsed.count() > 0.0);
  }

  SECTION("a bare store command violates exactly the full configurations") {
    // On a window covering bays counters 0..15 (indices 0..111), the
    // only full configurations are far beyond, so all pass;
    // around the top of the space every configuration is full.
    HbwTerm mutant = HbwTerm::ext(HbwCmd::store(ItemColor::Red));
    auto report = attest::check_safety<HbwCmd, HbwAp, HbwState>(
        def, mutant, 112, [](std::uint64_t i) { return state_at(i); }, 1);
    CHECK(report.safe());

    auto top = attest::check_safety<HbwCmd, HbwAp, HbwState>(
        def, mutant, 7, [](std::uint64_t i) { return state_at(state_count - 1 - i); }, 1);
    CHECK(top.violations.size() == 7);  // all-blue block: full under every request
    CHECK(top.violations[0].index == 0);
    CHECK(top.violations[0].final_state == def.wrong);
    CHECK(top.violations[0].state == state_at(state_count - 1));
  }

  SECTION("results are independent of the worker partition") {
    HbwTerm mutant = HbwTerm::ext(HbwCmd::retrieve(ItemColor::Blue));
    auto state_fn = [](std::uint64_t i) { return state_at(i * 131); };
    auto one = attest::check_safety<HbwCmd, HbwAp, HbwState>(def, mutant, 5000, state_fn, 1);
    auto four = attest::check_safety<HbwCmd, HbwAp, HbwState>(def, mutant, 5000, state_fn, 4);
    auto many = attest::check_safety<HbwCmd, HbwAp, HbwState>(def, mutant, 5000, state_fn, 13);
    REQUIRE(one.violations.size() == four.violations.size());
    REQUIRE(one.violations.size() == many.violations.size());
    CHECK_FALSE(one.violations.empty());
    for (std::size_t i = 0; i < one.violations.size(); ++i) {
      CHECK(one.violations[i].index == four.violations[i].index);
      CHECK(one.violations[i].index == many.violations[i].index);
    }
  }

  SECTION("zero workers falls back to one; zero states is trivially safe") {
    auto report = attest::check_safety<HbwCmd, HbwAp, HbwState>(
        def, hbw_spec(), 7, [](std::uint64_t i) { return state_at(i); }, 0);
    CHECK(report.states_checked == 7);
    CHECK(report.safe());
    auto empty = attest::check_safety<HbwCmd, HbwAp, HbwState>(
        def, hbw_spec(), 0, [](std::uint64_t i) { return state_at(i); }, 8);
    CHECK(empty.states_checked == 0);
    CHECK(empty.safe());
  }
}

TEST_CASE("known unsafe states are caught by the sweep", "[verify]") {
  // A specification that answers a store request with notfull
  // unconditionally: violated exactly when the bays are full.
  HbwTerm mutant = HbwTerm::branch(HbwAp::HasStoreRequest, HbwTerm::ext(HbwCmd::not_full()),
                                   HbwTerm::skip());
  Bays full;
  for (int n = 1; n <= bay_count; ++n) full = update_bay(full, n, Color::Blue);
  std::uint64_t bad = state_index(HbwState::sigma(full, Input::store(ItemColor::Red)));
  std::uint64_t good = state_index(HbwState::sigma(Bays{}, Input::store(ItemColor::Red)));

  HbwProtocol def = hbw_protocol();
  auto states = std::vector<std::uint64_t>{good, bad};
  auto report = attest::check_safety<HbwCmd, HbwAp, HbwState>(
      def, mutant, 2, [&](std::uint64_t i) { return state_at(states[i]); }, 1);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].index == 1);
  CHECK(report.violations[0].state == state_at(bad));
}
