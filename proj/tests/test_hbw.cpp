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

#include <map>
#include <set>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "attest/hbw.hpp"

using namespace attest::hbw;

namespace {

Bays bays_of(const char* text) {
  auto parsed = parse_bays(text);
  REQUIRE(parsed.has_value());
  return *parsed;
}

// Kind census of a term, over the public accessors only.
struct KindCounts {
  int skip = 0, seq = 0, iff = 0, ext = 0;
};

void count_kinds(const HbwTerm& t, KindCounts& out) {
  switch (t.kind()) {
    case HbwTerm::Kind::Skip:
      ++out.skip;
      return;
    case HbwTerm::Kind::Ext:
      ++out.ext;
      return;
    case HbwTerm::Kind::Seq:
      ++out.seq;
      count_kinds(t.first(), out);
      count_kinds(t.second(), out);
      return;
    case HbwTerm::Kind::If:
      ++out.iff;
      count_kinds(t.when_true(), out);
      count_kinds(t.when_false(), out);
      return;
  }
}

}  // namespace

TEST_CASE("colors convert and print consistently", "[hbw]") {
  CHECK(to_color(ItemColor::Red) == Color::Red);
  CHECK(to_color(ItemColor::White) == Color::White);
  CHECK(to_color(ItemColor::Blue) == Color::Blue);
  CHECK_FALSE(to_item_color(Color::Empty).has_value());
  for (ItemColor c : all_item_colors) {
    CHECK(to_item_color(to_color(c)) == c);
    CHECK(parse_item_color(to_string(c)) == c);
  }
  CHECK(parse_color("empty") == Color::Empty);
  CHECK(parse_color("red") == Color::Red);
  CHECK_FALSE(parse_color("RED").has_value());  // parse is exact; files lowercase first
  CHECK_FALSE(parse_color("green").has_value());
  CHECK_FALSE(parse_item_color("empty").has_value());
}

TEST_CASE("bays are addressed 1..9 and updated functionally", "[hbw]") {
  Bays bays;
  for (int n = 1; n <= bay_count; ++n) CHECK(bays.at(n) == Color::Empty);

  Bays updated = update_bay(bays, 3, Color::Red);
  CHECK(bays.at(3) == Color::Empty);  // original untouched
  CHECK(updated.at(3) == Color::Red);
  CHECK(updated.at(2) == Color::Empty);

  CHECK(find_color(Color::Red, updated) == 3);
  CHECK(find_color(Color::Empty, updated) == 1);
  CHECK_FALSE(find_color(Color::Blue, updated).has_value());

  SECTION("find_color respects the start bay and returns the minimum") {
    Bays two = update_bay(updated, 7, Color::Red);
    CHECK(find_color(Color::Red, two) == 3);
    CHECK(find_color(Color::Red, 4, two) == 7);
    CHECK(find_color(Color::Red, 8, two) == std::nullopt);
    CHECK(find_color(Color::Red, 0, two) == 3);  // clamps below 1
  }
}

TEST_CASE("bays parse and print as nine colors", "[hbw]") {
  const char* text = "white blue empty white red red empty empty empty";
  Bays bays = bays_of(text);
  CHECK(bays.at(1) == Color::White);
  CHECK(bays.at(2) == Color::Blue);
  CHECK(bays.at(3) == Color::Empty);
  CHECK(bays.at(5) == Color::Red);
  CHECK(to_string(bays) == text);
  CHECK(parse_bays(to_string(bays)) == bays);

  CHECK_FALSE(parse_bays("red red red").has_value());
  CHECK_FALSE(parse_bays("red red red red red red red red red red").has_value());
  CHECK_FALSE(parse_bays("red red red red green red red red red").has_value());
  CHECK(parse_bays("  red red red red red red red red   red ").has_value());
}

TEST_CASE("states carry bays plus an optional request", "[hbw]") {
  HbwState empty;
  CHECK_FALSE(empty.is_wrong());
  CHECK_FALSE(empty.input().has_value());
  CHECK(empty.bays() == Bays{});

  HbwState wrong = HbwState::wrong();
  CHECK(wrong.is_wrong());
  CHECK(wrong == HbwState::wrong());
  CHECK(wrong != empty);

  Bays bays = bays_of("red empty empty empty empty empty empty empty empty");
  HbwState s = HbwState::sigma(bays, Input::store(ItemColor::Blue));
  CHECK(s.bays() == bays);
  CHECK(s.input() == Input::store(ItemColor::Blue));
  CHECK(s != HbwState::sigma(bays, Input::retrieve(ItemColor::Blue)));
  CHECK(s.with_input(std::nullopt) == HbwState::sigma(bays, std::nullopt));
  CHECK(s.with_input(Input::retrieve(ItemColor::Red)) ==
        HbwState::sigma(bays, Input::retrieve(ItemColor::Red)));

  CHECK(to_string(s) == "red empty empty empty empty empty empty empty empty input store blue");
  CHECK(to_string(s.with_input(std::nullopt)) ==
        "red empty empty empty empty empty empty empty empty input none");
  CHECK(to_string(HbwState::wrong()) == "wrong");
}

TEST_CASE("commands compare by operation, color only where it matters", "[hbw]") {
  CHECK(HbwCmd::is_full() == HbwCmd{HbwCmd::Op::IsFull, ItemColor::Blue});
  CHECK(HbwCmd::not_full() == HbwCmd{HbwCmd::Op::NotFull, ItemColor::White});
  CHECK(HbwCmd::store(ItemColor::Red) != HbwCmd::store(ItemColor::Blue));
  CHECK(HbwCmd::retrieve(ItemColor::Red) != HbwCmd::store(ItemColor::Red));
  CHECK_FALSE(HbwCmd::is_full().carries_color());
  CHECK(HbwCmd::store(ItemColor::Red).carries_color());

  auto cmds = all_commands();
  REQUIRE(cmds.size() == 10);
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    for (std::size_t j = i + 1; j < cmds.size(); ++j) {
      INFO(to_string(cmds[i]) << " vs " << to_string(cmds[j]));
      CHECK(cmds[i] != cmds[j]);
    }
  }

  CHECK(to_string(HbwCmd::is_full()) == "isfull");
  CHECK(to_string(HbwCmd::not_full()) == "notfull");
  CHECK(to_string(HbwCmd::has_color()) == "hascolor");
  CHECK(to_string(HbwCmd::no_color()) == "nocolor");
  CHECK(to_string(HbwCmd::store(ItemColor::Red)) == "store red");
  CHECK(to_string(HbwCmd::retrieve(ItemColor::Blue)) == "retrieve blue");
}

TEST_CASE("the command precondition separates responses from actuators", "[hbw]") {
  Bays some = bays_of("white blue empty white red red empty empty empty");
  Bays full = bays_of("white blue white white red red red blue blue");

  SECTION("responses constrain the pending request") {
    HbwState store_req = HbwState::sigma(some, Input::store(ItemColor::Red));
    HbwState full_store = HbwState::sigma(full, Input::store(ItemColor::Red));
    CHECK(hbw_phi(HbwCmd::not_full(), store_req));
    CHECK_FALSE(hbw_phi(HbwCmd::is_full(), store_req));
    CHECK(hbw_phi(HbwCmd::is_full(), full_store));
    CHECK_FALSE(hbw_phi(HbwCmd::not_full(), full_store));

    HbwState ret_red = HbwState::sigma(some, Input::retrieve(ItemColor::Red));
    CHECK(hbw_phi(HbwCmd::has_color(), ret_red));
    CHECK_FALSE(hbw_phi(HbwCmd::no_color(), ret_red));

    Bays no_red = bays_of("white blue empty white blue blue empty empty empty");
    HbwState ret_missing = HbwState::sigma(no_red, Input::retrieve(ItemColor::Red));
    CHECK(hbw_phi(HbwCmd::no_color(), ret_missing));
    CHECK_FALSE(hbw_phi(HbwCmd::has_color(), ret_missing));

    // Wrong request family, or no request at all: no response is valid.
    CHECK_FALSE(hbw_phi(HbwCmd::not_full(), ret_red));
    CHECK_FALSE(hbw_phi(HbwCmd::has_color(), store_req));
    CHECK_FALSE(hbw_phi(HbwCmd::not_full(), HbwState::sigma(some, std::nullopt)));
    CHECK_FALSE(hbw_phi(HbwCmd::has_color(), HbwState::sigma(some, std::nullopt)));
  }

  SECTION("actuator commands only need the bays to support them") {
    HbwState idle = HbwState::sigma(some, std::nullopt);
    CHECK(hbw_phi(HbwCmd::store(ItemColor::Blue), idle));
    CHECK(hbw_phi(HbwCmd::retrieve(ItemColor::Red), idle));
    CHECK_FALSE(hbw_phi(HbwCmd::store(ItemColor::Red), HbwState::sigma(full, std::nullopt)));
    Bays no_red = bays_of("white blue empty white blue blue empty empty empty");
    CHECK_FALSE(hbw_phi(HbwCmd::retrieve(ItemColor::Red), HbwState::sigma(no_red, std::nullopt)));
    // A store request does not restrict which actuator command is valid.
    CHECK(hbw_phi(HbwCmd::retrieve(ItemColor::Red),
                  HbwState::sigma(some, Input::store(ItemColor::Blue))));
  }

  SECTION("nothing is valid in the invalid state") {
    for (const HbwCmd& cmd : all_commands()) {
      CHECK_FALSE(hbw_phi(cmd, HbwState::wrong()));
    }
  }
}

TEST_CASE("transitions move one item through the lowest eligible bay", "[hbw]") {
  Bays some = bays_of("white blue empty white red red empty empty empty");
  HbwState store_req = HbwState::sigma(some, Input::store(ItemColor::Red));

  SECTION("responses leave the state untouched") {
    CHECK(hbw_step(HbwCmd::not_full(), store_req) == store_req);
    HbwState ret = HbwState::sigma(some, Input::retrieve(ItemColor::Red));
    CHECK(hbw_step(HbwCmd::has_color(), ret) == ret);
  }

  SECTION("store fills the first empty bay and keeps the request") {
    HbwState after = hbw_step(HbwCmd::store(ItemColor::Red), store_req);
    REQUIRE_FALSE(after.is_wrong());
    CHECK(to_string(after.bays()) == "white blue red white red red empty empty empty");
    CHECK(after.input() == store_req.input());
  }

  SECTION("retrieve empties the first bay holding the color") {
    HbwState s = HbwState::sigma(some, std::nullopt);
    HbwState after = hbw_step(HbwCmd::retrieve(ItemColor::Red), s);
    REQUIRE_FALSE(after.is_wrong());
    CHECK(to_string(after.bays()) == "white blue empty white empty red empty empty empty");
  }

  SECTION("precondition violations and the invalid state map to wrong") {
    Bays full = bays_of("white blue white white red red red blue blue");
    CHECK(hbw_step(HbwCmd::store(ItemColor::Red), HbwState::sigma(full, std::nullopt)).is_wrong());
    CHECK(hbw_step(HbwCmd::is_full(), store_req).is_wrong());
    CHECK(hbw_step(HbwCmd::not_full(), HbwState::wrong()).is_wrong());
  }
}

TEST_CASE("the labeling reads requests and bay contents", "[hbw]") {
  Bays some = bays_of("white blue empty white red red empty empty empty");
  Bays full = bays_of("white blue white white red red red blue blue");

  CHECK(hbw_holds(HbwAp::BaysFull, HbwState::sigma(full, std::nullopt)));
  CHECK_FALSE(hbw_holds(HbwAp::BaysFull, HbwState::sigma(some, std::nullopt)));

  HbwState store_red = HbwState::sigma(some, Input::store(ItemColor::Red));
  HbwState ret_red = HbwState::sigma(some, Input::retrieve(ItemColor::Red));
  HbwState idle = HbwState::sigma(some, std::nullopt);

  CHECK(hbw_holds(HbwAp::HasStoreRequest, store_red));
  CHECK_FALSE(hbw_holds(HbwAp::HasStoreRequest, ret_red));
  CHECK_FALSE(hbw_holds(HbwAp::HasStoreRequest, idle));
  CHECK(hbw_holds(HbwAp::HasRetrieveRequest, ret_red));
  CHECK_FALSE(hbw_holds(HbwAp::HasRetrieveRequest, idle));

  // Request color is independent of the request kind.
  CHECK(hbw_holds(HbwAp::RequestRed, store_red));
  CHECK(hbw_holds(HbwAp::RequestRed, ret_red));
  CHECK_FALSE(hbw_holds(HbwAp::RequestRed, idle));
  CHECK_FALSE(hbw_holds(HbwAp::RequestBlue, store_red));
  CHECK(hbw_holds(HbwAp::RequestBlue, HbwState::sigma(some, Input::store(ItemColor::Blue))));

  CHECK(hbw_holds(HbwAp::ContainsRed, idle));
  CHECK(hbw_holds(HbwAp::ContainsWhite, idle));
  CHECK(hbw_holds(HbwAp::ContainsBlue, idle));
  Bays no_red = bays_of("white blue empty white blue blue empty empty empty");
  CHECK_FALSE(hbw_holds(HbwAp::ContainsRed, HbwState::sigma(no_red, std::nullopt)));
}

TEST_CASE("the specification term has the expected shape", "[hbw]") {
  HbwTerm spec = hbw_spec();
  CHECK(spec.node_count() == 33);
  REQUIRE(spec.kind() == HbwTerm::Kind::If);
  CHECK(spec.prop() == HbwAp::HasStoreRequest);

  KindCounts counts;
  count_kinds(spec, counts);
  CHECK(counts.iff == 12);
  CHECK(counts.seq == 4);
  CHECK(counts.ext == 14);
  CHECK(counts.skip == 3);

  // Construction is deterministic.
  CHECK(hbw_spec() == hbw_spec());
}

TEST_CASE("one specification pass serves exactly one request", "[hbw]") {
  HbwProtocol def = hbw_protocol();
  HbwTerm spec = hbw_spec();
  Bays some = bays_of("white blue empty white red red empty empty empty");
  Bays full = bays_of("white blue white white red red red blue blue");

  SECTION("store request with space stores the requested color") {
    HbwState s = HbwState::sigma(some, Input::store(ItemColor::Blue));
    HbwState out = attest::eval_ic(def, spec, s);
    REQUIRE_FALSE(out.is_wrong());
    CHECK(to_string(out.bays()) == "white blue blue white red red empty empty empty");
  }
  SECTION("store request against full bays leaves them unchanged") {
    HbwState s = HbwState::sigma(full, Input::store(ItemColor::Red));
    CHECK(attest::eval_ic(def, spec, s) == s);
  }
  SECTION("retrieve request removes the first matching item") {
    HbwState s = HbwState::sigma(some, Input::retrieve(ItemColor::White));
    HbwState out = attest::eval_ic(def, spec, s);
    REQUIRE_FALSE(out.is_wrong());
    CHECK(to_string(out.bays()) == "empty blue empty white red red empty empty empty");
  }
  SECTION("retrieve request for an absent color changes nothing") {
    Bays no_red = bays_of("white blue empty white blue blue empty empty empty");
    HbwState s = HbwState::sigma(no_red, Input::retrieve(ItemColor::Red));
    CHECK(attest::eval_ic(def, spec, s) == s);
  }
  SECTION("no pending request, no effect") {
    HbwState s = HbwState::sigma(some, std::nullopt);
    CHECK(attest::eval_ic(def, spec, s) == s);
  }
}
