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

#include <catch2/catch_amalgamated.hpp>

#include "attest/protocol.hpp"

namespace {

// A deliberately tiny protocol instance, independent of the warehouse,
// so the generic machinery is exercised on its own terms. States are
// plain ints, -1 is the invalid state.
enum class ToyCmd { Inc, Dec, Hello };
enum class ToyAp { Positive, Even };

using ToyTerm = attest::IntCom<ToyCmd, ToyAp>;
using ToyDef = attest::ProtocolDef<ToyCmd, ToyAp, int>;

bool toy_phi(ToyCmd cmd, int s) {
  if (s < 0) return false;
  return cmd != ToyCmd::Dec || s > 0;
}

ToyDef toy_protocol() {
  ToyDef def;
  def.wrong = -1;
  def.phi = [](const ToyCmd& c, const int& s) { return toy_phi(c, s); };
  def.step = [](const ToyCmd& c, const int& s) {
    if (!toy_phi(c, s)) return -1;
    switch (c) {
      case ToyCmd::Inc: return s + 1;
      case ToyCmd::Dec: return s - 1;
      case ToyCmd::Hello: return s;
    }
    return -1;
  };
  def.holds = [](const ToyAp& p, const int& s) {
    return p == ToyAp::Positive ? s > 0 : s % 2 == 0;
  };
  return def;
}

}  // namespace

TEST_CASE("terms report their structure", "[protocol]") {
  ToyTerm skip;  // default-constructed
  CHECK(skip.kind() == ToyTerm::Kind::Skip);
  CHECK(ToyTerm::skip().kind() == ToyTerm::Kind::Skip);

  ToyTerm inc = ToyTerm::ext(ToyCmd::Inc);
  REQUIRE(inc.kind() == ToyTerm::Kind::Ext);
  CHECK(inc.cmd() == ToyCmd::Inc);

  ToyTerm seq = ToyTerm::seq(inc, ToyTerm::ext(ToyCmd::Dec));
  REQUIRE(seq.kind() == ToyTerm::Kind::Seq);
  CHECK(seq.first() == inc);
  CHECK(seq.second().cmd() == ToyCmd::Dec);

  ToyTerm branch = ToyTerm::branch(ToyAp::Positive, seq, ToyTerm::skip());
  REQUIRE(branch.kind() == ToyTerm::Kind::If);
  CHECK(branch.prop() == ToyAp::Positive);
  CHECK(branch.when_true() == seq);
  CHECK(branch.when_false().kind() == ToyTerm::Kind::Skip);

  CHECK(skip.node_count() == 1);
  CHECK(inc.node_count() == 1);
  CHECK(seq.node_count() == 3);
  CHECK(branch.node_count() == 5);

  CHECK(skip.depth() == 1);
  CHECK(seq.depth() == 2);
  CHECK(branch.depth() == 3);

  CHECK_FALSE(skip.contains_ext());
  CHECK(inc.contains_ext());
  CHECK(branch.contains_ext());
  CHECK_FALSE(ToyTerm::seq(ToyTerm::skip(), ToyTerm::skip()).contains_ext());
}

TEST_CASE("term equality is structural", "[protocol]") {
  auto make = [] {
    return ToyTerm::branch(ToyAp::Even, ToyTerm::seq(ToyTerm::ext(ToyCmd::Inc), ToyTerm::skip()),
                           ToyTerm::ext(ToyCmd::Dec));
  };
  CHECK(make() == make());
  CHECK(ToyTerm::skip() == ToyTerm());
  CHECK(ToyTerm::ext(ToyCmd::Inc) == ToyTerm::ext(ToyCmd::Inc));
  CHECK(ToyTerm::ext(ToyCmd::Inc) != ToyTerm::ext(ToyCmd::Dec));
  CHECK(ToyTerm::ext(ToyCmd::Inc) != ToyTerm::skip());
  CHECK(make() != ToyTerm::branch(ToyAp::Positive,
                                  ToyTerm::seq(ToyTerm::ext(ToyCmd::Inc), ToyTerm::skip()),
                                  ToyTerm::ext(ToyCmd::Dec)));
  CHECK(ToyTerm::seq(ToyTerm::skip(), ToyTerm::ext(ToyCmd::Inc)) !=
        ToyTerm::seq(ToyTerm::ext(ToyCmd::Inc), ToyTerm::skip()));
}

TEST_CASE("eval_ec applies one command and absorbs the invalid state", "[protocol]") {
  ToyDef def = toy_protocol();
  CHECK(attest::eval_ec(def, ToyCmd::Inc, 3) == 4);
  CHECK(attest::eval_ec(def, ToyCmd::Dec, 3) == 2);
  CHECK(attest::eval_ec(def, ToyCmd::Hello, 3) == 3);
  CHECK(attest::eval_ec(def, ToyCmd::Dec, 0) == def.wrong);   // precondition fails
  CHECK(attest::eval_ec(def, ToyCmd::Inc, def.wrong) == def.wrong);
  CHECK(attest::eval_ec(def, ToyCmd::Hello, def.wrong) == def.wrong);
}

TEST_CASE("eval_ic implements the big-step semantics", "[protocol]") {
  ToyDef def = toy_protocol();
  ToyTerm inc = ToyTerm::ext(ToyCmd::Inc);
  ToyTerm dec = ToyTerm::ext(ToyCmd::Dec);

  SECTION("skip is the identity") {
    CHECK(attest::eval_ic(def, ToyTerm::skip(), 7) == 7);
  }
  SECTION("seq threads the state left to right") {
    CHECK(attest::eval_ic(def, ToyTerm::seq(inc, inc), 0) == 2);
    CHECK(attest::eval_ic(def, ToyTerm::seq(inc, dec), 0) == 0);
  }
  SECTION("seq short-circuits once the state is invalid") {
    ToyTerm bad_then_inc = ToyTerm::seq(dec, inc);
    CHECK(attest::eval_ic(def, bad_then_inc, 0) == def.wrong);
  }
  SECTION("if picks the branch by the labeling") {
    ToyTerm t = ToyTerm::branch(ToyAp::Positive, inc, dec);
    CHECK(attest::eval_ic(def, t, 5) == 6);   // positive: increment
    CHECK(attest::eval_ic(def, t, 0) == def.wrong);  // else-branch Dec fails at 0
    ToyTerm u = ToyTerm::branch(ToyAp::Even, inc, ToyTerm::skip());
    CHECK(attest::eval_ic(def, u, 2) == 3);
    CHECK(attest::eval_ic(def, u, 3) == 3);
  }
  SECTION("the invalid state absorbs every term") {
    CHECK(attest::eval_ic(def, ToyTerm::skip(), def.wrong) == def.wrong);
    CHECK(attest::eval_ic(def, ToyTerm::seq(inc, inc), def.wrong) == def.wrong);
    CHECK(attest::eval_ic(def, ToyTerm::branch(ToyAp::Even, inc, dec), def.wrong) == def.wrong);
  }
}

TEST_CASE("eval_until_next_com resolves to the leftmost command", "[protocol]") {
  ToyDef def = toy_protocol();
  ToyTerm inc = ToyTerm::ext(ToyCmd::Inc);
  ToyTerm dec = ToyTerm::ext(ToyCmd::Dec);
  ToyTerm hello = ToyTerm::ext(ToyCmd::Hello);

  SECTION("a command-free term exhausts immediately") {
    auto step = attest::eval_until_next_com(def, ToyTerm::skip(), 4);
    CHECK_FALSE(step.next.has_value());
    CHECK_FALSE(step.continuation.has_value());
    CHECK(step.state_after == 4);

    step = attest::eval_until_next_com(def, ToyTerm::seq(ToyTerm::skip(), ToyTerm::skip()), 4);
    CHECK_FALSE(step.next.has_value());
    CHECK(step.state_after == 4);
  }

  SECTION("a bare command has no continuation") {
    auto step = attest::eval_until_next_com(def, inc, 4);
    REQUIRE(step.next.has_value());
    CHECK(*step.next == ToyCmd::Inc);
    CHECK_FALSE(step.continuation.has_value());
    CHECK(step.state_after == 5);
  }

  SECTION("seq yields the head and keeps the tail") {
    auto step = attest::eval_until_next_com(def, ToyTerm::seq(inc, dec), 4);
    REQUIRE(step.next.has_value());
    CHECK(*step.next == ToyCmd::Inc);
    REQUIRE(step.continuation.has_value());
    CHECK(*step.continuation == dec);
    CHECK(step.state_after == 5);
  }

  SECTION("nested seqs flatten into the continuation in order") {
    ToyTerm t = ToyTerm::seq(ToyTerm::seq(inc, dec), hello);
    auto step = attest::eval_until_next_com(def, t, 4);
    REQUIRE(step.next.has_value());
    CHECK(*step.next == ToyCmd::Inc);
    REQUIRE(step.continuation.has_value());
    CHECK(*step.continuation == ToyTerm::seq(dec, hello));
  }

  SECTION("if branches are resolved against the current state") {
    ToyTerm t = ToyTerm::branch(ToyAp::Positive, inc, dec);
    auto pos = attest::eval_until_next_com(def, t, 2);
    REQUIRE(pos.next.has_value());
    CHECK(*pos.next == ToyCmd::Inc);
    auto zero = attest::eval_until_next_com(def, t, 0);
    REQUIRE(zero.next.has_value());
    CHECK(*zero.next == ToyCmd::Dec);
    CHECK(zero.state_after == def.wrong);  // Dec at 0 violates the precondition
  }

  SECTION("a command-free prefix does not hide the commands after it") {
    ToyTerm t = ToyTerm::seq(ToyTerm::branch(ToyAp::Even, ToyTerm::skip(), ToyTerm::skip()), inc);
    auto step = attest::eval_until_next_com(def, t, 4);
    REQUIRE(step.next.has_value());
    CHECK(*step.next == ToyCmd::Inc);
    CHECK(step.state_after == 5);
  }

  SECTION("command-free remainders are reported as exhausted") {
    ToyTerm t = ToyTerm::seq(inc, ToyTerm::skip());
    auto step = attest::eval_until_next_com(def, t, 4);
    REQUIRE(step.next.has_value());
    CHECK_FALSE(step.continuation.has_value());

    ToyTerm u = ToyTerm::seq(inc, ToyTerm::seq(ToyTerm::skip(), ToyTerm::skip()));
    step = attest::eval_until_next_com(def, u, 4);
    REQUIRE(step.next.has_value());
    CHECK_FALSE(step.continuation.has_value());
  }
}

TEST_CASE("chained eval_until_next_com agrees with eval_ic", "[protocol]") {
  ToyDef def = toy_protocol();
  ToyTerm inc = ToyTerm::ext(ToyCmd::Inc);
  ToyTerm dec = ToyTerm::ext(ToyCmd::Dec);
  ToyTerm hello = ToyTerm::ext(ToyCmd::Hello);

  std::vector<ToyTerm> terms = {
      ToyTerm::skip(),
      inc,
      ToyTerm::seq(inc, ToyTerm::seq(dec, hello)),
      ToyTerm::seq(ToyTerm::seq(inc, inc), dec),
      ToyTerm::branch(ToyAp::Positive, ToyTerm::seq(dec, dec), inc),
      ToyTerm::branch(ToyAp::Even, ToyTerm::seq(inc, ToyTerm::skip()),
                      ToyTerm::seq(ToyTerm::skip(), dec)),
      ToyTerm::seq(ToyTerm::branch(ToyAp::Positive, dec, ToyTerm::skip()), inc),
  };

  for (const ToyTerm& term : terms) {
    for (int s0 : {0, 1, 2, 3, 10}) {
      int chained = s0;
      ToyTerm rest = term;
      while (true) {
        auto step = attest::eval_until_next_com(def, rest, chained);
        chained = step.state_after;
        if (!step.next || chained == def.wrong || !step.continuation) break;
        rest = *step.continuation;
      }
      // A halt on wrong may leave unexecuted commands; eval_ic would
      // also be absorbed, so the final states still agree.
      INFO("term of " << term.node_count() << " nodes from state " << s0);
      CHECK(chained == attest::eval_ic(def, term, s0));
    }
  }
}
