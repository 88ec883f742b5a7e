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

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <utility>

namespace attest {

/**
 * Protocol term over an alphabet of external commands EC and atomic
 * propositions AP.
 *
 * A term is one of Skip, Seq(first, second), If(prop, when_true,
 * when_false), or a bare external command. The grammar has no loops or
 * recursion, so every term is a finite tree and evaluation always
 * terminates. Values are immutable handles onto shared nodes; copying is
 * cheap and thread-safe.
 */
template <typename EC, typename AP>
class IntCom {
 public:
  enum class Kind { Skip, Seq, If, Ext };

  /// Default-constructed terms are Skip.
  IntCom() : node_(skip_node()) {}

  static IntCom skip() { return IntCom(skip_node()); }

  static IntCom ext(EC cmd) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Ext;
    n->cmd = std::move(cmd);
    return IntCom(std::move(n));
  }

  static IntCom seq(IntCom first, IntCom second) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Seq;
    n->left = std::move(first.node_);
    n->right = std::move(second.node_);
    return IntCom(std::move(n));
  }

  static IntCom branch(AP prop, IntCom when_true, IntCom when_false) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::If;
    n->prop = std::move(prop);
    n->left = std::move(when_true.node_);
    n->right = std::move(when_false.node_);
    return IntCom(std::move(n));
  }

  Kind kind() const { return node_->kind; }

  /// Seq components. Valid only when kind() == Kind::Seq.
  IntCom first() const { return IntCom(node_->left); }
  IntCom second() const { return IntCom(node_->right); }

  /// If components. Valid only when kind() == Kind::If.
  const AP& prop() const { return *node_->prop; }
  IntCom when_true() const { return IntCom(node_->left); }
  IntCom when_false() const { return IntCom(node_->right); }

  /// External command. Valid only when kind() == Kind::Ext.
  const EC& cmd() const { return *node_->cmd; }

  std::size_t node_count() const { return count_nodes(node_.get()); }

  std::size_t depth() const { return node_depth(node_.get()); }

  /// True when the term contains at least one external command, i.e. it
  /// can still emit a command in some state.
  bool contains_ext() const { return any_ext(node_.get()); }

  friend bool operator==(const IntCom& a, const IntCom& b) {
    return nodes_equal(a.node_.get(), b.node_.get());
  }
  friend bool operator!=(const IntCom& a, const IntCom& b) { return !(a == b); }

 private:
  struct Node {
    Kind kind = Kind::Skip;
    std::optional<EC> cmd;   // Ext only
    std::optional<AP> prop;  // If only
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  explicit IntCom(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static const std::shared_ptr<const Node>& skip_node() {
    static const std::shared_ptr<const Node> node = std::make_shared<Node>();
    return node;
  }

  static std::size_t count_nodes(const Node* n) {
    if (n == nullptr) return 0;
    return 1 + count_nodes(n->left.get()) + count_nodes(n->right.get());
  }

  static std::size_t node_depth(const Node* n) {
    if (n == nullptr) return 0;
    return 1 + std::max(node_depth(n->left.get()), node_depth(n->right.get()));
  }

  static bool any_ext(const Node* n) {
    if (n == nullptr) return false;
    if (n->kind == Kind::Ext) return true;
    return any_ext(n->left.get()) || any_ext(n->right.get());
  }

  static bool nodes_equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if (a == nullptr || b == nullptr) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case Kind::Skip:
        return true;
      case Kind::Ext:
        return *a->cmd == *b->cmd;
      case Kind::If:
        if (!(*a->prop == *b->prop)) return false;
        [[fallthrough]];
      case Kind::Seq:
        return nodes_equal(a->left.get(), b->left.get()) &&
               nodes_equal(a->right.get(), b->right.get());
    }
    return false;
  }

  std::shared_ptr<const Node> node_;
};

/**
 * The protocol-specific pieces an instance supplies: the absorbing
 * invalid state, the command precondition, the command transition, and
 * the labeling of states with atomic propositions.
 *
 * Instances must keep `phi` and `step` consistent: for a valid state s,
 * step(ec, s) == wrong exactly when !phi(ec, s), and step(ec, wrong) ==
 * wrong for every ec. Plain values, so several instances can coexist in
 * one process.
 */
template <typename EC, typename AP, typename S>
struct ProtocolDef {
  S wrong;
  std::function<bool(const EC&, const S&)> phi;
  std::function<S(const EC&, const S&)> step;
  std::function<bool(const AP&, const S&)> holds;
};

/// One external command against one state. The invalid state absorbs.
template <typename EC, typename AP, typename S>
S eval_ec(const ProtocolDef<EC, AP, S>& def, const EC& cmd, const S& state) {
  if (state == def.wrong) return def.wrong;
  return def.step(cmd, state);
}

/**
 * Big-step evaluation of a protocol term. Skip is the identity, If picks
 * a branch by the labeling, Seq threads the state left to right and
 * short-circuits once it is invalid, and external commands go through
 * eval_ec. Total: the term is a finite tree.
 */
template <typename EC, typename AP, typename S>
S eval_ic(const ProtocolDef<EC, AP, S>& def, const IntCom<EC, AP>& term, const S& state) {
  using Kind = typename IntCom<EC, AP>::Kind;
  if (state == def.wrong) return def.wrong;
  switch (term.kind()) {
    case Kind::Skip:
      return state;
    case Kind::Ext:
      return def.step(term.cmd(), state);
    case Kind::If:
      return def.holds(term.prop(), state) ? eval_ic(def, term.when_true(), state)
                                           : eval_ic(def, term.when_false(), state);
    case Kind::Seq: {
      S mid = eval_ic(def, term.first(), state);
      if (mid == def.wrong) return def.wrong;
      return eval_ic(def, term.second(), mid);
    }
  }
  return def.wrong;  // unreachable
}

/**
 * Result of resolving a term up to its next external command.
 *
 * `next` is the leftmost command in evaluation order, absent when the
 * term exhausts without reaching one. `continuation` is the remainder
 * still able to emit commands; absent when nothing can follow `next`.
 * `state_after` already reflects `next` having executed.
 */
template <typename EC, typename AP, typename S>
struct EvalStep {
  std::optional<EC> next;
  std::optional<IntCom<EC, AP>> continuation;
  S state_after;
};

namespace detail {

template <typename EC, typename AP, typename S>
EvalStep<EC, AP, S> resolve_to_command(const ProtocolDef<EC, AP, S>& def,
                                       const IntCom<EC, AP>& term, const S& state) {
  using Kind = typename IntCom<EC, AP>::Kind;
  switch (term.kind()) {
    case Kind::Skip:
      return {std::nullopt, std::nullopt, state};
    case Kind::Ext:
      return {term.cmd(), std::nullopt, eval_ec(def, term.cmd(), state)};
    case Kind::If:
      return resolve_to_command(
          def, def.holds(term.prop(), state) ? term.when_true() : term.when_false(), state);
    case Kind::Seq: {
      auto left = resolve_to_command(def, term.first(), state);
      if (!left.next) {
        // A command-free prefix cannot have changed the state.
        return resolve_to_command(def, term.second(), left.state_after);
      }
      auto rest = left.continuation ? IntCom<EC, AP>::seq(*left.continuation, term.second())
                                    : term.second();
      return {std::move(left.next), std::move(rest), std::move(left.state_after)};
    }
  }
  return {std::nullopt, std::nullopt, state};  // unreachable
}

}  // namespace detail

/**
 * Deterministically resolves Skip/If/Seq structure (If branches decided
 * against `state`) until the leftmost external command is reached, and
 * applies that command. Callers must pass a valid state. A remainder
 * with no external commands left is reported as no continuation.
 */
template <typename EC, typename AP, typename S>
EvalStep<EC, AP, S> eval_until_next_com(const ProtocolDef<EC, AP, S>& def,
                                        const IntCom<EC, AP>& term, const S& state) {
  auto step = detail::resolve_to_command(def, term, state);
  if (step.continuation && !step.continuation->contains_ext()) step.continuation.reset();
  return step;
}

}  // namespace attest
