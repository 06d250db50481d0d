#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "chr/term.hpp"

namespace chr {

/// =, ==, =/=, <, =<, >, >=, true and false.
bool is_builtin_symbol(std::string_view functor, std::size_t arity);
bool is_builtin(const Term& c);

/// Comparison built-ins whose truth needs ground numeric operands.
bool is_comparison(const Term& c);

/// The built-in part of a state: solved-form bindings plus the arithmetic
/// equations that cannot be evaluated yet (e.g. M = M1+M2 before M1 and M2
/// are known). Values are immutable; `tell` returns a new store.
class BuiltinStore {
 public:
  BuiltinStore() = default;

  /// Adds a built-in constraint. A false check or a failed unification
  /// yields an inconsistent store. Throws Error{NonGroundComparison} for a
  /// comparison that is not ground after applying the bindings, and
  /// propagates DivisionByZero.
  BuiltinStore tell(const Term& c) const;
  /// In-place variant; returns true if the bindings changed.
  bool tell_in_place(const Term& c);

  /// Entailment test. Non-ground comparisons are simply not entailed.
  /// Arithmetic errors propagate to the caller.
  bool ask(const Term& c) const;

  bool consistent() const noexcept { return consistent_; }
  Term normalize(const Term& t) const;
  const Substitution& bindings() const noexcept { return bindings_; }
  const std::vector<std::pair<Term, Term>>& pending() const noexcept {
    return pending_;
  }

  /// Every consistent store counts as equal only to a store with the same
  /// bindings and pending equations; inconsistent stores are all equal.
  friend bool operator==(const BuiltinStore& a, const BuiltinStore& b);

 private:
  bool unify_sides(const Term& a, const Term& b);
  bool resolve_pending();
  void fail() {
    consistent_ = false;
    bindings_ = Substitution{};
    pending_.clear();
  }

  Substitution bindings_;
  std::vector<std::pair<Term, Term>> pending_;
  bool consistent_ = true;
};

}  // namespace chr
