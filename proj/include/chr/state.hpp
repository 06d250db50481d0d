#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "chr/builtins.hpp"
#include "chr/term.hpp"

namespace chr {

using ConstraintId = std::int64_t;

struct IdConstraint {
  ConstraintId id = 0;
  Term term;
};

/// Propagation-history entry: rule position plus the store ids matched by
/// its heads, in head order.
struct Token {
  std::size_t rule = 0;
  std::vector<ConstraintId> ids;

  friend auto operator<=>(const Token&, const Token&) = default;
  friend bool operator==(const Token&, const Token&) = default;
};

/// An execution state: identified user constraints, the built-in store,
/// the propagation history and the goal (global) variables. User
/// constraints are kept normalized with respect to the built-in bindings.
class State {
 public:
  State() = default;

  const std::map<ConstraintId, Term>& user() const noexcept { return user_; }
  const BuiltinStore& builtin() const noexcept { return builtin_; }
  const std::set<Token>& history() const noexcept { return history_; }
  const std::set<Var>& globals() const noexcept { return globals_; }
  bool failed() const noexcept { return !builtin_.consistent(); }
  ConstraintId next_id() const noexcept { return next_id_; }
  std::vector<IdConstraint> constraints() const;
  const Term* find(ConstraintId id) const;
  bool alive(ConstraintId id) const { return user_.count(id) != 0; }

  /// Adds a user constraint (normalized, ground arithmetic evaluated) under
  /// a fresh id.
  ConstraintId add_user(const Term& t);
  void remove(ConstraintId id);
  /// Tells a built-in. Ids of stored constraints whose terms changed are
  /// appended to `woken` (in id order).
  void tell(const Term& c, std::vector<ConstraintId>* woken = nullptr);

  void record(Token t) { history_.insert(std::move(t)); }
  bool recorded(const Token& t) const { return history_.count(t) != 0; }

  void add_globals(std::span<const Var> vs);
  /// Fresh variable not occurring anywhere in this state so far.
  Term fresh_var(const std::string& name);

 private:
  void note_vars(const Term& t);

  std::map<ConstraintId, Term> user_;
  BuiltinStore builtin_;
  std::set<Token> history_;
  std::set<Var> globals_;
  ConstraintId next_id_ = 1;
  int next_var_index_ = 1;
};

/// User constraints receive ids 1.. in goal order; built-ins are told in
/// order; the goal's variables become the globals.
State initial_state(std::span<const Term> goal);

/// Adds a goal to an existing state. Globals are extended with the goal's
/// variables.
State add_constraints(State s, std::span<const Term> goal);

/// Logical equivalence of states: user multisets equal up to a renaming of
/// local variables, built-ins projected onto the globals. Failed states are
/// all equivalent. Propagation history is not compared.
bool state_equiv(const State& a, const State& b);

/// A hash-friendly key that agrees on equivalent states (equal keys are
/// necessary, not sufficient, for equivalence).
std::string equiv_key(const State& s);

/// Serialization used to deduplicate explored states: locals are named by
/// first occurrence after sorting, and propagation tokens over live
/// constraints are included. Equal keys imply equivalent states with the
/// same pending propagations; ties in the sort may leave equivalent states
/// with different keys.
std::string exploration_key(const State& s);

/// Canonical dump: user constraints sorted by (symbol, arity, id) as
/// `term #id`, then `Var = Term` lines for global variables and pending
/// arithmetic equations.
std::string format_state(const State& s);

/// CLP-style answer: bindings of the goal variables, then the remaining
/// user constraints (sorted by symbol, arity, id), one per line. A failed
/// state prints `false`.
std::string format_answer(const State& s);

/// format_answer on one line, items separated by ", "; `true` when empty.
std::string format_answer_inline(const State& s);

}  // namespace chr
