#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "chr/error.hpp"
#include "chr/state.hpp"
#include "chr/syntax.hpp"

namespace chr {

inline constexpr std::size_t kDefaultStepLimit = 100000;

/// A rule together with the store constraints its heads matched.
struct RuleInstance {
  std::size_t rule = 0;  // position in Program::rules
  std::vector<ConstraintId> kept_ids;
  std::vector<ConstraintId> removed_ids;
  Substitution matching;

  /// Matched ids in head order (kept, then removed).
  std::vector<ConstraintId> ids() const;

  /// Same rule and same ids; the matching follows from those.
  friend bool operator==(const RuleInstance& a, const RuleInstance& b) {
    return a.rule == b.rule && a.kept_ids == b.kept_ids &&
           a.removed_ids == b.removed_ids;
  }
};

struct TraceStep {
  std::string rule;
  std::vector<ConstraintId> removed;
  std::vector<Term> added;
  std::vector<Term> tells;
};

struct Trace {
  std::vector<TraceStep> steps;
  std::size_t derivation_length() const noexcept { return steps.size(); }
};

/// `STEP <n>: <rule> removed=[ids] added=[terms] tells=[builtins]`
std::string format_step(std::size_t n, const TraceStep& step);
std::string format_trace(const Trace& trace);

/// Every instance whose heads match pairwise distinct store constraints,
/// whose guard is entailed, and (for propagation rules) whose token is not
/// in the history. Deterministic order: rule order, then ids ascending.
/// Throws Error{GuardEvaluation} when a guard cannot be evaluated.
std::vector<RuleInstance> applicable_instances(const State& s, const Program& p);

/// Instances of rule `rule` only. With `pinned`, the constraint `pinned->second`
/// must fill head position `pinned->first`. `limit` stops after that many.
std::vector<RuleInstance> rule_instances(
    const State& s, const Program& p, std::size_t rule,
    std::optional<std::pair<std::size_t, ConstraintId>> pinned = std::nullopt,
    std::size_t limit = SIZE_MAX);

/// Removes the matched H2 constraints, records the token, tells the guard
/// and executes the body left to right. Arithmetic errors are rethrown
/// with the rule name attached.
void apply_instance_in_place(State& s, const Program& p, const RuleInstance& inst,
                             TraceStep* step = nullptr);
State apply_instance(State s, const Program& p, const RuleInstance& inst,
                     TraceStep* step = nullptr);

enum class Outcome { NormalForm, Failed, StepLimit, Error };

std::string_view to_string(Outcome o);

struct RunResult {
  Outcome outcome = Outcome::NormalForm;
  State state;
  Trace trace;
  std::string message;  // error description for Outcome::Error
  std::optional<ErrorKind> error;
};

/// Called before each rule application with the state it applies to.
using StepObserver = std::function<void(const State&, const RuleInstance&)>;

/// Abstract semantics with seeded uniform choice among applicable instances.
RunResult run_abstract(State s, const Program& p, std::uint64_t seed,
                       std::size_t step_limit = kDefaultStepLimit,
                       const StepObserver& observer = {});

/// Bounded breadth-first exploration of the transition graph, states
/// deduplicated by exploration_key.
class ExhaustiveExplorer {
 public:
  ExhaustiveExplorer(State initial, const Program& p);

  bool done() const noexcept { return frontier_.empty(); }
  /// Expands one state. New normal forms are appended to normal_forms().
  void expand_one();
  void run(std::size_t bound);

  const std::vector<State>& normal_forms() const noexcept { return normal_forms_; }
  const std::vector<std::string>& errors() const noexcept { return errors_; }
  std::size_t explored() const noexcept { return explored_; }

 private:
  bool visit(const State& s);
  void add_normal_form(const State& s);

  const Program& program_;
  std::deque<State> frontier_;
  std::unordered_set<std::string> visited_;
  std::vector<State> normal_forms_;
  std::vector<std::string> errors_;
  std::size_t explored_ = 0;
};

struct ExhaustiveResult {
  std::vector<State> normal_forms;  // pairwise non-equivalent
  std::vector<std::string> errors;  // runtime errors reached on some path
  bool complete = false;            // false when the bound cut exploration
  std::size_t explored = 0;
};

ExhaustiveResult run_exhaustive(State s, const Program& p, std::size_t bound);

/// Refined (deterministic) semantics: goal constraints are activated in
/// order; an active constraint tries its occurrences in textual order
/// (rules top to bottom; within a rule removed heads, then kept heads, each
/// left to right) with partners in id order;
/// bodies run depth-first; a tell that instantiates a stored constraint
/// reactivates it.
RunResult run_refined(std::span<const Term> goal, const Program& p,
                      std::size_t step_limit = kDefaultStepLimit,
                      const StepObserver& observer = {});

/// Resumes refined execution from an arbitrary state by reactivating every
/// stored constraint in id order.
RunResult run_refined_from(State s, const Program& p,
                           std::size_t step_limit = kDefaultStepLimit,
                           const StepObserver& observer = {});

enum class Semantics { Refined, Abstract };

struct InterruptResult {
  RunResult interrupted;  // after at most `budget` steps
  RunResult resumed;      // continued from interrupted.state
};

/// Runs `budget` steps, stops, and resumes from the intermediate state.
InterruptResult interrupt_resume(std::span<const Term> goal, const Program& p,
                                 std::size_t budget, Semantics semantics,
                                 std::uint64_t seed = 0,
                                 std::size_t step_limit = kDefaultStepLimit);

/// Instantiates a rule-local variable mapping for body variables not bound
/// by the matching (fresh per application).
Substitution extend_with_fresh(State& s, const Rule& r, Substitution matching);

}  // namespace chr
