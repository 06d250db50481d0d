#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chr/engine.hpp"
#include "chr/state.hpp"
#include "chr/syntax.hpp"

namespace chr {

// --- linear integer arithmetic -------------------------------------------------

/// sum(coeffs[v] * v) + constant
struct LinearExpr {
  std::map<Var, Rational> coeffs;
  Rational constant = 0;

  bool is_constant() const noexcept { return coeffs.empty(); }
  LinearExpr& operator+=(const LinearExpr& o);
  LinearExpr& operator-=(const LinearExpr& o);
  LinearExpr& operator*=(const Rational& k);
  friend bool operator==(const LinearExpr&, const LinearExpr&) = default;
};

std::string to_string(const LinearExpr& e);

/// `expr rel 0`
struct LinearConstraint {
  enum class Rel { Ge, Gt, Eq };
  LinearExpr expr;
  Rel rel = Rel::Ge;
};

/// Integer satisfiability by Fourier-Motzkin elimination with integer
/// tightening after every step. `false` is a proof of unsatisfiability over
/// the integers; `true` means no contradiction was derived. Throws
/// Error{NonLinear} past an internal size limit.
bool maybe_satisfiable(std::vector<LinearConstraint> cs);

/// Does the conjunction `assumptions` entail `goal` over the integers?
bool entails(const std::vector<LinearConstraint>& assumptions, const LinearConstraint& goal);

/// Translates arithmetic into linear form. `A mod B` becomes a fresh
/// variable m with 0 =< m =< B-1 (appended to `side`), provided
/// `assumptions` entail B > 0. Throws Error{NonLinear} otherwise.
LinearExpr linearize(const Term& t, const std::vector<LinearConstraint>& assumptions,
                     std::vector<LinearConstraint>& side, int& fresh);

/// Comparisons and arithmetic equations as linear constraints (a `==`/`=/=`
/// or non-arithmetic equation yields nothing). Throws Error{NonLinear}.
std::vector<LinearConstraint> linearize_guard(const std::vector<Term>& guard, int& fresh);

// --- options -----------------------------------------------------------------------

struct AnalysisOptions {
  std::size_t bound = 1000;  // exhaustive states per joinability/equivalence side
  int grid = 10;             // numeric guard variables range over -grid..grid
  std::size_t instances_per_pair = 200;
  std::size_t enumerate_limit = 20000;  // larger grids are sampled
  std::uint64_t seed = 0;
  std::size_t step_limit = kDefaultStepLimit;
  /// Confluence checks return at the first pair not known joinable; the
  /// report then lists only the pairs examined so far.
  bool stop_early = false;
};

// --- minimal and critical states ---------------------------------------------------

/// A conjunction of user constraints under a symbolic built-in condition.
struct GuardedState {
  std::vector<Term> user;
  std::vector<Term> guard;
  /// Terms whose variables the rules use in arithmetic; also taken from the grid.
  std::vector<Term> numeric;
};

/// H1 and H2 with ids 1.. in head order, guard kept symbolic.
GuardedState minimal_state(const Rule& r);

/// Ground instances of the numeric part of the guard taken from the grid
/// (one per order type of the assigned values, plus a few more), with the
/// remaining guard told. Instances where the guard fails are dropped.
/// Variables of the state become its globals.
std::vector<State> instantiate(const GuardedState& g, const AnalysisOptions& opt);

struct CriticalPair {
  std::size_t rule1 = 0;
  std::size_t rule2 = 0;
  std::size_t overlap = 0;  // number of equated head constraints
  GuardedState critical;
  /// Heads of rule1 occupy ids 1..n1; head k of rule2 sits at `ids2[k]`.
  std::vector<ConstraintId> ids2;
};

/// All overlaps of pairs of rules (including a rule with itself, renamed
/// apart) on unifiable head constraints, at least one of which is removed
/// by one of the two rules.
std::vector<CriticalPair> critical_pairs(const Program& p);

enum class Verdict { Yes, No, Unknown };

std::string_view to_string(Verdict v);

struct JoinResult {
  Verdict verdict = Verdict::Unknown;  // Yes = joinable
  std::optional<State> left_nf;        // witnesses when not joinable
  std::optional<State> right_nf;
};

/// Joinable iff some normal form reachable from `left` is equivalent to one
/// reachable from `right`. `No` needs both explorations to be complete.
JoinResult joinable(const State& left, const State& right, const Program& p,
                    std::size_t bound);

struct PairReport {
  CriticalPair pair;
  Verdict verdict = Verdict::Unknown;
  std::size_t instances = 0;  // ground critical states checked
  std::optional<State> state;  // witness critical state
  std::optional<State> left_nf;
  std::optional<State> right_nf;
  std::string note;
};

struct ConfluenceReport {
  Verdict confluent = Verdict::Unknown;
  std::vector<PairReport> pairs;
};

ConfluenceReport check_confluence(const Program& p, const AnalysisOptions& opt = {});

/// `CP <r1>~<r2> overlap=<k> → ...` lines, witnesses, and the verdict line.
std::string format_report(const Program& p, const ConfluenceReport& r);

// --- rankings ---------------------------------------------------------------------

/// Per-symbol affine rank over the integer arguments.
struct RankFunction {
  std::vector<Rational> coeffs;  // one per argument
  Rational constant = 0;
};

struct RankingSpec {
  std::map<Symbol, RankFunction> ranks;  // unlisted symbols and built-ins rank 0
};

/// Lines `rank <symbol>/<arity> = <affine expression over $1..$n>`; `%`
/// starts a comment.
RankingSpec parse_ranking(std::string_view text);

/// Affine rank of a conjunction; built-ins contribute 0.
LinearExpr rank_of(const RankingSpec& rk, const std::vector<Term>& conj,
                   const std::vector<LinearConstraint>& assumptions,
                   std::vector<LinearConstraint>& side, int& fresh);

enum class RankingVerdict { Proved, Refuted, ProbabilisticPass };

std::string_view to_string(RankingVerdict v);

struct RuleRanking {
  std::string rule;
  RankingVerdict verdict = RankingVerdict::Proved;
  std::string detail;  // witness or reason
};

struct RankingReport {
  RankingVerdict verdict = RankingVerdict::Proved;
  std::vector<RuleRanking> rules;
  std::vector<std::string> warnings;
};

/// Each rule must satisfy, under its guard, rank(H1 & H2) > rank(H1 & B)
/// with every head and body constraint ranked >= 0. Affine rules are
/// decided by linear reasoning; a refutation is confirmed with a sampled
/// ground instance. Non-linear rules are sampled.
RankingReport verify_ranking(const Program& p, const RankingSpec& rk,
                             std::size_t samples = 1000, std::uint64_t seed = 0);

std::string format_report(const RankingReport& r);

// --- completion --------------------------------------------------------------------

struct CompletionResult {
  Program program;
  std::size_t iterations = 0;
  std::vector<std::string> added;  // printed rules in the order added
};

/// Adds oriented rules for non-joinable critical pairs until the program is
/// confluent. Throws Error{UnorientablePair} for equal ranks and
/// Error{IterationLimit} when `max_iterations` runs out or a pair stays
/// undecided.
CompletionResult complete(const Program& p, const RankingSpec& rk,
                          std::size_t max_iterations = 25,
                          const AnalysisOptions& opt = {});

// --- operational equivalence --------------------------------------------------------

struct EquivalenceReport {
  Verdict equivalent = Verdict::Unknown;
  std::string reason;                 // refusal or witness description
  std::optional<State> witness;       // minimal-state instance
  std::optional<State> nf1, nf2;      // its normal forms under p1 / p2
};

/// Runs every instantiated minimal state of both programs' rules in both
/// programs. Refuses (Unknown) unless both programs are confluent.
EquivalenceReport check_operational_equivalence(const Program& p1, const Program& p2,
                                                const AnalysisOptions& opt = {});

/// Rules r with p and p without r operationally equivalent (one at a time).
/// nullopt when p itself is not known to be confluent.
std::optional<std::vector<std::size_t>> find_redundant_rules(const Program& p,
                                              const AnalysisOptions& opt = {});

/// p with rule `index` removed.
Program without_rule(const Program& p, std::size_t index);

// --- complexity ---------------------------------------------------------------------

struct ComplexityReport {
  std::size_t heads = 0;                // h
  std::optional<std::size_t> measured;  // D from a refined run
  std::string bound;                    // O(D^h), O(D) for h = 1
  std::optional<Integer> numeric;       // D^h when D was measured
};

ComplexityReport complexity_bound(const Program& p,
                                  std::optional<std::size_t> derivation_length = {});

std::string format_report(const ComplexityReport& r);

}  // namespace chr
