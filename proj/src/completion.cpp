#include "chr/analysis.hpp"
#include "chr/builtins.hpp"

namespace chr {

namespace {

std::vector<Term> user_terms(const State& s) {
  std::vector<Term> out;
  for (const auto& [id, t] : s.user()) out.push_back(t);
  return out;
}

// Bindings of the globals and pending equations, as built-in constraints.
std::vector<Term> builtin_terms(const State& s) {
  std::vector<Term> out;
  if (s.failed()) return {Term::atom("false")};
  const BuiltinStore& b = s.builtin();
  for (const Var& g : s.globals()) {
    Term v = b.normalize(Term::variable(g));
    if (!(v.is_var() && v.var() == g)) out.push_back(Term::compound("=", {Term::variable(g), v}));
  }
  for (const auto& [l, r] : b.pending())
    out.push_back(Term::compound("=", {b.normalize(l), b.normalize(r)}));
  return out;
}

Rational state_rank(const RankingSpec& rk, const State& s) {
  int fresh = 0;
  std::vector<LinearConstraint> side;
  LinearExpr e = rank_of(rk, user_terms(s), {}, side, fresh);
  if (!e.is_constant() || !side.empty())
    throw Error(ErrorKind::UnorientablePair,
                "rank of " + format_answer(s) + " is not a constant");
  return e.constant;
}

}  // namespace

CompletionResult complete(const Program& p, const RankingSpec& rk,
                          std::size_t max_iterations, const AnalysisOptions& opt) {
  CompletionResult res;
  res.program = p;
  for (;;) {
    ConfluenceReport rep = check_confluence(res.program, opt);
    if (rep.confluent == Verdict::Yes) return res;
    if (res.iterations >= max_iterations)
      throw Error(ErrorKind::IterationLimit,
                  "completion gave up after " + std::to_string(res.iterations) +
                      " iterations");
    const PairReport* bad = nullptr;
    for (const PairReport& pr : rep.pairs)
      if (pr.verdict == Verdict::No && pr.left_nf && pr.right_nf) {
        bad = &pr;
        break;
      }
    if (!bad)
      throw Error(ErrorKind::IterationLimit,
                  "completion stopped: a critical pair is undecided within the bound");
    State n1 = *bad->left_nf;
    State n2 = *bad->right_nf;
    if (n1.failed() || n2.failed()) {
      if (n1.failed()) std::swap(n1, n2);
      if (n1.failed())
        throw Error(ErrorKind::UnorientablePair, "both normal forms failed");
    } else {
      Rational r1 = state_rank(rk, n1);
      Rational r2 = state_rank(rk, n2);
      if (r1 == r2)
        throw Error(ErrorKind::UnorientablePair,
                    "equal ranks for " + format_answer(n1) + "and " + format_answer(n2));
      if (r1 < r2) std::swap(n1, n2);
    }
    Rule simp;
    simp.removed = user_terms(n1);
    if (simp.removed.empty())
      throw Error(ErrorKind::UnorientablePair,
                  "the larger normal form has no user constraints to rewrite");
    std::vector<Term> guard = builtin_terms(n1);
    simp.guard = guard.empty() ? std::vector<Term>{Term::atom("true")} : guard;
    std::vector<Term> diff;
    for (const Term& b : builtin_terms(n2)) {
      bool entailed = false;
      try {
        entailed = n1.builtin().ask(b);
      } catch (const Error&) {
      }
      if (!entailed) diff.push_back(b);
    }
    simp.body = user_terms(n2);
    simp.body.insert(simp.body.end(), diff.begin(), diff.end());
    std::vector<Rule> rules = res.program.rules;
    simp.source_index = rules.size();
    rules.push_back(simp);
    res.added.push_back(to_string(simp));
    if (!diff.empty()) {
      Rule prop;
      prop.kept = simp.removed;
      prop.guard = simp.guard;
      prop.body = diff;
      prop.source_index = rules.size();
      rules.push_back(prop);
      res.added.push_back(to_string(prop));
    }
    res.program = make_program(std::move(rules));
    ++res.iterations;
  }
}

}  // namespace chr
