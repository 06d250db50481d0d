#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "chr/analysis.hpp"
#include "chr/builtins.hpp"

namespace chr {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

namespace {

bool is_true(const Term& t) {
  return t.is_compound() && t.arity() == 0 && t.functor() == "true";
}

bool numeric_side(const Term& t) { return t.is_number() || contains_arith(t); }

// Guards decided by instantiating their variables over the grid.
bool numeric_guard(const Term& g) {
  if (is_comparison(g)) return true;
  if (!is_builtin(g) || g.arity() != 2) return false;
  return numeric_side(g.arg(0)) || numeric_side(g.arg(1));
}

// 0, 1, -1, 2, -2, ...
std::vector<Rational> grid_values(int grid) {
  std::vector<Rational> out{Rational(0)};
  for (int k = 1; k <= grid; ++k) {
    out.emplace_back(k);
    out.emplace_back(-k);
  }
  return out;
}

std::string order_type(const std::vector<Rational>& v) {
  auto sign = [](const Rational& x) { return x < 0 ? '-' : x > 0 ? '+' : '0'; };
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += sign(v[i]);
    for (std::size_t j = i + 1; j < v.size(); ++j) s += sign(v[i] - v[j]);
  }
  return s;
}

constexpr std::size_t kPerOrderType = 3;

// Variables a rule body computes with: arguments holding arithmetic.
std::vector<Term> arith_terms(const Rule& r) {
  std::vector<Term> out;
  for (const Term& b : r.body) {
    if (is_builtin(b)) {
      if (numeric_guard(b)) out.push_back(b);
      continue;
    }
    for (std::size_t i = 0; i < b.arity(); ++i)
      if (contains_arith(b.arg(i))) out.push_back(b.arg(i));
  }
  return out;
}

}  // namespace

GuardedState minimal_state(const Rule& r) {
  GuardedState g;
  g.user = r.heads();
  for (const Term& t : r.guard)
    if (!is_true(t)) g.guard.push_back(t);
  g.numeric = arith_terms(r);
  return g;
}

std::vector<State> instantiate(const GuardedState& g, const AnalysisOptions& opt) {
  std::vector<Term> numeric, other;
  for (const Term& t : g.guard) {
    if (is_true(t)) continue;
    (numeric_guard(t) ? numeric : other).push_back(t);
  }
  std::vector<Term> marked = numeric;
  marked.insert(marked.end(), g.numeric.begin(), g.numeric.end());
  std::vector<Var> in_state = variables(g.user);
  std::vector<Var> guard_vars = variables(numeric);
  std::vector<Var> nvars;
  for (const Var& v : variables(marked))
    if (std::find(guard_vars.begin(), guard_vars.end(), v) != guard_vars.end() ||
        std::find(in_state.begin(), in_state.end(), v) != in_state.end())
      nvars.push_back(v);
  std::vector<Rational> values = grid_values(opt.grid);

  std::vector<State> out;
  std::map<std::string, std::size_t> per_type;

  auto consider = [&](const std::vector<Rational>& assignment) {
    Substitution sigma;
    for (std::size_t i = 0; i < nvars.size(); ++i)
      sigma.bind(nvars[i], Term::number(assignment[i]));
    BuiltinStore empty;
    for (const Term& t : numeric) {
      try {
        if (!empty.ask(sigma.apply(t))) return;
      } catch (const Error&) {
        return;
      }
    }
    std::size_t& seen = per_type[order_type(assignment)];
    if (seen >= kPerOrderType) return;
    std::vector<Term> user = sigma.apply(g.user);
    State s = initial_state(user);
    std::vector<Term> rest = sigma.apply(other);
    std::vector<Var> gv = variables(rest);
    s.add_globals(gv);
    try {
      for (const Term& t : rest) {
        if (s.failed()) break;
        s.tell(t);
      }
    } catch (const Error&) {
      return;
    }
    if (s.failed()) return;
    ++seen;
    out.push_back(std::move(s));
  };

  const std::size_t k = nvars.size();
  double total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= static_cast<double>(values.size());
  std::vector<Rational> a(k);
  if (total <= static_cast<double>(opt.enumerate_limit)) {
    std::vector<std::size_t> idx(k, 0);
    while (out.size() < opt.instances_per_pair) {
      for (std::size_t i = 0; i < k; ++i) a[i] = values[idx[i]];
      consider(a);
      std::size_t pos = 0;
      while (pos < k && ++idx[pos] == values.size()) idx[pos++] = 0;
      if (pos == k) break;
    }
  } else {
    std::mt19937_64 rng(opt.seed);
    for (std::size_t n = 0;
         n < opt.enumerate_limit && out.size() < opt.instances_per_pair; ++n) {
      for (std::size_t i = 0; i < k; ++i) a[i] = values[rng() % values.size()];
      consider(a);
    }
  }
  return out;
}

// --- critical pairs --------------------------------------------------------------

namespace {

Rule rename_rule(const Rule& r, const std::set<Var>& taboo) {
  std::vector<Term> all = r.heads();
  all.insert(all.end(), r.guard.begin(), r.guard.end());
  all.insert(all.end(), r.body.begin(), r.body.end());
  Renamed rn = rename_apart(all, taboo);
  Rule out = r;
  out.kept = rn.renaming.apply(r.kept);
  out.removed = rn.renaming.apply(r.removed);
  out.guard = rn.renaming.apply(r.guard);
  out.body = rn.renaming.apply(r.body);
  return out;
}

std::set<Var> rule_vars(const Rule& r) {
  std::vector<Term> all = r.heads();
  all.insert(all.end(), r.guard.begin(), r.guard.end());
  all.insert(all.end(), r.body.begin(), r.body.end());
  std::vector<Var> vs = variables(all);
  return {vs.begin(), vs.end()};
}

using Pairing = std::vector<std::pair<std::size_t, std::size_t>>;

void pairings(const std::vector<Term>& h1, const std::vector<Term>& h2, std::size_t a,
              std::vector<bool>& used, Pairing& cur, std::vector<Pairing>& out) {
  if (a == h1.size()) {
    if (!cur.empty()) out.push_back(cur);
    return;
  }
  pairings(h1, h2, a + 1, used, cur, out);
  for (std::size_t b = 0; b < h2.size(); ++b) {
    if (used[b] || h1[a].functor() != h2[b].functor() || h1[a].arity() != h2[b].arity())
      continue;
    used[b] = true;
    cur.emplace_back(a, b);
    pairings(h1, h2, a + 1, used, cur, out);
    cur.pop_back();
    used[b] = false;
  }
}

}  // namespace

std::vector<CriticalPair> critical_pairs(const Program& p) {
  std::vector<CriticalPair> out;
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    const Rule& r1 = p.rules[i];
    std::vector<Term> h1 = r1.heads();
    for (std::size_t j = i; j < p.rules.size(); ++j) {
      Rule r2 = rename_rule(p.rules[j], rule_vars(r1));
      std::vector<Term> h2 = r2.heads();
      std::vector<bool> used(h2.size(), false);
      Pairing cur;
      std::vector<Pairing> all;
      pairings(h1, h2, 0, used, cur, all);
      for (const Pairing& pr : all) {
        bool conflict = false;
        for (auto [a, b] : pr)
          if (a >= r1.kept.size() || b >= r2.kept.size()) conflict = true;
        if (!conflict) continue;
        if (i == j) {
          bool identity = pr.size() == h1.size() &&
                          std::all_of(pr.begin(), pr.end(),
                                      [](auto ab) { return ab.first == ab.second; });
          if (identity) continue;
          // The transposed pairing gives the mirrored pair.
          Pairing tr;
          for (auto [a, b] : pr) tr.emplace_back(b, a);
          std::sort(tr.begin(), tr.end());
          if (tr < pr) continue;
        }
        std::vector<Term> lhs, rhs;
        for (auto [a, b] : pr) {
          lhs.push_back(h1[a]);
          rhs.push_back(h2[b]);
        }
        std::optional<Substitution> theta = unify(lhs, rhs);
        if (!theta) continue;
        CriticalPair cp;
        cp.rule1 = i;
        cp.rule2 = j;
        cp.overlap = pr.size();
        cp.critical.user = theta->apply(h1);
        cp.ids2.assign(h2.size(), 0);
        for (auto [a, b] : pr) cp.ids2[b] = static_cast<ConstraintId>(a + 1);
        ConstraintId next = static_cast<ConstraintId>(h1.size()) + 1;
        for (std::size_t b = 0; b < h2.size(); ++b) {
          if (cp.ids2[b] != 0) continue;
          cp.ids2[b] = next++;
          cp.critical.user.push_back(theta->apply(h2[b]));
        }
        for (const Rule* r : std::array<const Rule*, 2>{&r1, &r2})
          for (const Term& g : r->guard)
            if (!is_true(g)) cp.critical.guard.push_back(theta->apply(g));
        for (const Rule* r : std::array<const Rule*, 2>{&r1, &r2})
          for (const Term& t : arith_terms(*r)) cp.critical.numeric.push_back(theta->apply(t));
        out.push_back(std::move(cp));
      }
    }
  }
  return out;
}

// --- joinability --------------------------------------------------------------------

JoinResult joinable(const State& left, const State& right, const Program& p,
                    std::size_t bound) {
  JoinResult res;
  if (bound == 0) return res;
  if (state_equiv(left, right)) {
    res.verdict = Verdict::Yes;
    return res;
  }
  RunResult ql = run_refined_from(left, p, bound);
  RunResult qr = run_refined_from(right, p, bound);
  auto final = [](const RunResult& r) {
    return r.outcome == Outcome::NormalForm || r.outcome == Outcome::Failed;
  };
  if (final(ql) && final(qr) && state_equiv(ql.state, qr.state)) {
    res.verdict = Verdict::Yes;
    return res;
  }
  ExhaustiveExplorer L(left, p), R(right, p);
  auto meet = [&] {
    for (const State& a : L.normal_forms())
      for (const State& b : R.normal_forms())
        if (state_equiv(a, b)) return true;
    return false;
  };
  while (!(L.done() && R.done()) && L.explored() < bound && R.explored() < bound) {
    if (!L.done()) L.expand_one();
    if (!R.done()) R.expand_one();
    if (meet()) {
      res.verdict = Verdict::Yes;
      return res;
    }
  }
  if (meet()) {
    res.verdict = Verdict::Yes;
    return res;
  }
  if (L.done() && R.done() && L.errors().empty() && R.errors().empty() &&
      !L.normal_forms().empty() && !R.normal_forms().empty()) {
    res.verdict = Verdict::No;
    res.left_nf = L.normal_forms().front();
    res.right_nf = R.normal_forms().front();
  }
  return res;
}

namespace {

std::optional<RuleInstance> instance_on(const State& s, const Program& p, std::size_t rule,
                                        const std::vector<ConstraintId>& ids) {
  for (RuleInstance& ri : rule_instances(s, p, rule))
    if (ri.ids() == ids) return std::move(ri);
  return std::nullopt;
}

}  // namespace

ConfluenceReport check_confluence(const Program& p, const AnalysisOptions& opt) {
  ConfluenceReport report;
  bool any_no = false, any_unknown = false;
  for (CriticalPair& cp : critical_pairs(p)) {
    PairReport pr;
    pr.pair = cp;
    pr.verdict = Verdict::Yes;
    std::vector<ConstraintId> ids1;
    for (std::size_t k = 0; k < p.rules[cp.rule1].head_count(); ++k)
      ids1.push_back(static_cast<ConstraintId>(k + 1));
    for (const State& s : instantiate(cp.critical, opt)) {
      std::optional<RuleInstance> i1, i2;
      try {
        i1 = instance_on(s, p, cp.rule1, ids1);
        i2 = instance_on(s, p, cp.rule2, cp.ids2);
      } catch (const Error& e) {
        pr.verdict = Verdict::Unknown;
        pr.note = e.what();
        continue;
      }
      if (!i1 || !i2) continue;
      ++pr.instances;
      State left, right;
      try {
        left = apply_instance(s, p, *i1);
        right = apply_instance(s, p, *i2);
      } catch (const Error& e) {
        pr.verdict = Verdict::Unknown;
        pr.note = e.what();
        pr.state = s;
        continue;
      }
      JoinResult jr = joinable(left, right, p, opt.bound);
      if (jr.verdict == Verdict::No) {
        pr.verdict = Verdict::No;
        pr.state = s;
        pr.left_nf = jr.left_nf;
        pr.right_nf = jr.right_nf;
        pr.note.clear();
        break;
      }
      if (jr.verdict == Verdict::Unknown && pr.verdict == Verdict::Yes) {
        pr.verdict = Verdict::Unknown;
        pr.state = s;
        pr.note = "bound reached";
      }
      if (opt.stop_early && pr.verdict != Verdict::Yes) break;
    }
    any_no = any_no || pr.verdict == Verdict::No;
    any_unknown = any_unknown || pr.verdict == Verdict::Unknown;
    report.pairs.push_back(std::move(pr));
    if (opt.stop_early && (any_no || any_unknown)) break;
  }
  report.confluent = any_no ? Verdict::No : any_unknown ? Verdict::Unknown : Verdict::Yes;
  return report;
}

std::string format_report(const Program& p, const ConfluenceReport& r) {
  std::ostringstream os;
  for (const PairReport& pr : r.pairs) {
    os << "CP " << p.rules[pr.pair.rule1].label() << "~" << p.rules[pr.pair.rule2].label()
       << " overlap=" << pr.pair.overlap << " → "
       << (pr.verdict == Verdict::Yes  ? "joinable"
           : pr.verdict == Verdict::No ? "NOT JOINABLE"
                                       : "unknown")
       << "\n";
    if (pr.verdict == Verdict::No && pr.state) {
      os << "  critical state: " << format_answer_inline(*pr.state) << "\n";
      if (pr.left_nf) os << "  via " << p.rules[pr.pair.rule1].label() << ": "
                         << format_answer_inline(*pr.left_nf) << "\n";
      if (pr.right_nf) os << "  via " << p.rules[pr.pair.rule2].label() << ": "
                          << format_answer_inline(*pr.right_nf) << "\n";
    } else if (pr.verdict == Verdict::Unknown && !pr.note.empty()) {
      os << "  " << pr.note << "\n";
    }
  }
  os << "CONFLUENT: " << to_string(r.confluent) << "\n";
  return os.str();
}

}  // namespace chr
