#include <algorithm>
#include <random>
#include <regex>
#include <sstream>

#include "chr/analysis.hpp"
#include "chr/builtins.hpp"

namespace chr {

std::string_view to_string(RankingVerdict v) {
  switch (v) {
    case RankingVerdict::Proved: return "proved";
    case RankingVerdict::Refuted: return "refuted";
    case RankingVerdict::ProbabilisticPass: return "probabilistic-pass";
  }
  return "?";
}

namespace {

std::string trim(std::string s) {
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(s[i])) ++i;
  return s.substr(i);
}

}  // namespace

RankingSpec parse_ranking(std::string_view text) {
  RankingSpec spec;
  std::istringstream in{std::string(text)};
  static const std::regex line_re(R"(rank\s+(\S+)/(\d+)\s*=\s*(.+))");
  static const std::regex arg_re(R"(\$(\d+))");
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (auto c = line.find('%'); c != std::string::npos) line.erase(c);
    line = trim(line);
    if (line.empty()) continue;
    std::smatch m;
    if (!std::regex_match(line, m, line_re))
      throw SyntaxError(lineno, 1, "expected `rank <symbol>/<arity> = <expression>`");
    Symbol sym{m[1].str(), static_cast<std::size_t>(std::stoul(m[2].str()))};
    std::string expr = std::regex_replace(m[3].str(), arg_re, "ARG_$1");
    Term t;
    try {
      t = parse_term(expr);
    } catch (const SyntaxError& e) {
      throw SyntaxError(lineno, e.column(), "in rank expression: " + std::string(e.what()));
    }
    int fresh = 0;
    std::vector<LinearConstraint> side;
    LinearExpr e;
    try {
      e = linearize(t, {}, side, fresh);
    } catch (const Error&) {
      throw SyntaxError(lineno, 1, "rank expression is not affine: " + m[3].str());
    }
    if (!side.empty())
      throw SyntaxError(lineno, 1, "rank expression is not affine: " + m[3].str());
    RankFunction rf;
    rf.coeffs.assign(sym.arity, Rational(0));
    rf.constant = e.constant;
    for (const auto& [v, c] : e.coeffs) {
      std::size_t k = 0;
      if (v.name.rfind("ARG_", 0) == 0) k = std::stoul(v.name.substr(4));
      if (k == 0 || k > sym.arity)
        throw SyntaxError(lineno, 1, "unknown argument " + to_string(v) + " for " +
                                         to_string(sym));
      rf.coeffs[k - 1] = c;
    }
    spec.ranks[sym] = std::move(rf);
  }
  return spec;
}

namespace {

const RankFunction* lookup(const RankingSpec& rk, const Term& c) {
  if (!c.is_compound() || is_builtin(c)) return nullptr;
  auto it = rk.ranks.find(Symbol{c.functor(), c.arity()});
  return it == rk.ranks.end() ? nullptr : &it->second;
}

}  // namespace

LinearExpr rank_of(const RankingSpec& rk, const std::vector<Term>& conj,
                   const std::vector<LinearConstraint>& assumptions,
                   std::vector<LinearConstraint>& side, int& fresh) {
  LinearExpr total;
  for (const Term& c : conj) {
    const RankFunction* rf = lookup(rk, c);
    if (!rf) continue;
    total.constant += rf->constant;
    for (std::size_t i = 0; i < c.arity(); ++i) {
      if (rf->coeffs[i] == 0) continue;
      std::vector<LinearConstraint> all = assumptions;
      all.insert(all.end(), side.begin(), side.end());
      LinearExpr a = linearize(c.arg(i), all, side, fresh);
      a *= rf->coeffs[i];
      total += a;
    }
  }
  return total;
}

namespace {

// Numeric rank of ground constraints; nullopt if an argument is not a number.
std::optional<Rational> ground_rank(const RankingSpec& rk, const std::vector<Term>& conj) {
  Rational total = 0;
  for (const Term& c : conj) {
    const RankFunction* rf = lookup(rk, c);
    if (!rf) continue;
    total += rf->constant;
    for (std::size_t i = 0; i < c.arity(); ++i) {
      if (rf->coeffs[i] == 0) continue;
      try {
        total += rf->coeffs[i] * eval_arith(c.arg(i));
      } catch (const Error&) {
        return std::nullopt;
      }
    }
  }
  return total;
}

bool is_bare_var_eq(const Term& g) {
  return g.is_compound() && g.arity() == 2 && g.functor() == "=" &&
         (g.arg(0).is_var() || g.arg(1).is_var());
}

struct Sampler {
  const Rule& rule;
  const RankingSpec& rk;
  std::mt19937_64 rng;

  Rational draw() {
    if (rng() % 2 == 0) return Rational(static_cast<long long>(rng() % 21) - 10);
    return Rational(static_cast<long long>(rng() % 2001) - 1000);
  }

  // A counterexample description, or nullopt if none found.
  std::optional<std::string> search(std::size_t samples, std::size_t& valid) {
    std::vector<Term> parts = rule.heads();
    parts.insert(parts.end(), rule.guard.begin(), rule.guard.end());
    std::vector<Var> vars = variables(parts);
    std::vector<Term> body_user;
    for (const Term& b : rule.body)
      if (!is_builtin(b)) body_user.push_back(b);
    std::vector<Var> derived;
    for (const Term& g : rule.guard)
      if (is_bare_var_eq(g)) {
        const Term& v = g.arg(0).is_var() ? g.arg(0) : g.arg(1);
        const Term& other = g.arg(0).is_var() ? g.arg(1) : g.arg(0);
        if (!occurs(v.var(), other)) derived.push_back(v.var());
      }
    for (std::size_t n = 0; n < samples; ++n) {
      Substitution sigma;
      for (const Var& v : vars)
        if (std::find(derived.begin(), derived.end(), v) == derived.end())
          sigma.bind(v, Term::number(draw()));
      for (std::size_t round = 0; round < derived.size(); ++round)
        for (const Term& g : rule.guard) {
          if (!is_bare_var_eq(g)) continue;
          bool left = g.arg(0).is_var() && !sigma.contains(g.arg(0).var());
          const Term& v = left ? g.arg(0) : g.arg(1);
          const Term& other = left ? g.arg(1) : g.arg(0);
          if (!v.is_var() || sigma.contains(v.var())) continue;
          try {
            Rational val = eval_arith(sigma.apply(other));
            sigma.bind(v.var(), Term::number(val));
          } catch (const Error&) {
          }
        }
      BuiltinStore store;
      bool ok = true;
      for (const Term& g : rule.guard) {
        try {
          if (!store.ask(sigma.apply(g))) ok = false;
        } catch (const Error&) {
          ok = false;
        }
        if (!ok) break;
      }
      if (!ok) continue;
      std::vector<Term> heads = sigma.apply(rule.heads());
      std::vector<Term> after = sigma.apply(rule.kept);
      for (const Term& b : sigma.apply(body_user)) after.push_back(b);
      auto hr = ground_rank(rk, heads);
      auto br = ground_rank(rk, after);
      if (!hr || !br) continue;
      ++valid;
      std::string where;
      for (const Var& v : vars) {
        if (const Term* t = sigma.find(v)) {
          if (!where.empty()) where += ", ";
          where += to_string(v) + "=" + to_string(*t);
        }
      }
      if (where.empty()) where = "ground rule";
      if (*hr <= *br)
        return "at " + where + ": rank before " + to_string(*hr) + ", after " +
               to_string(*br);
      for (const Term& c : heads) {
        auto r = ground_rank(rk, {c});
        if (r && *r < 0) return "at " + where + ": negative rank of " + to_string(c);
      }
      for (const Term& c : sigma.apply(body_user)) {
        auto r = ground_rank(rk, {c});
        if (r && *r < 0) return "at " + where + ": negative rank of " + to_string(c);
      }
    }
    return std::nullopt;
  }
};

}  // namespace

RankingReport verify_ranking(const Program& p, const RankingSpec& rk, std::size_t samples,
                             std::uint64_t seed) {
  RankingReport report;
  for (std::size_t ri = 0; ri < p.rules.size(); ++ri) {
    const Rule& r = p.rules[ri];
    RuleRanking rr;
    rr.rule = r.label();
    bool linear = true;
    bool proved = false;
    try {
      int fresh = 0;
      std::vector<LinearConstraint> assume = linearize_guard(r.guard, fresh);
      std::vector<LinearConstraint> side;
      std::vector<Term> after = r.kept;
      for (const Term& b : r.body)
        if (!is_builtin(b)) after.push_back(b);
      LinearExpr before_rank = rank_of(rk, r.heads(), assume, side, fresh);
      LinearExpr after_rank = rank_of(rk, after, assume, side, fresh);
      std::vector<LinearExpr> nonneg;
      for (const Term& c : r.heads()) nonneg.push_back(rank_of(rk, {c}, assume, side, fresh));
      for (const Term& c : after) nonneg.push_back(rank_of(rk, {c}, assume, side, fresh));
      assume.insert(assume.end(), side.begin(), side.end());
      LinearExpr decrease = before_rank;
      decrease -= after_rank;
      proved = entails(assume, {decrease, LinearConstraint::Rel::Gt});
      for (const LinearExpr& e : nonneg)
        proved = proved && entails(assume, {e, LinearConstraint::Rel::Ge});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonLinear) throw;
      linear = false;
      report.warnings.push_back("rule " + r.label() + ": " + e.what() +
                                "; falling back to sampling");
    }
    if (proved) {
      rr.verdict = RankingVerdict::Proved;
      rr.detail = "decrease entailed by the guard";
    } else {
      Sampler s{r, rk, std::mt19937_64(seed + ri)};
      std::size_t valid = 0;
      if (auto w = s.search(samples, valid)) {
        rr.verdict = RankingVerdict::Refuted;
        rr.detail = *w;
      } else {
        rr.verdict = RankingVerdict::ProbabilisticPass;
        rr.detail = std::to_string(valid) + " sampled instances decrease" +
                    (linear ? " (linear reasoning inconclusive)" : "");
      }
    }
    if (rr.verdict == RankingVerdict::Refuted)
      report.verdict = RankingVerdict::Refuted;
    else if (rr.verdict == RankingVerdict::ProbabilisticPass &&
             report.verdict == RankingVerdict::Proved)
      report.verdict = RankingVerdict::ProbabilisticPass;
    report.rules.push_back(std::move(rr));
  }
  return report;
}

std::string format_report(const RankingReport& r) {
  std::ostringstream os;
  for (const auto& w : r.warnings) os << "WARNING: " << w << "\n";
  for (const auto& rr : r.rules)
    os << "RULE " << rr.rule << ": " << to_string(rr.verdict) << " (" << rr.detail << ")\n";
  os << "RANKING: " << to_string(r.verdict) << "\n";
  return os.str();
}

}  // namespace chr
