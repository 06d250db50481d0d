#include <algorithm>
#include <set>
#include <sstream>

#include "chr/analysis.hpp"
#include "chr/builtins.hpp"

namespace chr {

LinearExpr& LinearExpr::operator+=(const LinearExpr& o) {
  for (const auto& [v, c] : o.coeffs) {
    Rational& mine = coeffs[v];
    mine += c;
    if (mine == 0) coeffs.erase(v);
  }
  constant += o.constant;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& o) {
  LinearExpr neg = o;
  neg *= Rational(-1);
  return *this += neg;
}

LinearExpr& LinearExpr::operator*=(const Rational& k) {
  if (k == 0) {
    coeffs.clear();
    constant = 0;
    return *this;
  }
  for (auto& [v, c] : coeffs) c *= k;
  constant *= k;
  return *this;
}

std::string to_string(const LinearExpr& e) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : e.coeffs) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    Rational a = c < 0 ? Rational(-c) : c;
    if (a != 1) os << to_string(a) << "*";
    os << to_string(v);
    first = false;
  }
  if (first) return to_string(e.constant);
  if (e.constant != 0)
    os << (e.constant < 0 ? " - " : " + ")
       << to_string(e.constant < 0 ? Rational(-e.constant) : e.constant);
  return os.str();
}

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Integer floor_of(const Rational& r) { return floor_div(numerator(r), denominator(r)); }

// A `>= 0` row with integer, gcd-normalized coefficients.
struct Row {
  std::map<Var, Integer> coeffs;
  Integer constant;

  friend bool operator<(const Row& a, const Row& b) {
    if (a.constant != b.constant) return a.constant < b.constant;
    return a.coeffs < b.coeffs;
  }
};

// Scales `e` to integer coefficients; `strict` turns > into >= 1.
std::optional<Row> tighten(const LinearExpr& e, bool strict, bool& contradiction) {
  Integer den = 1;
  for (const auto& [v, c] : e.coeffs) den = boost::multiprecision::lcm(den, denominator(c));
  if (e.coeffs.empty()) {
    if (strict ? e.constant <= 0 : e.constant < 0) contradiction = true;
    return std::nullopt;
  }
  Row r;
  Integer g = 0;
  for (const auto& [v, c] : e.coeffs) {
    Integer a = numerator(Rational(c * den));
    r.coeffs.emplace(v, a);
    g = boost::multiprecision::gcd(g, a < 0 ? Integer(-a) : a);
  }
  Rational c = e.constant * Rational(den);
  // sum a x is integral: sum a x + c > 0 gives sum a x >= floor(-c) + 1,
  // sum a x + c >= 0 gives sum a x >= -floor(c).
  Integer lhs_min = strict ? Integer(floor_of(-c) + 1) : Integer(-floor_of(c));
  for (auto& [v, a] : r.coeffs) a /= g;
  Integer q = -floor_div(-lhs_min, g);  // ceil(lhs_min / g)
  r.constant = -q;
  return r;
}

Row combine(const Row& pos, const Integer& a, const Row& neg, const Integer& b) {
  // b*pos + a*neg, with pos[x] = a > 0 and neg[x] = -b < 0
  Row out;
  for (const auto& [v, c] : pos.coeffs) out.coeffs[v] += b * c;
  for (const auto& [v, c] : neg.coeffs) out.coeffs[v] += a * c;
  for (auto it = out.coeffs.begin(); it != out.coeffs.end();)
    it = it->second == 0 ? out.coeffs.erase(it) : std::next(it);
  out.constant = b * pos.constant + a * neg.constant;
  return out;
}

constexpr std::size_t kRowLimit = 20000;

}  // namespace

bool maybe_satisfiable(std::vector<LinearConstraint> cs) {
  std::set<Row> rows;
  bool contradiction = false;
  auto add = [&](const LinearExpr& e, bool strict) {
    if (auto r = tighten(e, strict, contradiction)) rows.insert(std::move(*r));
  };
  for (const auto& c : cs) {
    switch (c.rel) {
      case LinearConstraint::Rel::Ge: add(c.expr, false); break;
      case LinearConstraint::Rel::Gt: add(c.expr, true); break;
      case LinearConstraint::Rel::Eq: {
        add(c.expr, false);
        LinearExpr neg = c.expr;
        neg *= Rational(-1);
        add(neg, false);
        break;
      }
    }
  }
  while (!contradiction) {
    std::map<Var, std::pair<std::size_t, std::size_t>> counts;
    for (const Row& r : rows)
      for (const auto& [v, a] : r.coeffs) (a > 0 ? counts[v].first : counts[v].second)++;
    if (counts.empty()) break;
    Var x = counts.begin()->first;
    std::size_t best = SIZE_MAX;
    for (const auto& [v, pn] : counts) {
      std::size_t cost = pn.first * pn.second;
      if (cost < best) {
        best = cost;
        x = v;
      }
    }
    std::vector<Row> pos, neg;
    std::set<Row> rest;
    for (const Row& r : rows) {
      auto it = r.coeffs.find(x);
      if (it == r.coeffs.end())
        rest.insert(r);
      else if (it->second > 0)
        pos.push_back(r);
      else
        neg.push_back(r);
    }
    for (const Row& p : pos)
      for (const Row& n : neg) {
        Row c = combine(p, p.coeffs.at(x), n, -n.coeffs.at(x));
        LinearExpr e;
        for (const auto& [v, a] : c.coeffs) e.coeffs.emplace(v, Rational(a));
        e.constant = Rational(c.constant);
        if (auto r = tighten(e, false, contradiction)) rest.insert(std::move(*r));
        if (contradiction) return false;
        if (rest.size() > kRowLimit)
          throw Error(ErrorKind::NonLinear, "linear elimination exceeded its size limit");
      }
    rows = std::move(rest);
  }
  return !contradiction;
}

bool entails(const std::vector<LinearConstraint>& assumptions, const LinearConstraint& goal) {
  auto refute = [&](LinearExpr e, LinearConstraint::Rel rel) {
    std::vector<LinearConstraint> cs = assumptions;
    cs.push_back({std::move(e), rel});
    return !maybe_satisfiable(std::move(cs));
  };
  LinearExpr neg = goal.expr;
  neg *= Rational(-1);
  switch (goal.rel) {
    case LinearConstraint::Rel::Gt:  // not(e > 0)  is  -e >= 0
      return refute(neg, LinearConstraint::Rel::Ge);
    case LinearConstraint::Rel::Ge:  // not(e >= 0) is  -e > 0
      return refute(neg, LinearConstraint::Rel::Gt);
    case LinearConstraint::Rel::Eq:
      return refute(goal.expr, LinearConstraint::Rel::Gt) &&
             refute(neg, LinearConstraint::Rel::Gt);
  }
  return false;
}

LinearExpr linearize(const Term& t, const std::vector<LinearConstraint>& assumptions,
                     std::vector<LinearConstraint>& side, int& fresh) {
  auto nonlinear = [&] {
    return Error(ErrorKind::NonLinear, "not linear: " + to_string(t));
  };
  LinearExpr e;
  if (t.is_number()) {
    e.constant = t.value();
    return e;
  }
  if (t.is_var()) {
    e.coeffs.emplace(t.var(), Rational(1));
    return e;
  }
  if (!t.is_compound()) throw nonlinear();
  const std::string& f = t.functor();
  auto sub = [&](std::size_t i) { return linearize(t.arg(i), assumptions, side, fresh); };
  if (t.arity() == 1 && (f == "-" || f == "+")) {
    e = sub(0);
    if (f == "-") e *= Rational(-1);
    return e;
  }
  if (t.arity() != 2) throw nonlinear();
  if (f == "+" || f == "-") {
    e = sub(0);
    if (f == "+")
      e += sub(1);
    else
      e -= sub(1);
    return e;
  }
  if (f == "*") {
    LinearExpr a = sub(0), b = sub(1);
    if (a.is_constant()) {
      b *= a.constant;
      return b;
    }
    if (b.is_constant()) {
      a *= b.constant;
      return a;
    }
    throw nonlinear();
  }
  if (f == "/") {
    LinearExpr a = sub(0), b = sub(1);
    if (!b.is_constant() || b.constant == 0) throw nonlinear();
    a *= Rational(1) / b.constant;
    return a;
  }
  if (f == "mod") {
    LinearExpr a = sub(0), b = sub(1);
    std::vector<LinearConstraint> all = assumptions;
    all.insert(all.end(), side.begin(), side.end());
    if (!entails(all, {b, LinearConstraint::Rel::Gt})) throw nonlinear();
    Var m{"$mod", fresh++};
    LinearExpr mv;
    mv.coeffs.emplace(m, Rational(1));
    side.push_back({mv, LinearConstraint::Rel::Ge});
    LinearExpr upper = b;  // b - 1 - m >= 0
    upper.constant -= 1;
    upper -= mv;
    side.push_back({upper, LinearConstraint::Rel::Ge});
    if (entails(all, {a, LinearConstraint::Rel::Ge})) {
      LinearExpr below = a;  // a - m >= 0
      below -= mv;
      side.push_back({below, LinearConstraint::Rel::Ge});
    }
    return mv;
  }
  throw nonlinear();
}

std::vector<LinearConstraint> linearize_guard(const std::vector<Term>& guard, int& fresh) {
  std::vector<LinearConstraint> out;
  for (const Term& g : guard) {
    if (!is_builtin(g) || g.arity() != 2) continue;
    const std::string& f = g.functor();
    if (f == "=/=") continue;
    std::vector<LinearConstraint> side;
    if (f == "=" || f == "==") {
      try {
        LinearExpr d = linearize(g.arg(0), out, side, fresh);
        d -= linearize(g.arg(1), out, side, fresh);
        out.insert(out.end(), side.begin(), side.end());
        out.push_back({d, LinearConstraint::Rel::Eq});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonLinear) throw;
        // Dropping an equation only weakens the assumptions.
      }
      continue;
    }
    LinearExpr l = linearize(g.arg(0), out, side, fresh);
    LinearExpr r = linearize(g.arg(1), out, side, fresh);
    out.insert(out.end(), side.begin(), side.end());
    if (f == ">" || f == ">=") {
      l -= r;
      out.push_back({l, f == ">" ? LinearConstraint::Rel::Gt : LinearConstraint::Rel::Ge});
    } else {
      r -= l;
      out.push_back({r, f == "<" ? LinearConstraint::Rel::Gt : LinearConstraint::Rel::Ge});
    }
  }
  return out;
}

}  // namespace chr
