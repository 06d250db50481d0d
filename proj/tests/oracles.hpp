#pragma once
// Independent reference implementations used only by the tests. None of
// them calls into the library's algorithms beyond constructing terms.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "chr/term.hpp"

namespace oracle {

using chr::Rational;
using chr::Term;
using chr::Var;

// --- unification by triangular bindings and walking -----------------------------

using Bindings = std::map<Var, Term>;

inline Term walk(const Term& t, const Bindings& b) {
  Term cur = t;
  while (cur.is_var()) {
    auto it = b.find(cur.var());
    if (it == b.end()) break;
    cur = it->second;
  }
  return cur;
}

inline bool occurs(const Var& v, const Term& t, const Bindings& b) {
  Term w = walk(t, b);
  if (w.is_var()) return w.var() == v;
  if (!w.is_compound()) return false;
  for (const Term& a : w.args())
    if (occurs(v, a, b)) return true;
  return false;
}

inline bool unify(const Term& x, const Term& y, Bindings& b) {
  Term a = walk(x, b), c = walk(y, b);
  if (a.is_var() && c.is_var() && a.var() == c.var()) return true;
  if (a.is_var()) {
    if (occurs(a.var(), c, b)) return false;
    b.emplace(a.var(), c);
    return true;
  }
  if (c.is_var()) return unify(c, a, b);
  if (a.is_number() || c.is_number())
    return a.is_number() && c.is_number() && a.value() == c.value();
  if (a.functor() != c.functor() || a.arity() != c.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!unify(a.arg(i), c.arg(i), b)) return false;
  return true;
}

inline Term resolve(const Term& t, const Bindings& b) {
  Term w = walk(t, b);
  if (!w.is_compound() || w.arity() == 0) return w;
  std::vector<Term> args;
  for (const Term& a : w.args()) args.push_back(resolve(a, b));
  return Term::compound(w.functor(), std::move(args));
}

/// Text of `t` with variables numbered by first occurrence.
inline std::string canonical(const Term& t) {
  std::map<Var, int> names;
  std::string out;
  auto go = [&](auto&& self, const Term& u) -> void {
    if (u.is_var()) {
      auto [it, fresh] = names.emplace(u.var(), static_cast<int>(names.size()));
      out += "_" + std::to_string(it->second);
    } else if (u.is_number()) {
      out += chr::to_string(u.value());
    } else {
      out += u.functor() + "(";
      for (const Term& a : u.args()) {
        self(self, a);
        out += ",";
      }
      out += ")";
    }
  };
  go(go, t);
  return out;
}

// --- number theory -----------------------------------------------------------------

inline long long euclid(long long a, long long b) {
  while (b != 0) {
    long long r = a % b;
    a = b;
    b = r;
  }
  return a < 0 ? -a : a;
}

inline bool is_prime(long long n) {
  if (n < 2) return false;
  for (long long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<long long> primes_upto(long long n) {
  std::vector<long long> out;
  for (long long k = 2; k <= n; ++k)
    if (is_prime(k)) out.push_back(k);
  return out;
}

/// a(0) = a(1) = 1, a(n) = a(n-1) + a(n-2).
inline long long fib(int n) {
  long long a = 1, b = 1;
  for (int i = 2; i <= n; ++i) {
    long long c = a + b;
    a = b;
    b = c;
  }
  return n == 0 ? 1 : b;
}

/// Newton steps r := (r + x/r)/2 while r*r/x - 1 > eps.
inline Rational newton_sqrt(const Rational& x, Rational r, const Rational& eps) {
  while (r * r / x - 1 > eps) r = (r + x / r) / 2;
  return r;
}

template <typename T>
std::vector<T> sorted(std::vector<T> v) {
  // insertion sort, deliberately not std::sort
  for (std::size_t i = 1; i < v.size(); ++i)
    for (std::size_t j = i; j > 0 && v[j] < v[j - 1]; --j) std::swap(v[j], v[j - 1]);
  return v;
}

// --- graphs ------------------------------------------------------------------------

struct Arc {
  std::string from, to;
  long long weight;
};

/// All-pairs shortest distances over nonempty paths.
inline std::map<std::pair<std::string, std::string>, long long> floyd_warshall(
    const std::vector<Arc>& arcs) {
  std::set<std::string> nodes;
  for (const Arc& a : arcs) {
    nodes.insert(a.from);
    nodes.insert(a.to);
  }
  const long long inf = std::numeric_limits<long long>::max() / 4;
  std::map<std::pair<std::string, std::string>, long long> d;
  for (const auto& x : nodes)
    for (const auto& y : nodes) d[{x, y}] = inf;
  for (const Arc& a : arcs) d[{a.from, a.to}] = std::min(d[{a.from, a.to}], a.weight);
  for (const auto& k : nodes)
    for (const auto& i : nodes)
      for (const auto& j : nodes)
        if (d[{i, k}] < inf && d[{k, j}] < inf)
          d[{i, j}] = std::min(d[{i, j}], d[{i, k}] + d[{k, j}]);
  std::map<std::pair<std::string, std::string>, long long> out;
  for (const auto& [k, v] : d)
    if (v < inf) out[k] = v;
  return out;
}

// --- grammars ------------------------------------------------------------------------

struct Grammar {
  std::vector<std::tuple<std::string, std::string, std::string>> binary;  // A -> B C
  std::vector<std::pair<std::string, std::string>> lexical;               // A -> token
};

/// Does `a` derive tokens[i, j)? Plain recursive enumeration of derivations.
inline bool derives(const Grammar& g, const std::vector<std::string>& tokens,
                    const std::string& a, std::size_t i, std::size_t j) {
  if (j == i + 1)
    for (const auto& [lhs, tok] : g.lexical)
      if (lhs == a && tok == tokens[i]) return true;
  for (const auto& [lhs, b, c] : g.binary) {
    if (lhs != a) continue;
    for (std::size_t k = i + 1; k < j; ++k)
      if (derives(g, tokens, b, i, k) && derives(g, tokens, c, k, j)) return true;
  }
  return false;
}

/// Every (i, j, A) with A deriving tokens[i, j).
inline std::set<std::tuple<std::size_t, std::size_t, std::string>> all_parses(
    const Grammar& g, const std::vector<std::string>& tokens) {
  std::set<std::string> nts;
  for (const auto& [a, b, c] : g.binary) nts.insert(a);
  for (const auto& [a, t] : g.lexical) nts.insert(a);
  std::set<std::tuple<std::size_t, std::size_t, std::string>> out;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    for (std::size_t j = i + 1; j <= tokens.size(); ++j)
      for (const auto& a : nts)
        if (derives(g, tokens, a, i, j)) out.emplace(i, j, a);
  return out;
}

}  // namespace oracle
