#include "chr/builtins.hpp"

#include "chr/error.hpp"

namespace chr {

bool is_builtin_symbol(std::string_view f, std::size_t arity) {
  if (arity == 0) return f == "true" || f == "false";
  if (arity != 2) return false;
  return f == "=" || f == "==" || f == "=/=" || f == "<" || f == "=<" ||
         f == ">" || f == ">=";
}

bool is_builtin(const Term& c) {
  return c.is_compound() && is_builtin_symbol(c.functor(), c.arity());
}

bool is_comparison(const Term& c) {
  if (!c.is_compound() || c.arity() != 2) return false;
  const std::string& f = c.functor();
  return f == "<" || f == "=<" || f == ">" || f == ">=";
}

namespace {

bool compare_values(const std::string& op, const Rational& x, const Rational& y) {
  if (op == "<") return x < y;
  if (op == "=<") return x <= y;
  if (op == ">") return x > y;
  return x >= y;
}

// An arithmetic expression that still has variables in it.
bool open_arith(const Term& t) { return !t.is_ground() && contains_arith(t); }

}  // namespace

Term BuiltinStore::normalize(const Term& t) const { return bindings_.apply(t); }

bool BuiltinStore::unify_sides(const Term& a, const Term& b) {
  if (!unify_into(a, b, bindings_)) {
    fail();
    return false;
  }
  return true;
}

// Moves pending equations whose arithmetic became evaluable into the
// bindings. Returns true if anything changed.
bool BuiltinStore::resolve_pending() {
  bool any = false;
  bool progress = true;
  while (progress && consistent_) {
    progress = false;
    for (std::size_t i = 0; i < pending_.size(); ++i) {
      Term a = simplify_arith(normalize(pending_[i].first));
      Term b = simplify_arith(normalize(pending_[i].second));
      if (open_arith(a) || open_arith(b)) {
        pending_[i] = {a, b};
        continue;
      }
      pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(i));
      if (!unify_sides(a, b)) return true;
      progress = true;
      any = true;
      break;
    }
  }
  return any;
}

bool BuiltinStore::tell_in_place(const Term& c) {
  if (!consistent_) return false;
  if (!is_builtin(c))
    throw Error(ErrorKind::Runtime, "not a built-in constraint: " + to_string(c));
  const std::string& f = c.functor();
  if (c.arity() == 0) {
    if (f == "false") fail();
    return false;
  }
  Term a = normalize(c.arg(0));
  Term b = normalize(c.arg(1));
  if (f == "=") {
    a = simplify_arith(a);
    b = simplify_arith(b);
    if (open_arith(a) || open_arith(b)) {
      pending_.emplace_back(a, b);
      return false;
    }
    std::size_t before = bindings_.size();
    if (!unify_sides(a, b)) return true;
    if (bindings_.size() == before) return false;
    resolve_pending();
    return true;
  }
  if (f == "==") {
    if (a == b) return false;
    if (a.is_ground() && b.is_ground()) {
      fail();
      return true;
    }
    throw Error(ErrorKind::NonGroundComparison,
                "cannot decide " + to_string(c) + " on unbound variables");
  }
  if (f == "=/=") {
    if (a == b) {
      fail();
      return true;
    }
    if (a.is_ground() && b.is_ground()) return false;
    throw Error(ErrorKind::NonGroundComparison,
                "cannot decide " + to_string(c) + " on unbound variables");
  }
  if (!a.is_ground() || !b.is_ground())
    throw Error(ErrorKind::NonGroundComparison,
                "comparison on unbound variables: " +
                    to_string(Term::compound(f, {a, b})));
  if (!compare_values(f, eval_arith(a), eval_arith(b))) {
    fail();
    return true;
  }
  return false;
}

BuiltinStore BuiltinStore::tell(const Term& c) const {
  BuiltinStore s = *this;
  s.tell_in_place(c);
  return s;
}

bool BuiltinStore::ask(const Term& c) const {
  if (!consistent_) return true;
  if (!is_builtin(c)) return false;
  const std::string& f = c.functor();
  if (c.arity() == 0) return f == "true";
  Term a = normalize(c.arg(0));
  Term b = normalize(c.arg(1));
  if (f == "=") return simplify_arith(a) == simplify_arith(b);
  if (f == "==") return a == b;
  if (f == "=/=") return a.is_ground() && b.is_ground() && !(a == b);
  if (!a.is_ground() || !b.is_ground()) return false;
  return compare_values(f, eval_arith(a), eval_arith(b));
}

bool operator==(const BuiltinStore& a, const BuiltinStore& b) {
  if (!a.consistent_ || !b.consistent_) return a.consistent_ == b.consistent_;
  return a.bindings_ == b.bindings_ && a.pending_ == b.pending_;
}

}  // namespace chr
