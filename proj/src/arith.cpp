#include <string>

#include "chr/error.hpp"
#include "chr/term.hpp"

namespace chr {

bool is_arith_functor(std::string_view f, std::size_t arity) {
  if (arity == 2)
    return f == "+" || f == "-" || f == "*" || f == "/" || f == "mod";
  if (arity == 1) return f == "-" || f == "+";
  return false;
}

namespace {

Integer as_integer(const Rational& r, const Term& context) {
  if (boost::multiprecision::denominator(r) != 1)
    throw Error(ErrorKind::UnknownFunction,
                "mod needs integer operands: " + to_string(context));
  return boost::multiprecision::numerator(r);
}

// Numbers-only arithmetic expression (evaluable as is).
bool numeric_expr(const Term& t) {
  if (t.is_number()) return true;
  if (!t.is_compound() || !is_arith_functor(t.functor(), t.arity()))
    return false;
  for (const Term& a : t.args())
    if (!numeric_expr(a)) return false;
  return true;
}

}  // namespace

Rational eval_arith(const Term& t) {
  if (t.is_number()) return t.value();
  if (t.is_var())
    throw Error(ErrorKind::NonGround,
                "arithmetic on unbound variable " + to_string(t.var()));
  if (!is_arith_functor(t.functor(), t.arity()))
    throw Error(ErrorKind::UnknownFunction,
                "unknown arithmetic function " + t.functor() + "/" +
                    std::to_string(t.arity()));
  if (t.arity() == 1) {
    Rational x = eval_arith(t.arg(0));
    return t.functor() == "-" ? Rational(-x) : x;
  }
  Rational x = eval_arith(t.arg(0));
  Rational y = eval_arith(t.arg(1));
  const std::string& f = t.functor();
  if (f == "+") return x + y;
  if (f == "-") return x - y;
  if (f == "*") return x * y;
  if (f == "/") {
    if (y == 0)
      throw Error(ErrorKind::DivisionByZero, "division by zero in " + to_string(t));
    return x / y;
  }
  // mod
  Integer a = as_integer(x, t);
  Integer b = as_integer(y, t);
  if (b == 0)
    throw Error(ErrorKind::DivisionByZero, "division by zero in " + to_string(t));
  Integer r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return Rational(r);
}

Term simplify_arith(const Term& t) {
  if (!t.is_compound() || t.arity() == 0) return t;
  if (is_arith_functor(t.functor(), t.arity()) && numeric_expr(t))
    return Term::number(eval_arith(t));
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const Term& a : t.args()) {
    Term s = simplify_arith(a);
    changed = changed || s.identity() != a.identity();
    args.push_back(std::move(s));
  }
  if (!changed) return t;
  return Term::compound(t.functor(), std::move(args));
}

bool contains_arith(const Term& t) {
  if (!t.is_compound()) return false;
  if (is_arith_functor(t.functor(), t.arity())) return true;
  for (const Term& a : t.args())
    if (contains_arith(a)) return true;
  return false;
}

}  // namespace chr
