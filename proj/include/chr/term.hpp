#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace chr {

/// Exact arithmetic everywhere: integers are rationals with denominator 1.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

/// A logic variable. Renaming only ever changes `index`; parsed variables
/// have index 0.
struct Var {
  std::string name;
  int index = 0;

  friend auto operator<=>(const Var&, const Var&) = default;
  friend bool operator==(const Var&, const Var&) = default;
};

std::string to_string(const Var& v);

/// Immutable first-order term with shared structure. Copying is cheap.
class Term {
 public:
  enum class Kind : unsigned char { Variable, Number, Compound };

  /// The atom `true`.
  Term();

  static Term variable(const Var& v);
  static Term variable(std::string name, int index = 0);
  static Term number(Rational value);
  static Term integer(long long value);
  static Term compound(std::string functor, std::vector<Term> args);
  static Term atom(std::string name);

  Kind kind() const noexcept;
  bool is_var() const noexcept { return kind() == Kind::Variable; }
  bool is_number() const noexcept { return kind() == Kind::Number; }
  bool is_compound() const noexcept { return kind() == Kind::Compound; }
  bool is_atom() const noexcept { return is_compound() && arity() == 0; }
  bool is_integer() const;

  const Var& var() const;
  const Rational& value() const;
  const std::string& functor() const;
  std::span<const Term> args() const noexcept;
  const Term& arg(std::size_t i) const { return args()[i]; }
  std::size_t arity() const noexcept { return args().size(); }
  bool has_symbol(std::string_view functor, std::size_t arity) const;

  bool is_ground() const noexcept;
  std::size_t hash() const noexcept;

  /// Identity of the underlying node; equal ids imply equal terms.
  const void* identity() const noexcept { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node;
  static const std::shared_ptr<const Node>& true_node();
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Standard order of terms: variables < numbers < compounds; compounds by
/// arity, then functor, then arguments left to right.
int compare(const Term& a, const Term& b);

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

std::string to_string(const Term& t);
std::string to_string(std::span<const Term> conj, std::string_view sep = ", ");
std::ostream& operator<<(std::ostream& os, const Term& t);

/// Variables of `t` appended to `out` in first-occurrence order, without
/// duplicates.
void collect_vars(const Term& t, std::vector<Var>& out);
std::vector<Var> variables(std::span<const Term> ts);
bool occurs(const Var& v, const Term& t);

/// A finite map from variables to terms. `apply` is a single simultaneous
/// pass, so one-way matchers (whose ranges may mention pattern variables)
/// apply correctly. Unifiers and built-in stores keep their substitutions
/// idempotent, where one pass is already the fixpoint.
class Substitution {
 public:
  using Map = std::map<Var, Term>;

  Substitution() = default;

  /// Binds `v`; binding a variable to itself is a no-op.
  void bind(const Var& v, const Term& t);
  /// Like bind, but records X->X as well. Only matchers use this: an
  /// identity entry marks a pattern variable as already fixed.
  void assign(const Var& v, const Term& t) { map_.insert_or_assign(v, t); }
  const Term* find(const Var& v) const;
  bool contains(const Var& v) const { return map_.count(v) != 0; }
  std::size_t size() const noexcept { return map_.size(); }
  bool empty() const noexcept { return map_.empty(); }
  Map::const_iterator begin() const { return map_.begin(); }
  Map::const_iterator end() const { return map_.end(); }

  Term apply(const Term& t) const;
  std::vector<Term> apply(std::span<const Term> ts) const;

  /// Applies `theta` to every range term, then adds theta's bindings for
  /// variables not already bound. For idempotent inputs with
  /// dom(theta) disjoint from dom(*this) the result is idempotent.
  void compose(const Substitution& theta);

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  Map map_;
};

std::string to_string(const Substitution& s);

/// One-way matching of a conjunction. Only pattern variables are bound;
/// variables in `subject` are treated as constants.
std::optional<Substitution> match(std::span<const Term> pattern,
                                  std::span<const Term> subject);
std::optional<Substitution> match(const Term& pattern, const Term& subject);

/// Extends `sigma` so that sigma(pattern) == subject. On failure `sigma` may
/// hold partial bindings; callers backtrack by copying.
bool match_into(const Term& pattern, const Term& subject, Substitution& sigma);

/// Most general unifier with occurs-check; the result is idempotent.
std::optional<Substitution> unify(const Term& a, const Term& b);
std::optional<Substitution> unify(std::span<const Term> as,
                                  std::span<const Term> bs);

/// Extends idempotent `sigma` with an mgu of sigma(a) and sigma(b), keeping
/// it idempotent. Returns false (leaving `sigma` unspecified) on failure.
bool unify_into(const Term& a, const Term& b, Substitution& sigma);

Term apply(const Substitution& s, const Term& t);

struct Renamed {
  std::vector<Term> terms;
  Substitution renaming;  // variable-to-variable, bijective
};

/// Renames every variable of `ts` to a variant outside `taboo`. Fresh
/// variables keep their name and receive an index above any index seen.
Renamed rename_apart(std::span<const Term> ts, const std::set<Var>& taboo);

// --- arithmetic ---------------------------------------------------------

bool is_arith_functor(std::string_view functor, std::size_t arity);

/// Evaluates a ground expression over numbers, +, -, *, /, mod and unary
/// minus. `/` is exact rational division; `mod` requires integers and takes
/// the sign of the divisor.
/// Throws Error{DivisionByZero | NonGround | UnknownFunction}.
Rational eval_arith(const Term& t);

/// Replaces every subterm that is an arithmetic expression over numbers
/// only by its value. Other structure (variables, atoms under `*`, ...) is
/// left untouched. May throw DivisionByZero.
Term simplify_arith(const Term& t);

/// True when `t` contains an arithmetic functor application.
bool contains_arith(const Term& t);

std::string to_string(const Rational& r);

}  // namespace chr
