#include "chr/term.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <utility>

#include "chr/error.hpp"

namespace chr {

struct Term::Node {
  Kind kind = Kind::Compound;
  Var var;
  Rational num;
  std::string functor;
  std::vector<Term> args;
  bool ground = true;
  std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_rational(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const Integer& n = numerator(r);
  const Integer& d = denominator(r);
  std::size_t h = n.sign() < 0 ? 7 : 3;
  Integer an = n < 0 ? Integer(-n) : n;
  h = mix(h, static_cast<std::size_t>(
                 static_cast<unsigned long long>(an & 0xffffffffffffULL)));
  h = mix(h, static_cast<std::size_t>(
                 static_cast<unsigned long long>(d & 0xffffffffffffULL)));
  return h;
}

}  // namespace

const std::shared_ptr<const Term::Node>& Term::true_node() {
  static const std::shared_ptr<const Node> node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Compound;
    n->functor = "true";
    n->hash = mix(std::hash<std::string>{}("true"), 0);
    return std::shared_ptr<const Node>(std::move(n));
  }();
  return node;
}

Term::Term() : node_(true_node()) {}

Term Term::variable(const Var& v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->var = v;
  n->ground = false;
  n->hash = mix(mix(1, std::hash<std::string>{}(v.name)),
                static_cast<std::size_t>(v.index));
  return Term(std::move(n));
}

Term Term::variable(std::string name, int index) {
  return variable(Var{std::move(name), index});
}

Term Term::number(Rational value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->hash = mix(2, hash_rational(value));
  n->num = std::move(value);
  return Term(std::move(n));
}

Term Term::integer(long long value) { return number(Rational(value)); }

Term Term::compound(std::string functor, std::vector<Term> args) {
  if (args.empty() && functor == "true") return Term();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Compound;
  std::size_t h = mix(std::hash<std::string>{}(functor), args.size());
  bool ground = true;
  for (const Term& a : args) {
    h = mix(h, a.hash());
    ground = ground && a.is_ground();
  }
  n->functor = std::move(functor);
  n->args = std::move(args);
  n->ground = ground;
  n->hash = h;
  return Term(std::move(n));
}

Term Term::atom(std::string name) { return compound(std::move(name), {}); }

Term::Kind Term::kind() const noexcept { return node_->kind; }

bool Term::is_integer() const {
  return is_number() &&
         boost::multiprecision::denominator(node_->num) == 1;
}

const Var& Term::var() const { return node_->var; }
const Rational& Term::value() const { return node_->num; }
const std::string& Term::functor() const { return node_->functor; }

std::span<const Term> Term::args() const noexcept {
  return std::span<const Term>(node_->args);
}

bool Term::has_symbol(std::string_view functor, std::size_t arity) const {
  return is_compound() && node_->args.size() == arity &&
         node_->functor == functor;
}

bool Term::is_ground() const noexcept { return node_->ground; }
std::size_t Term::hash() const noexcept { return node_->hash; }

int compare(const Term& a, const Term& b) {
  if (a.identity() == b.identity()) return 0;
  if (a.kind() != b.kind())
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case Term::Kind::Variable: {
      const Var& x = a.var();
      const Var& y = b.var();
      if (x.name != y.name) return x.name < y.name ? -1 : 1;
      if (x.index != y.index) return x.index < y.index ? -1 : 1;
      return 0;
    }
    case Term::Kind::Number:
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    case Term::Kind::Compound: {
      if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
      if (a.functor() != b.functor()) return a.functor() < b.functor() ? -1 : 1;
      for (std::size_t i = 0; i < a.arity(); ++i) {
        int c = compare(a.arg(i), b.arg(i));
        if (c != 0) return c;
      }
      return 0;
    }
  }
  return 0;
}

bool operator==(const Term& a, const Term& b) {
  if (a.identity() == b.identity()) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  int c = compare(a, b);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

// --- printing -----------------------------------------------------------

namespace {

enum class Assoc { xfx, xfy, yfx };

struct InfixOp {
  int prec;
  Assoc assoc;
};

std::optional<InfixOp> infix_op(const std::string& f) {
  if (f == "->") return InfixOp{1050, Assoc::xfy};
  if (f == "=" || f == "==" || f == "=/=" || f == "<" || f == "=<" ||
      f == ">" || f == ">=")
    return InfixOp{700, Assoc::xfx};
  if (f == "+" || f == "-") return InfixOp{500, Assoc::yfx};
  if (f == "*" || f == "/" || f == "mod") return InfixOp{400, Assoc::yfx};
  return std::nullopt;
}

void print(std::ostream& os, const Term& t, int max_prec, bool operand) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      os << to_string(t.var());
      return;
    case Term::Kind::Number: {
      const Rational& r = t.value();
      bool needs_parens =
          operand && (r < 0 || boost::multiprecision::denominator(r) != 1);
      if (needs_parens) os << '(';
      os << to_string(r);
      if (needs_parens) os << ')';
      return;
    }
    case Term::Kind::Compound:
      break;
  }
  const std::string& f = t.functor();
  if (t.arity() == 2) {
    if (auto op = infix_op(f)) {
      bool parens = op->prec > max_prec;
      if (parens) os << '(';
      int left = op->assoc == Assoc::yfx ? op->prec : op->prec - 1;
      int right = op->assoc == Assoc::xfy ? op->prec : op->prec - 1;
      print(os, t.arg(0), left, true);
      if (f == "mod")
        os << " mod ";
      else
        os << f;
      print(os, t.arg(1), right, true);
      if (parens) os << ')';
      return;
    }
  }
  if (t.arity() == 1 && (f == "-" || f == "+")) {
    bool parens = 200 > max_prec;
    if (parens) os << '(';
    os << f;
    const Term& x = t.arg(0);
    bool inner = (x.is_number() && x.value() < 0) ||
                 (x.is_compound() && x.arity() == 1 &&
                  (x.functor() == "-" || x.functor() == "+"));
    if (inner) os << '(';
    print(os, x, inner ? 1200 : 200, !inner);
    if (inner) os << ')';
    if (parens) os << ')';
    return;
  }
  os << f;
  if (t.arity() == 0) return;
  os << '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) os << ',';
    print(os, t.arg(i), 999, false);
  }
  os << ')';
}

}  // namespace

std::string to_string(const Var& v) {
  if (v.index == 0) return v.name;
  return v.name + "_" + std::to_string(v.index);
}

std::string to_string(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

std::string to_string(const Term& t) {
  std::ostringstream os;
  print(os, t, 1200, false);
  return os.str();
}

std::string to_string(std::span<const Term> conj, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < conj.size(); ++i) {
    if (i) out += sep;
    out += to_string(conj[i]);
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  print(os, t, 1200, false);
  return os;
}

// --- variables ------------------------------------------------------------

void collect_vars(const Term& t, std::vector<Var>& out) {
  if (t.is_ground()) return;
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.var()) == out.end())
      out.push_back(t.var());
    return;
  }
  for (const Term& a : t.args()) collect_vars(a, out);
}

std::vector<Var> variables(std::span<const Term> ts) {
  std::vector<Var> out;
  for (const Term& t : ts) collect_vars(t, out);
  return out;
}

bool occurs(const Var& v, const Term& t) {
  if (t.is_ground()) return false;
  if (t.is_var()) return t.var() == v;
  for (const Term& a : t.args())
    if (occurs(v, a)) return true;
  return false;
}

// --- substitutions --------------------------------------------------------

void Substitution::bind(const Var& v, const Term& t) {
  if (t.is_var() && t.var() == v) {
    map_.erase(v);
    return;
  }
  map_.insert_or_assign(v, t);
}

const Term* Substitution::find(const Var& v) const {
  auto it = map_.find(v);
  return it == map_.end() ? nullptr : &it->second;
}

Term Substitution::apply(const Term& t) const {
  if (map_.empty() || t.is_ground()) return t;
  if (t.is_var()) {
    const Term* b = find(t.var());
    return b ? *b : t;
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const Term& a : t.args()) {
    Term n = apply(a);
    changed = changed || n.identity() != a.identity();
    args.push_back(std::move(n));
  }
  if (!changed) return t;
  return Term::compound(t.functor(), std::move(args));
}

std::vector<Term> Substitution::apply(std::span<const Term> ts) const {
  std::vector<Term> out;
  out.reserve(ts.size());
  for (const Term& t : ts) out.push_back(apply(t));
  return out;
}

void Substitution::compose(const Substitution& theta) {
  if (theta.empty()) return;
  for (auto& [v, t] : map_) t = theta.apply(t);
  for (const auto& [v, t] : theta.map_) map_.emplace(v, t);
  for (auto it = map_.begin(); it != map_.end();) {
    if (it->second.is_var() && it->second.var() == it->first)
      it = map_.erase(it);
    else
      ++it;
  }
}

std::string to_string(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : s) {
    if (!first) out += ", ";
    first = false;
    out += to_string(v) + "->" + to_string(t);
  }
  return out + "}";
}

Term apply(const Substitution& s, const Term& t) { return s.apply(t); }

// --- matching -------------------------------------------------------------

namespace {

// Matchers may carry identity bindings X->X while a match is in progress;
// they record that X is already fixed. `match()` strips them on return.
bool match_rec(const Term& p, const Term& s, std::map<Var, Term>& m) {
  if (p.is_var()) {
    auto it = m.find(p.var());
    if (it != m.end()) return it->second == s;
    m.emplace(p.var(), s);
    return true;
  }
  if (p.is_ground()) return p == s;
  if (!s.is_compound() || s.arity() != p.arity() || s.functor() != p.functor())
    return false;
  for (std::size_t i = 0; i < p.arity(); ++i)
    if (!match_rec(p.arg(i), s.arg(i), m)) return false;
  return true;
}

}  // namespace

bool match_into(const Term& pattern, const Term& subject, Substitution& sigma) {
  if (pattern.is_var()) {
    if (const Term* b = sigma.find(pattern.var())) return *b == subject;
    sigma.assign(pattern.var(), subject);
    return true;
  }
  if (pattern.is_ground()) return pattern == subject;
  if (!subject.is_compound() || subject.arity() != pattern.arity() ||
      subject.functor() != pattern.functor())
    return false;
  for (std::size_t i = 0; i < pattern.arity(); ++i)
    if (!match_into(pattern.arg(i), subject.arg(i), sigma)) return false;
  return true;
}

std::optional<Substitution> match(std::span<const Term> pattern,
                                  std::span<const Term> subject) {
  if (pattern.size() != subject.size()) return std::nullopt;
  std::map<Var, Term> m;
  for (std::size_t i = 0; i < pattern.size(); ++i)
    if (!match_rec(pattern[i], subject[i], m)) return std::nullopt;
  Substitution out;
  for (const auto& [v, t] : m) out.bind(v, t);
  return out;
}

std::optional<Substitution> match(const Term& pattern, const Term& subject) {
  return match(std::span<const Term>(&pattern, 1),
               std::span<const Term>(&subject, 1));
}

// --- unification ----------------------------------------------------------

bool unify_into(const Term& a, const Term& b, Substitution& sigma) {
  std::vector<std::pair<Term, Term>> work{{a, b}};
  while (!work.empty()) {
    auto [x, y] = std::move(work.back());
    work.pop_back();
    x = sigma.apply(x);
    y = sigma.apply(y);
    if (x == y) continue;
    if (!x.is_var() && y.is_var()) std::swap(x, y);
    if (x.is_var()) {
      if (occurs(x.var(), y)) return false;
      Substitution theta;
      theta.bind(x.var(), y);
      sigma.compose(theta);
      continue;
    }
    if (x.is_number() || y.is_number()) return false;  // distinct numbers
    if (x.arity() != y.arity() || x.functor() != y.functor()) return false;
    for (std::size_t i = x.arity(); i-- > 0;)
      work.emplace_back(x.arg(i), y.arg(i));
  }
  return true;
}

std::optional<Substitution> unify(const Term& a, const Term& b) {
  Substitution s;
  if (!unify_into(a, b, s)) return std::nullopt;
  return s;
}

std::optional<Substitution> unify(std::span<const Term> as,
                                  std::span<const Term> bs) {
  if (as.size() != bs.size()) return std::nullopt;
  Substitution s;
  for (std::size_t i = 0; i < as.size(); ++i)
    if (!unify_into(as[i], bs[i], s)) return std::nullopt;
  return s;
}

// --- renaming -------------------------------------------------------------

Renamed rename_apart(std::span<const Term> ts, const std::set<Var>& taboo) {
  int next = 0;
  for (const Var& v : taboo) next = std::max(next, v.index);
  std::vector<Var> vars = variables(ts);
  for (const Var& v : vars) next = std::max(next, v.index);
  ++next;
  Renamed out;
  for (const Var& v : vars)
    out.renaming.bind(v, Term::variable(Var{v.name, next++}));
  out.terms = out.renaming.apply(ts);
  return out;
}

}  // namespace chr
