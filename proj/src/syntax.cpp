#include "chr/syntax.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

#include "chr/builtins.hpp"
#include "chr/error.hpp"

namespace chr {

std::string_view to_string(RuleKind k) {
  switch (k) {
    case RuleKind::Simplification: return "simplification";
    case RuleKind::Propagation: return "propagation";
    case RuleKind::Simpagation: return "simpagation";
  }
  return "?";
}

RuleKind Rule::kind() const {
  if (removed.empty()) return RuleKind::Propagation;
  if (kept.empty()) return RuleKind::Simplification;
  return RuleKind::Simpagation;
}

std::string Rule::label() const {
  if (name) return *name;
  return "r" + std::to_string(source_index + 1);
}

std::vector<Term> Rule::heads() const {
  std::vector<Term> h = kept;
  h.insert(h.end(), removed.begin(), removed.end());
  return h;
}

bool operator==(const Rule& a, const Rule& b) {
  return a.name == b.name && a.kept == b.kept && a.removed == b.removed &&
         a.guard == b.guard && a.body == b.body;
}

std::string to_string(const Symbol& s) {
  return s.name + "/" + std::to_string(s.arity);
}

// --- lexer ---------------------------------------------------------------

namespace {

enum class Tok { Var, Name, Number, Op, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

constexpr std::array<std::string_view, 21> kOps = {
    "<=>", "==>", "=/=", "=<", ">=", "==", "->", "=", "<", ">", "+",
    "-",   "*",   "/",   "\\", "|",  "@",  ",",  ".", "(", ")"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    auto is_ident = [](char ch) {
      return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && is_ident(src[j])) ++j;
      t.text = std::string(src.substr(i, j - i));
      t.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_')
                   ? Tok::Var
                   : Tok::Name;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      t.text = std::string(src.substr(i, j - i));
      t.kind = Tok::Number;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (std::string_view op : kOps) {
      if (src.substr(i, op.size()) == op) {
        t.kind = Tok::Op;
        t.text = std::string(op);
        advance(op.size());
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched)
      throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

// --- parser ----------------------------------------------------------------

enum class Assoc { xfx, xfy, yfx };

struct OpInfo {
  int prec;
  Assoc assoc;
};

std::optional<OpInfo> infix(const Token& t) {
  if (t.kind == Tok::Name && t.text == "mod") return OpInfo{400, Assoc::yfx};
  if (t.kind != Tok::Op) return std::nullopt;
  const std::string& s = t.text;
  if (s == "->") return OpInfo{1050, Assoc::xfy};
  if (s == "=" || s == "==" || s == "=/=" || s == "<" || s == "=<" ||
      s == ">" || s == ">=")
    return OpInfo{700, Assoc::xfx};
  if (s == "+" || s == "-") return OpInfo{500, Assoc::yfx};
  if (s == "*" || s == "/") return OpInfo{400, Assoc::yfx};
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  bool at_end() const { return peek().kind == Tok::End; }

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }

  bool is_op(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Op && peek(k).text == s;
  }

  [[noreturn]] void error(const std::string& msg) const {
    const Token& t = peek();
    std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.line, t.column, msg + " near " + near);
  }

  void expect(std::string_view op) {
    if (!is_op(op)) error("expected '" + std::string(op) + "'");
    ++pos_;
  }

  Term expr(int max_prec) {
    auto [left, left_prec] = prefix(max_prec);
    while (true) {
      auto op = infix(peek());
      if (!op || op->prec > max_prec) break;
      int left_max = op->assoc == Assoc::yfx ? op->prec : op->prec - 1;
      if (left_prec > left_max) break;
      std::string f = peek().text;
      ++pos_;
      int right_max = op->assoc == Assoc::xfy ? op->prec : op->prec - 1;
      Term right = expr(right_max);
      left = Term::compound(f, {left, right});
      left_prec = op->prec;
    }
    return left;
  }

  std::vector<Term> conjunction() {
    std::vector<Term> out{expr(1050)};
    while (is_op(",")) {
      ++pos_;
      out.push_back(expr(1050));
    }
    return out;
  }

  Rule rule(std::size_t index) {
    Rule r;
    r.source_index = index;
    const Token start = peek();
    r.name = rule_name();
    std::vector<Term> first = conjunction();
    if (is_op("\\")) {
      ++pos_;
      r.kept = std::move(first);
      r.removed = conjunction();
      if (!is_op("<=>")) error("expected '<=>' after simpagation head");
      ++pos_;
    } else if (is_op("<=>")) {
      ++pos_;
      r.removed = std::move(first);
    } else if (is_op("==>")) {
      ++pos_;
      r.kept = std::move(first);
    } else {
      error("expected '<=>', '==>' or '\\'");
    }
    if (is_op(".")) error("empty rule body (write 'true')");
    std::vector<Term> rhs = conjunction();
    if (is_op("|")) {
      ++pos_;
      r.guard = std::move(rhs);
      if (is_op(".")) error("empty rule body (write 'true')");
      rhs = conjunction();
    } else {
      r.guard = {Term()};
    }
    for (Term& b : rhs)
      if (!(b.is_atom() && b.functor() == "true")) r.body.push_back(std::move(b));
    expect(".");
    check_rule(r, start);
    return r;
  }

 private:
  // name @ ...  where name may contain '-' (e.g. `non-term @`).
  std::optional<std::string> rule_name() {
    if (peek().kind != Tok::Name) return std::nullopt;
    std::size_t k = 1;
    std::string name = peek().text;
    while (is_op("-", k) && peek(k + 1).kind == Tok::Name) {
      name += "-" + peek(k + 1).text;
      k += 2;
    }
    if (!is_op("@", k)) return std::nullopt;
    pos_ += k + 1;
    return name;
  }

  std::pair<Term, int> prefix(int max_prec) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        ++pos_;
        return {Term::number(Rational(Integer(t.text))), 0};
      }
      case Tok::Var: {
        ++pos_;
        if (t.text == "_")
          return {Term::variable("_G" + std::to_string(anon_++)), 0};
        return {Term::variable(t.text), 0};
      }
      case Tok::Name: {
        std::string f = t.text;
        ++pos_;
        if (!is_op("(")) return {Term::atom(f), 0};
        ++pos_;
        std::vector<Term> args{expr(999)};
        while (is_op(",")) {
          ++pos_;
          args.push_back(expr(999));
        }
        expect(")");
        return {Term::compound(f, std::move(args)), 0};
      }
      case Tok::Op: {
        if (t.text == "(") {
          ++pos_;
          Term inner = expr(1200);
          expect(")");
          return {inner, 0};
        }
        if (t.text == "-" || t.text == "+") {
          std::string f = t.text;
          ++pos_;
          if (peek().kind == Tok::Number) {
            Rational v(Integer(peek().text));
            ++pos_;
            return {Term::number(f == "-" ? Rational(-v) : v), 0};
          }
          if (max_prec < 200) error("operator priority clash");
          Term x = expr(200);
          return {Term::compound(f, {x}), 200};
        }
        error("unexpected token");
      }
      case Tok::End:
        error("unexpected end of input");
    }
    error("unexpected token");
  }

  void check_rule(const Rule& r, const Token& at) {
    auto fail = [&](ErrorKind kind, const std::string& msg) {
      if (kind == ErrorKind::Syntax) throw SyntaxError(at.line, at.column, msg);
      throw Error(kind, std::to_string(at.line) + ":" +
                            std::to_string(at.column) + ": " + msg);
    };
    for (const Term& h : r.heads()) {
      if (!h.is_compound())
        fail(ErrorKind::Syntax, "head must be a constraint: " + to_string(h));
      if (is_builtin(h))
        fail(ErrorKind::BuiltinInHead,
             "built-in constraint in rule head: " + to_string(h));
    }
    for (const Term& g : r.guard)
      if (!is_builtin(g))
        fail(ErrorKind::Syntax, "guard must be built-in: " + to_string(g));
    for (const Term& b : r.body)
      if (!b.is_compound())
        fail(ErrorKind::Syntax, "body item must be a constraint: " + to_string(b));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int anon_ = 0;
};

void collect_symbols(const Term& t, bool top,
                     std::map<std::string, std::size_t>& arity,
                     std::set<Symbol>* user) {
  if (!t.is_compound()) return;
  bool arith = is_arith_functor(t.functor(), t.arity());
  bool builtin = top && is_builtin(t);
  if (!arith && !builtin) {
    auto [it, fresh] = arity.emplace(t.functor(), t.arity());
    if (!fresh && it->second != t.arity())
      throw Error(ErrorKind::ArityClash,
                  "functor " + t.functor() + " used with arities " +
                      std::to_string(it->second) + " and " +
                      std::to_string(t.arity()));
    if (top && user) user->insert(Symbol{t.functor(), t.arity()});
  }
  for (const Term& a : t.args()) collect_symbols(a, false, arity, nullptr);
}

}  // namespace

Program make_program(std::vector<Rule> rules) {
  Program p;
  std::set<std::string> names;
  std::map<std::string, std::size_t> arity;
  for (const Rule& r : rules) {
    if (r.name && !names.insert(*r.name).second)
      throw Error(ErrorKind::Syntax, "duplicate rule name " + *r.name);
    if (r.head_count() == 0)
      throw Error(ErrorKind::Syntax, "rule without head constraints");
    for (const Term& h : r.heads()) {
      if (!h.is_compound())
        throw Error(ErrorKind::Syntax, "head must be a constraint");
      if (is_builtin(h))
        throw Error(ErrorKind::BuiltinInHead,
                    "built-in constraint in rule head: " + to_string(h));
      collect_symbols(h, true, arity, &p.constraint_symbols);
    }
    for (const Term& g : r.guard) {
      if (!is_builtin(g))
        throw Error(ErrorKind::Syntax, "guard must be built-in: " + to_string(g));
      collect_symbols(g, true, arity, nullptr);
    }
    for (const Term& b : r.body)
      collect_symbols(b, true, arity, is_builtin(b) ? nullptr : &p.constraint_symbols);
  }
  p.rules = std::move(rules);
  return p;
}

Program parse_program(std::string_view text) {
  Parser parser(text);
  std::vector<Rule> rules;
  while (!parser.at_end()) rules.push_back(parser.rule(rules.size()));
  return make_program(std::move(rules));
}

std::vector<Term> parse_goal(std::string_view text) {
  Parser parser(text);
  if (parser.at_end()) return {};
  std::vector<Term> goal = parser.conjunction();
  if (parser.is_op(".")) parser.expect(".");
  if (!parser.at_end()) parser.error("unexpected token after goal");
  for (const Term& g : goal)
    if (!g.is_compound())
      throw Error(ErrorKind::Syntax, "goal item must be a constraint: " + to_string(g));
  return goal;
}

Term parse_term(std::string_view text) {
  Parser parser(text);
  Term t = parser.expr(1200);
  if (!parser.at_end()) parser.error("unexpected token after term");
  return t;
}

std::string to_string(const Rule& r) {
  std::string out;
  if (r.name) out += *r.name + " @ ";
  switch (r.kind()) {
    case RuleKind::Simpagation:
      out += to_string(r.kept) + " \\ " + to_string(r.removed) + " <=> ";
      break;
    case RuleKind::Simplification:
      out += to_string(r.removed) + " <=> ";
      break;
    case RuleKind::Propagation:
      out += to_string(r.kept) + " ==> ";
      break;
  }
  bool trivial_guard = r.guard.empty() ||
                       (r.guard.size() == 1 && r.guard[0].is_atom() &&
                        r.guard[0].functor() == "true");
  if (!trivial_guard) out += to_string(r.guard) + " | ";
  out += r.body.empty() ? "true" : to_string(r.body);
  return out + ".";
}

std::string to_string(const Program& p) {
  std::string out;
  for (const Rule& r : p.rules) out += to_string(r) + "\n";
  return out;
}

namespace {

std::string conj(const std::vector<Term>& items) {
  std::string out;
  for (const Term& t : items) {
    if (t.is_atom() && t.functor() == "true") continue;
    if (!out.empty()) out += " ∧ ";
    out += to_string(t);
  }
  return out;
}

std::string join_vars(const std::vector<Var>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += to_string(vs[i]);
  }
  return out;
}

}  // namespace

std::string logical_reading(const Rule& r) {
  std::vector<Term> left = r.kept;
  left.insert(left.end(), r.removed.begin(), r.removed.end());
  left.insert(left.end(), r.guard.begin(), r.guard.end());
  std::vector<Term> outer = r.kept;
  outer.insert(outer.end(), r.guard.begin(), r.guard.end());

  std::vector<Var> universal = variables(left);
  std::vector<Var> existential;
  for (const Var& v : variables(r.body))
    if (std::find(universal.begin(), universal.end(), v) == universal.end())
      existential.push_back(v);

  std::string lhs = conj(left);
  if (lhs.empty()) lhs = "true";
  std::string rhs = conj(outer);
  std::string body = conj(r.body);
  if (!existential.empty()) {
    body = "∃" + join_vars(existential) + " (" +
           (body.empty() ? "true" : body) + ")";
  }
  if (!body.empty()) rhs = rhs.empty() ? body : rhs + " ∧ " + body;
  if (rhs.empty()) rhs = "true";

  std::string inner = lhs + " ↔ " + rhs;
  if (universal.empty()) return inner;
  return "∀" + join_vars(universal) + " (" + inner + ")";
}

}  // namespace chr
