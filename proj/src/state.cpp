#include "chr/state.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <tuple>

#include "chr/error.hpp"

namespace chr {

std::vector<IdConstraint> State::constraints() const {
  std::vector<IdConstraint> out;
  out.reserve(user_.size());
  for (const auto& [id, t] : user_) out.push_back({id, t});
  return out;
}

const Term* State::find(ConstraintId id) const {
  auto it = user_.find(id);
  return it == user_.end() ? nullptr : &it->second;
}

void State::note_vars(const Term& t) {
  if (t.is_ground()) return;
  std::vector<Var> vs;
  collect_vars(t, vs);
  for (const Var& v : vs) next_var_index_ = std::max(next_var_index_, v.index + 1);
}

ConstraintId State::add_user(const Term& t) {
  Term n = simplify_arith(builtin_.normalize(t));
  note_vars(n);
  ConstraintId id = next_id_++;
  user_.emplace(id, std::move(n));
  return id;
}

void State::remove(ConstraintId id) { user_.erase(id); }

void State::tell(const Term& c, std::vector<ConstraintId>* woken) {
  note_vars(c);
  if (!builtin_.tell_in_place(c) || failed()) return;
  for (auto& [id, t] : user_) {
    Term n = simplify_arith(builtin_.normalize(t));
    if (n.identity() != t.identity() && !(n == t)) {
      t = std::move(n);
      if (woken) woken->push_back(id);
    }
  }
}

void State::add_globals(std::span<const Var> vs) {
  for (const Var& v : vs) {
    globals_.insert(v);
    next_var_index_ = std::max(next_var_index_, v.index + 1);
  }
}

Term State::fresh_var(const std::string& name) {
  return Term::variable(Var{name, next_var_index_++});
}

State add_constraints(State s, std::span<const Term> goal) {
  std::vector<Var> vs = variables(goal);
  s.add_globals(vs);
  for (const Term& g : goal) {
    if (s.failed()) break;
    if (is_builtin(g))
      s.tell(g);
    else
      s.add_user(g);
  }
  return s;
}

State initial_state(std::span<const Term> goal) {
  return add_constraints(State{}, goal);
}

// --- equivalence ----------------------------------------------------------

namespace {

struct Canon {
  bool failed = false;
  std::vector<Term> values;  // one per global, in global order
  std::vector<Term> items;   // user constraints and pending equations
  std::vector<ConstraintId> ids;  // ids of the user items (prefix of items)
  Substitution alias;
};

Canon canonicalize(const State& s, const std::set<Var>& globals) {
  Canon c;
  if (s.failed()) {
    c.failed = true;
    return c;
  }
  const BuiltinStore& b = s.builtin();
  std::map<Var, std::vector<Var>> classes;
  std::vector<Term> raw_values;
  for (const Var& g : globals) {
    Term v = b.normalize(Term::variable(g));
    if (v.is_var()) classes[v.var()].push_back(g);
    raw_values.push_back(std::move(v));
  }
  for (const auto& [root, members] : classes) {
    const Var& rep = members.front();  // globals iterate in sorted order
    if (!(rep == root)) c.alias.bind(root, Term::variable(rep));
  }
  for (const Term& v : raw_values) c.values.push_back(c.alias.apply(v));
  for (const auto& [id, t] : s.user()) {
    c.items.push_back(c.alias.apply(t));
    c.ids.push_back(id);
  }
  for (const auto& [l, r] : b.pending()) {
    c.items.push_back(Term::compound(
        "$eq", {c.alias.apply(b.normalize(l)), c.alias.apply(b.normalize(r))}));
  }
  return c;
}

void shape(const Term& t, const std::set<Var>& globals, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      if (globals.count(t.var()))
        out += to_string(t.var());
      else
        out += '_';
      return;
    case Term::Kind::Number:
      out += to_string(t.value());
      return;
    case Term::Kind::Compound:
      out += t.functor();
      if (t.arity() == 0) return;
      out += '(';
      for (std::size_t i = 0; i < t.arity(); ++i) {
        if (i) out += ',';
        shape(t.arg(i), globals, out);
      }
      out += ')';
      return;
  }
}

std::string shape(const Term& t, const std::set<Var>& globals) {
  std::string out;
  shape(t, globals, out);
  return out;
}

struct Bijection {
  std::map<Var, Var> fwd;
  std::map<Var, Var> bwd;
};

bool variant(const Term& a, const Term& b, const std::set<Var>& globals,
             Bijection& rho) {
  if (a.is_ground() || b.is_ground()) return a == b;
  if (a.is_var()) {
    if (!b.is_var()) return false;
    bool ga = globals.count(a.var()) != 0;
    bool gb = globals.count(b.var()) != 0;
    if (ga || gb) return ga && gb && a.var() == b.var();
    auto f = rho.fwd.find(a.var());
    auto r = rho.bwd.find(b.var());
    if (f != rho.fwd.end() || r != rho.bwd.end())
      return f != rho.fwd.end() && r != rho.bwd.end() && f->second == b.var() &&
             r->second == a.var();
    rho.fwd.emplace(a.var(), b.var());
    rho.bwd.emplace(b.var(), a.var());
    return true;
  }
  if (!a.is_compound() || !b.is_compound() || a.arity() != b.arity() ||
      a.functor() != b.functor())
    return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!variant(a.arg(i), b.arg(i), globals, rho)) return false;
  return true;
}

bool match_items(const std::vector<Term>& as, const std::vector<std::string>& akeys,
                 const std::vector<Term>& bs,
                 const std::map<std::string, std::vector<std::size_t>>& groups,
                 std::vector<bool>& used, std::size_t i,
                 const std::set<Var>& globals, Bijection& rho) {
  if (i == as.size()) return true;
  const auto& cands = groups.at(akeys[i]);
  for (std::size_t j : cands) {
    if (used[j]) continue;
    Bijection saved = rho;
    if (variant(as[i], bs[j], globals, rho)) {
      used[j] = true;
      if (match_items(as, akeys, bs, groups, used, i + 1, globals, rho))
        return true;
      used[j] = false;
      if (as[i].is_ground()) {
        rho = std::move(saved);
        return false;  // any other equal candidate behaves the same
      }
    }
    rho = std::move(saved);
  }
  return false;
}

}  // namespace

bool state_equiv(const State& a, const State& b) {
  if (a.failed() || b.failed()) return a.failed() && b.failed();
  std::set<Var> globals = a.globals();
  globals.insert(b.globals().begin(), b.globals().end());
  Canon ca = canonicalize(a, globals);
  Canon cb = canonicalize(b, globals);
  if (ca.items.size() != cb.items.size()) return false;

  Bijection rho;
  for (std::size_t i = 0; i < ca.values.size(); ++i)
    if (!variant(ca.values[i], cb.values[i], globals, rho)) return false;

  std::vector<std::string> akeys;
  std::vector<std::size_t> order(ca.items.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::string> raw_keys;
  for (const Term& t : ca.items) raw_keys.push_back(shape(t, globals));
  // Ground items first: they never branch.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::make_tuple(!ca.items[x].is_ground(), raw_keys[x]) <
           std::make_tuple(!ca.items[y].is_ground(), raw_keys[y]);
  });
  std::vector<Term> as;
  for (std::size_t k : order) {
    as.push_back(ca.items[k]);
    akeys.push_back(raw_keys[k]);
  }
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t j = 0; j < cb.items.size(); ++j)
    groups[shape(cb.items[j], globals)].push_back(j);
  std::map<std::string, std::size_t> acount;
  for (const auto& k : akeys) ++acount[k];
  for (const auto& [k, n] : acount) {
    auto it = groups.find(k);
    if (it == groups.end() || it->second.size() != n) return false;
  }
  std::vector<bool> used(cb.items.size(), false);
  return match_items(as, akeys, cb.items, groups, used, 0, globals, rho);
}

namespace {

void count_locals(const Term& t, const std::set<Var>& globals, std::map<Var, int>& n) {
  if (t.is_var()) {
    if (!globals.count(t.var())) ++n[t.var()];
  } else if (t.is_compound()) {
    for (const Term& a : t.args()) count_locals(a, globals, n);
  }
}

// Like shape, but a local variable shows its color, a renaming-invariant
// summary of where it occurs.
void colored_shape(const Term& t, const std::set<Var>& globals,
                   const std::map<Var, std::string>& color, std::string& out) {
  if (t.is_var() && !globals.count(t.var())) {
    out += '_' + color.at(t.var());
  } else if (t.is_compound() && t.arity() > 0) {
    out += t.functor();
    out += '(';
    for (std::size_t i = 0; i < t.arity(); ++i) {
      if (i) out += ',';
      colored_shape(t.arg(i), globals, color, out);
    }
    out += ')';
  } else {
    shape(t, globals, out);
  }
}

// Occurrence count of each local variable.
std::map<Var, std::string> initial_colors(const Canon& c, const std::set<Var>& globals) {
  std::map<Var, int> n;
  for (const Term& v : c.values) count_locals(v, globals, n);
  for (const Term& t : c.items) count_locals(t, globals, n);
  std::map<Var, std::string> color;
  for (const auto& [v, k] : n) color[v] = std::to_string(k);
  return color;
}

void note_positions(const Term& t, const std::set<Var>& globals, const std::string& context,
                    std::string path, std::map<Var, std::vector<std::string>>& seen) {
  if (t.is_var()) {
    if (!globals.count(t.var())) seen[t.var()].push_back(context + '@' + path);
  } else if (t.is_compound()) {
    for (std::size_t i = 0; i < t.arity(); ++i)
      note_positions(t.arg(i), globals, context, path + '.' + std::to_string(i), seen);
  }
}

// One round of refinement: a variable's new color lists the shapes of the
// items it occurs in, with positions.
std::map<Var, std::string> refine_colors(const Canon& c, const std::set<Var>& globals,
                                         const std::map<Var, std::string>& color) {
  std::map<Var, std::vector<std::string>> seen;
  for (std::size_t k = 0; k < c.values.size(); ++k)
    note_positions(c.values[k], globals, "v" + std::to_string(k), "", seen);
  for (const Term& t : c.items) {
    std::string sh;
    colored_shape(t, globals, color, sh);
    note_positions(t, globals, sh, "", seen);
  }
  std::map<Var, std::string> out;
  for (auto& [v, occ] : seen) {
    std::sort(occ.begin(), occ.end());
    std::string sig;
    for (const auto& o : occ) sig += o + ' ';
    out[v] = std::move(sig);
  }
  // compact the signatures to small ranks
  std::map<std::string, int> rank;
  for (const auto& [v, sig] : out) rank.emplace(sig, 0);
  int r = 0;
  for (auto& [sig, k] : rank) k = r++;
  for (auto& [v, sig] : out) sig = std::to_string(rank.at(sig));
  return out;
}

}  // namespace

std::string equiv_key(const State& s) {
  if (s.failed()) return "#failed";
  Canon c = canonicalize(s, s.globals());
  std::map<Var, std::string> color = initial_colors(c, s.globals());
  auto key = [&](const Term& t) {
    std::string k;
    colored_shape(t, s.globals(), color, k);
    return k;
  };
  std::string out;
  for (const Term& v : c.values) {
    out += key(v);
    out += ';';
  }
  std::vector<std::string> keys;
  for (const Term& t : c.items) keys.push_back(key(t));
  std::sort(keys.begin(), keys.end());
  for (const auto& k : keys) {
    out += '|';
    out += k;
  }
  return out;
}

namespace {

void write_renamed(const Term& t, const std::set<Var>& globals, std::map<Var, int>& names,
                   std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      if (globals.count(t.var())) {
        out += to_string(t.var());
      } else {
        auto [it, fresh] = names.emplace(t.var(), static_cast<int>(names.size()));
        out += '_' + std::to_string(it->second);
      }
      return;
    case Term::Kind::Number:
      out += to_string(t.value());
      return;
    case Term::Kind::Compound:
      out += t.functor();
      if (t.arity() == 0) return;
      out += '(';
      for (std::size_t i = 0; i < t.arity(); ++i) {
        if (i) out += ',';
        write_renamed(t.arg(i), globals, names, out);
      }
      out += ')';
      return;
  }
}

}  // namespace

std::string exploration_key(const State& s) {
  if (s.failed()) return "#failed";
  const std::set<Var>& globals = s.globals();
  Canon c = canonicalize(s, globals);
  std::map<Var, std::string> color = refine_colors(c, globals, initial_colors(c, globals));
  std::vector<std::string> shapes;
  for (const Term& t : c.items) {
    std::string k;
    colored_shape(t, globals, color, k);
    shapes.push_back(std::move(k));
  }
  std::vector<std::size_t> order(c.items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return shapes[x] < shapes[y]; });
  std::map<Var, int> names;
  std::string out;
  for (const Term& v : c.values) {
    write_renamed(v, globals, names, out);
    out += ';';
  }
  std::map<ConstraintId, std::size_t> position;
  for (std::size_t k = 0; k < order.size(); ++k) {
    out += '|';
    write_renamed(c.items[order[k]], globals, names, out);
    if (order[k] < c.ids.size()) position[c.ids[order[k]]] = k;
  }
  std::vector<std::string> tokens;
  for (const Token& t : s.history()) {
    std::string k = std::to_string(t.rule);
    bool live = true;
    for (ConstraintId id : t.ids) {
      auto it = position.find(id);
      if (it == position.end()) {
        live = false;
        break;
      }
      k += ',' + std::to_string(it->second);
    }
    if (live) tokens.push_back(std::move(k));
  }
  std::sort(tokens.begin(), tokens.end());
  for (const auto& k : tokens) out += '#' + k;
  return out;
}

// --- printing ---------------------------------------------------------------

namespace {

std::vector<std::size_t> symbol_order(const std::vector<Term>& terms,
                                      const std::vector<ConstraintId>& ids) {
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const Term& a = terms[x];
    const Term& b = terms[y];
    return std::make_tuple(a.functor(), a.arity(), ids[x]) <
           std::make_tuple(b.functor(), b.arity(), ids[y]);
  });
  return order;
}

}  // namespace

std::string format_state(const State& s) {
  if (s.failed()) return "false\n";
  std::vector<Term> terms;
  std::vector<ConstraintId> ids;
  for (const auto& [id, t] : s.user()) {
    terms.push_back(t);
    ids.push_back(id);
  }
  std::ostringstream os;
  for (std::size_t k : symbol_order(terms, ids))
    os << to_string(terms[k]) << " #" << ids[k] << "\n";
  const BuiltinStore& b = s.builtin();
  for (const Var& g : s.globals()) {
    Term v = b.normalize(Term::variable(g));
    if (!(v.is_var() && v.var() == g)) os << to_string(g) << " = " << v << "\n";
  }
  for (const auto& [l, r] : b.pending())
    os << b.normalize(l) << " = " << b.normalize(r) << "\n";
  return os.str();
}

std::string format_answer(const State& s) {
  if (s.failed()) return "false\n";
  const std::set<Var>& globals = s.globals();
  Canon c = canonicalize(s, globals);
  const BuiltinStore& b = s.builtin();
  std::ostringstream os;

  std::vector<Var> gs(globals.begin(), globals.end());
  std::set<Var> done;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const Var& g = gs[i];
    if (done.count(g)) continue;
    Term raw = b.normalize(Term::variable(g));
    if (raw.is_var()) {
      std::vector<Var> members;
      for (std::size_t j = i; j < gs.size(); ++j)
        if (b.normalize(Term::variable(gs[j])) == raw) members.push_back(gs[j]);
      for (std::size_t k = 0; k + 1 < members.size(); ++k)
        os << to_string(members[k]) << " = " << to_string(members[k + 1]) << "\n";
      done.insert(members.begin(), members.end());
      continue;
    }
    os << to_string(g) << " = " << c.values[i] << "\n";
    done.insert(g);
  }
  std::size_t nuser = c.ids.size();
  for (std::size_t k = nuser; k < c.items.size(); ++k)
    os << c.items[k].arg(0) << " = " << c.items[k].arg(1) << "\n";
  std::vector<Term> user(c.items.begin(), c.items.begin() + static_cast<std::ptrdiff_t>(nuser));
  for (std::size_t k : symbol_order(user, c.ids)) os << user[k] << "\n";
  return os.str();
}

std::string format_answer_inline(const State& s) {
  std::istringstream in(format_answer(s));
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (!out.empty()) out += ", ";
    out += line;
  }
  return out.empty() ? "true" : out;
}

}  // namespace chr
