#include <algorithm>
#include <map>

#include "chr/engine.hpp"

namespace chr {

namespace {

struct Occurrence {
  std::size_t rule;
  std::size_t head;
};

using OccurrenceTable = std::map<std::pair<std::string, std::size_t>, std::vector<Occurrence>>;

OccurrenceTable occurrences(const Program& p) {
  OccurrenceTable table;
  for (std::size_t r = 0; r < p.rules.size(); ++r) {
    // removed heads first, so a new duplicate is the one a simpagation
    // rule deletes (otherwise idempotence lets it propagate forever)
    std::vector<Term> heads = p.rules[r].heads();
    std::size_t nkept = p.rules[r].kept.size();
    std::vector<std::size_t> order;
    for (std::size_t h = nkept; h < heads.size(); ++h) order.push_back(h);
    for (std::size_t h = 0; h < nkept; ++h) order.push_back(h);
    for (std::size_t h : order) table[{heads[h].functor(), heads[h].arity()}].push_back({r, h});
  }
  return table;
}

struct Frame {
  bool activate = false;
  // body frames
  std::vector<Term> items;
  std::size_t next = 0;
  const Rule* rule = nullptr;  // null for the initial goal
  // activation frames
  ConstraintId id = 0;
  std::size_t occ = 0;
};

Term try_simplify(const Term& t) {
  try {
    return simplify_arith(t);
  } catch (const Error&) {
    return t;
  }
}

class RefinedMachine {
 public:
  RefinedMachine(State s, const Program& p) : state_(std::move(s)), program_(p),
                                             table_(occurrences(p)) {}

  void push_body(std::vector<Term> items) {
    Frame f;
    f.items = std::move(items);
    stack_.push_back(std::move(f));
  }

  void push_activations(std::vector<ConstraintId> ids) {
    std::sort(ids.begin(), ids.end());
    for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
      Frame f;
      f.activate = true;
      f.id = *it;
      stack_.push_back(f);
    }
  }

  RunResult run(std::size_t step_limit, const StepObserver& observer) {
    RunResult res;
    try {
      while (!stack_.empty()) {
        if (state_.failed()) break;
        Frame& top = stack_.back();
        if (!top.activate) {
          if (top.next == top.items.size()) {
            stack_.pop_back();
            continue;
          }
          Term item = top.items[top.next++];
          execute(item, top.rule);
          continue;
        }
        if (res.trace.steps.size() >= step_limit) {
          // Only stop when a firing is actually pending.
          if (find_instance(top)) {
            flush_pending();
            res.outcome = Outcome::StepLimit;
            res.state = state_;
            return res;
          }
          stack_.pop_back();
          continue;
        }
        std::optional<RuleInstance> inst = find_instance(top);
        if (!inst) {
          stack_.pop_back();
          continue;
        }
        if (observer) observer(state_, *inst);
        res.trace.steps.push_back(fire(*inst));
      }
      res.outcome = state_.failed() ? Outcome::Failed : Outcome::NormalForm;
    } catch (const Error& e) {
      res.outcome = Outcome::Error;
      res.message = e.what();
      res.error = e.kind();
    }
    res.state = state_;
    return res;
  }

 private:
  // Moves goal and body items not yet executed into the state, innermost
  // frame first, so an interrupted state still holds the whole conjunction.
  void flush_pending() {
    std::vector<std::pair<Term, const Rule*>> items;
    for (auto f = stack_.rbegin(); f != stack_.rend(); ++f)
      if (!f->activate)
        for (std::size_t k = f->next; k < f->items.size(); ++k) items.emplace_back(f->items[k], f->rule);
    stack_.clear();
    for (const auto& [item, rule] : items) {
      if (state_.failed()) return;
      execute(item, rule);
    }
    stack_.clear();
  }

  // Advances the frame's occurrence pointer to the first occurrence with an
  // applicable instance.
  std::optional<RuleInstance> find_instance(Frame& f) {
    const Term* t = state_.find(f.id);
    if (!t) return std::nullopt;
    auto it = table_.find({t->functor(), t->arity()});
    if (it == table_.end()) return std::nullopt;
    const auto& occs = it->second;
    for (; f.occ < occs.size(); ++f.occ) {
      std::vector<RuleInstance> found = rule_instances(
          state_, program_, occs[f.occ].rule, std::make_pair(occs[f.occ].head, f.id), 1);
      if (!found.empty()) return std::move(found.front());
    }
    return std::nullopt;
  }

  TraceStep fire(const RuleInstance& inst) {
    const Rule& r = program_.rules.at(inst.rule);
    TraceStep step;
    step.rule = r.label();
    step.removed = inst.removed_ids;
    for (ConstraintId id : inst.removed_ids) state_.remove(id);
    state_.record(Token{inst.rule, inst.ids()});
    Substitution sigma = extend_with_fresh(state_, r, inst.matching);
    for (const Term& g : r.guard) {
      if (g.is_compound() && g.functor() == "true" && g.arity() == 0) continue;
      tell(sigma.apply(g), r);
      if (state_.failed()) return step;
    }
    std::vector<Term> body;
    for (const Term& b : r.body) {
      Term t = sigma.apply(b);
      Term shown = state_.builtin().normalize(t);
      if (is_builtin(t))
        step.tells.push_back(shown);
      else
        step.added.push_back(try_simplify(shown));
      body.push_back(std::move(t));
    }
    Frame f;
    f.items = std::move(body);
    f.rule = &r;
    stack_.push_back(std::move(f));
    return step;
  }

  void tell(const Term& c, const Rule& r) {
    std::vector<ConstraintId> woken;
    try {
      state_.tell(c, &woken);
    } catch (const Error& e) {
      throw Error(e.kind(),
                  "rule " + r.label() + ": " + e.what());
    }
    if (!state_.failed()) push_activations(std::move(woken));
  }

  void execute(const Term& item, const Rule* rule) {
    try {
      if (is_builtin(item)) {
        std::vector<ConstraintId> woken;
        state_.tell(item, &woken);
        if (!state_.failed()) push_activations(std::move(woken));
      } else {
        ConstraintId id = state_.add_user(item);
        push_activations({id});
      }
    } catch (const Error& e) {
      if (rule)
        throw Error(e.kind(),
                    "rule " + rule->label() + ": " + e.what());
      throw;
    }
  }

  State state_;
  const Program& program_;
  OccurrenceTable table_;
  std::vector<Frame> stack_;
};

}  // namespace

RunResult run_refined(std::span<const Term> goal, const Program& p,
                      std::size_t step_limit, const StepObserver& observer) {
  State s;
  std::vector<Var> vs = variables(goal);
  s.add_globals(vs);
  RefinedMachine m(std::move(s), p);
  m.push_body(std::vector<Term>(goal.begin(), goal.end()));
  return m.run(step_limit, observer);
}

RunResult run_refined_from(State s, const Program& p, std::size_t step_limit,
                           const StepObserver& observer) {
  std::vector<ConstraintId> ids;
  for (const auto& [id, t] : s.user()) ids.push_back(id);
  RefinedMachine m(std::move(s), p);
  m.push_activations(std::move(ids));
  return m.run(step_limit, observer);
}

}  // namespace chr
