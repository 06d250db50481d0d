#include "chr/engine.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace chr {

std::vector<ConstraintId> RuleInstance::ids() const {
  std::vector<ConstraintId> out = kept_ids;
  out.insert(out.end(), removed_ids.begin(), removed_ids.end());
  return out;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::NormalForm: return "normal-form";
    case Outcome::Failed: return "failed";
    case Outcome::StepLimit: return "step-limit";
    case Outcome::Error: return "error";
  }
  return "?";
}

namespace {

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += f(xs[i]);
  }
  return out;
}

}  // namespace

std::string format_step(std::size_t n, const TraceStep& s) {
  std::ostringstream os;
  os << "STEP " << n << ": " << s.rule << " removed=["
     << join(s.removed, [](ConstraintId i) { return std::to_string(i); })
     << "] added=[" << join(s.added, [](const Term& t) { return to_string(t); })
     << "] tells=[" << join(s.tells, [](const Term& t) { return to_string(t); })
     << "]";
  return os.str();
}

std::string format_trace(const Trace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.steps.size(); ++i)
    out += format_step(i + 1, trace.steps[i]) + "\n";
  return out;
}

// --- matching -----------------------------------------------------------------

namespace {

class InstanceSearch {
 public:
  InstanceSearch(const State& s, const Rule& r, std::size_t rule_index,
                 std::optional<std::pair<std::size_t, ConstraintId>> pinned,
                 std::size_t limit, std::vector<RuleInstance>& out)
      : state_(s), rule_(r), index_(rule_index), heads_(r.heads()),
        pinned_(pinned), limit_(limit), out_(out) {
    cands_.resize(heads_.size());
    for (std::size_t k = 0; k < heads_.size(); ++k) {
      const Term& h = heads_[k];
      if (pinned_ && pinned_->first == k) {
        const Term* t = s.find(pinned_->second);
        if (t && t->functor() == h.functor() && t->arity() == h.arity())
          cands_[k].push_back(pinned_->second);
        continue;
      }
      for (const auto& [id, t] : s.user())
        if (t.functor() == h.functor() && t.arity() == h.arity() &&
            !(pinned_ && pinned_->second == id))
          cands_[k].push_back(id);
    }
  }

  void run() {
    for (const auto& c : cands_)
      if (c.empty()) return;
    Substitution sigma;
    chosen_.clear();
    search(0, sigma);
  }

 private:
  bool search(std::size_t k, const Substitution& sigma) {
    if (out_.size() >= limit_) return true;
    if (k == heads_.size()) {
      accept(sigma);
      return out_.size() >= limit_;
    }
    for (ConstraintId id : cands_[k]) {
      if (std::find(chosen_.begin(), chosen_.end(), id) != chosen_.end()) continue;
      Substitution next = sigma;
      if (!match_into(heads_[k], *state_.find(id), next)) continue;
      chosen_.push_back(id);
      bool stop = search(k + 1, next);
      chosen_.pop_back();
      if (stop) return true;
    }
    return false;
  }

  void accept(const Substitution& sigma) {
    if (rule_.removed.empty() && state_.recorded(Token{index_, chosen_})) return;
    for (const Term& g : rule_.guard) {
      Term inst = sigma.apply(g);
      bool ok = false;
      try {
        ok = state_.builtin().ask(inst);
      } catch (const Error& e) {
        throw Error(ErrorKind::GuardEvaluation,
                    "rule " + rule_.label() + ": guard " + to_string(inst) + ": " +
                        e.what());
      }
      if (!ok) return;
    }
    RuleInstance ri;
    ri.rule = index_;
    ri.kept_ids.assign(chosen_.begin(), chosen_.begin() + static_cast<std::ptrdiff_t>(
                                                             rule_.kept.size()));
    ri.removed_ids.assign(
        chosen_.begin() + static_cast<std::ptrdiff_t>(rule_.kept.size()), chosen_.end());
    ri.matching = sigma;
    out_.push_back(std::move(ri));
  }

  const State& state_;
  const Rule& rule_;
  std::size_t index_;
  std::vector<Term> heads_;
  std::optional<std::pair<std::size_t, ConstraintId>> pinned_;
  std::size_t limit_;
  std::vector<RuleInstance>& out_;
  std::vector<std::vector<ConstraintId>> cands_;
  std::vector<ConstraintId> chosen_;
};

}  // namespace

std::vector<RuleInstance> rule_instances(
    const State& s, const Program& p, std::size_t rule,
    std::optional<std::pair<std::size_t, ConstraintId>> pinned, std::size_t limit) {
  std::vector<RuleInstance> out;
  if (s.failed()) return out;
  InstanceSearch(s, p.rules.at(rule), rule, pinned, limit, out).run();
  return out;
}

std::vector<RuleInstance> applicable_instances(const State& s, const Program& p) {
  std::vector<RuleInstance> out;
  if (s.failed()) return out;
  for (std::size_t r = 0; r < p.rules.size(); ++r)
    InstanceSearch(s, p.rules[r], r, std::nullopt, SIZE_MAX, out).run();
  return out;
}

// --- application --------------------------------------------------------------

Substitution extend_with_fresh(State& s, const Rule& r, Substitution matching) {
  std::vector<Term> local = r.guard;
  local.insert(local.end(), r.body.begin(), r.body.end());
  for (const Var& v : variables(local))
    if (!matching.contains(v)) matching.assign(v, s.fresh_var(v.name));
  return matching;
}

void apply_instance_in_place(State& s, const Program& p, const RuleInstance& inst,
                             TraceStep* step) {
  const Rule& r = p.rules.at(inst.rule);
  if (step) {
    step->rule = r.label();
    step->removed = inst.removed_ids;
  }
  try {
    for (ConstraintId id : inst.removed_ids) s.remove(id);
    s.record(Token{inst.rule, inst.ids()});
    Substitution sigma = extend_with_fresh(s, r, inst.matching);
    for (const Term& g : r.guard) {
      if (s.failed()) return;
      if (g.is_compound() && g.functor() == "true" && g.arity() == 0) continue;
      s.tell(sigma.apply(g));
    }
    for (const Term& b : r.body) {
      if (s.failed()) return;
      Term t = sigma.apply(b);
      if (is_builtin(t)) {
        if (step) step->tells.push_back(s.builtin().normalize(t));
        s.tell(t);
      } else {
        ConstraintId id = s.add_user(t);
        if (step) step->added.push_back(*s.find(id));
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::GuardEvaluation) throw;
    throw Error(e.kind(),
                "rule " + r.label() + ": " + e.what());
  }
}

State apply_instance(State s, const Program& p, const RuleInstance& inst,
                     TraceStep* step) {
  apply_instance_in_place(s, p, inst, step);
  return s;
}

// --- abstract execution ---------------------------------------------------------

namespace {

void set_error(RunResult& res, const Error& e) {
  res.outcome = Outcome::Error;
  res.message = e.what();
  res.error = e.kind();
}

}  // namespace

RunResult run_abstract(State s, const Program& p, std::uint64_t seed,
                       std::size_t step_limit, const StepObserver& observer) {
  RunResult res;
  std::mt19937_64 rng(seed);
  try {
    while (true) {
      if (s.failed()) {
        res.outcome = Outcome::Failed;
        break;
      }
      std::vector<RuleInstance> insts = applicable_instances(s, p);
      if (insts.empty()) {
        res.outcome = Outcome::NormalForm;
        break;
      }
      if (res.trace.steps.size() >= step_limit) {
        res.outcome = Outcome::StepLimit;
        break;
      }
      const RuleInstance& pick = insts[rng() % insts.size()];
      if (observer) observer(s, pick);
      TraceStep step;
      apply_instance_in_place(s, p, pick, &step);
      res.trace.steps.push_back(std::move(step));
    }
  } catch (const Error& e) {
    set_error(res, e);
  }
  res.state = std::move(s);
  return res;
}

// --- exhaustive exploration -----------------------------------------------------

ExhaustiveExplorer::ExhaustiveExplorer(State initial, const Program& p)
    : program_(p) {
  visit(initial);
  frontier_.push_back(std::move(initial));
}

bool ExhaustiveExplorer::visit(const State& s) {
  return visited_.insert(exploration_key(s)).second;
}

void ExhaustiveExplorer::add_normal_form(const State& s) {
  for (const State& t : normal_forms_)
    if (state_equiv(s, t)) return;
  normal_forms_.push_back(s);
}

void ExhaustiveExplorer::expand_one() {
  if (frontier_.empty()) return;
  State s = std::move(frontier_.front());
  frontier_.pop_front();
  ++explored_;
  if (s.failed()) {
    add_normal_form(s);
    return;
  }
  std::vector<RuleInstance> insts;
  try {
    insts = applicable_instances(s, program_);
  } catch (const Error& e) {
    errors_.push_back(e.what());
    return;
  }
  if (insts.empty()) {
    add_normal_form(s);
    return;
  }
  for (const RuleInstance& inst : insts) {
    try {
      State t = apply_instance(s, program_, inst);
      if (visit(t)) frontier_.push_back(std::move(t));
    } catch (const Error& e) {
      errors_.push_back(e.what());
    }
  }
}

void ExhaustiveExplorer::run(std::size_t bound) {
  while (!done() && explored_ < bound) expand_one();
}

ExhaustiveResult run_exhaustive(State s, const Program& p, std::size_t bound) {
  ExhaustiveExplorer ex(std::move(s), p);
  ex.run(bound);
  ExhaustiveResult res;
  res.normal_forms = ex.normal_forms();
  res.errors = ex.errors();
  res.complete = ex.done();
  res.explored = ex.explored();
  return res;
}

// --- interrupt / resume -----------------------------------------------------------

InterruptResult interrupt_resume(std::span<const Term> goal, const Program& p,
                                 std::size_t budget, Semantics semantics,
                                 std::uint64_t seed, std::size_t step_limit) {
  InterruptResult out;
  if (semantics == Semantics::Refined) {
    out.interrupted = run_refined(goal, p, budget);
    if (out.interrupted.outcome != Outcome::StepLimit) {
      out.resumed = out.interrupted;
      return out;
    }
    out.resumed = run_refined_from(out.interrupted.state, p, step_limit);
  } else {
    out.interrupted = run_abstract(initial_state(goal), p, seed, budget);
    if (out.interrupted.outcome != Outcome::StepLimit) {
      out.resumed = out.interrupted;
      return out;
    }
    out.resumed = run_abstract(out.interrupted.state, p, seed + 1, step_limit);
  }
  return out;
}

}  // namespace chr
