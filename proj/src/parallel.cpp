#include "chr/parallel.hpp"

#include <algorithm>
#include <set>

namespace chr {

namespace {

bool removes(const RuleInstance& a, ConstraintId id) {
  return std::find(a.removed_ids.begin(), a.removed_ids.end(), id) !=
         a.removed_ids.end();
}

// Edge a -> b when a keeps something b removes.
bool precedes(const RuleInstance& a, const RuleInstance& b) {
  for (ConstraintId id : a.kept_ids)
    if (removes(b, id)) return true;
  return false;
}

// Topological order of the precedence graph, or empty on a cycle.
std::vector<std::size_t> topo_order(std::span<const RuleInstance> xs) {
  std::size_t n = xs.size();
  std::vector<std::size_t> indeg(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && precedes(xs[a], xs[b])) ++indeg[b];
  std::vector<std::size_t> order;
  std::vector<bool> placed(n, false);
  while (order.size() < n) {
    std::size_t pick = n;
    for (std::size_t a = 0; a < n; ++a)
      if (!placed[a] && indeg[a] == 0) {
        pick = a;
        break;
      }
    if (pick == n) return {};
    placed[pick] = true;
    order.push_back(pick);
    for (std::size_t b = 0; b < n; ++b)
      if (b != pick && precedes(xs[pick], xs[b])) --indeg[b];
  }
  return order;
}

}  // namespace

bool conflict_free(std::span<const RuleInstance> instances) {
  std::set<ConstraintId> removed;
  for (const RuleInstance& i : instances)
    for (ConstraintId id : i.removed_ids)
      if (!removed.insert(id).second) return false;
  return instances.empty() || !topo_order(instances).empty();
}

ParallelStep select_parallel(const State& s, const Program& p, std::size_t width,
                             std::mt19937_64& rng) {
  std::vector<RuleInstance> all = applicable_instances(s, p);
  for (std::size_t i = all.size(); i > 1; --i) std::swap(all[i - 1], all[rng() % i]);
  // Removing instances go first, and nothing a chosen instance removes may
  // be used by another one in the same round. Filling rounds with
  // propagations over constraints that are being removed lets duplicates
  // reappear as fast as idempotence rules delete them.
  std::stable_partition(all.begin(), all.end(),
                        [](const RuleInstance& i) { return !i.removed_ids.empty(); });
  std::vector<RuleInstance> chosen;
  std::set<ConstraintId> removed, used;
  for (RuleInstance& cand : all) {
    if (chosen.size() >= width) break;
    auto in = [](const std::set<ConstraintId>& set) {
      return [&set](ConstraintId id) { return set.count(id) != 0; };
    };
    std::vector<ConstraintId> ids = cand.ids();
    if (std::any_of(ids.begin(), ids.end(), in(removed))) continue;
    if (std::any_of(cand.removed_ids.begin(), cand.removed_ids.end(), in(used))) continue;
    removed.insert(cand.removed_ids.begin(), cand.removed_ids.end());
    used.insert(ids.begin(), ids.end());
    chosen.push_back(std::move(cand));
  }
  ParallelStep step;
  for (std::size_t k : topo_order(chosen)) step.instances.push_back(chosen[k]);
  step.conflict_free = conflict_free(step.instances);
  return step;
}

ParallelStep select_parallel(const State& s, const Program& p, std::size_t width,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return select_parallel(s, p, width, rng);
}

State apply_parallel(State s, const Program& p, const ParallelStep& step, Trace* trace) {
  for (const RuleInstance& i : step.instances)
    for (ConstraintId id : i.removed_ids) s.remove(id);
  for (const RuleInstance& i : step.instances) {
    if (s.failed()) break;
    TraceStep ts;
    apply_instance_in_place(s, p, i, trace ? &ts : nullptr);
    if (trace) trace->steps.push_back(std::move(ts));
  }
  return s;
}

bool serializable(const State& pre, const Program& p, const ParallelStep& step,
                  const State& post) {
  State s = pre;
  for (const RuleInstance& i : step.instances) {
    if (s.failed()) break;
    std::vector<RuleInstance> here = applicable_instances(s, p);
    if (std::find(here.begin(), here.end(), i) == here.end()) return false;
    apply_instance_in_place(s, p, i);
  }
  return state_equiv(s, post);
}

ParallelResult run_parallel(std::span<const Term> goal, const Program& p,
                            std::size_t width, std::uint64_t seed,
                            std::size_t step_limit, const RoundObserver& observer) {
  ParallelResult res;
  std::mt19937_64 rng(seed);
  State s = initial_state(goal);
  try {
    while (true) {
      if (s.failed()) {
        res.run.outcome = Outcome::Failed;
        break;
      }
      if (res.instances >= step_limit) {
        res.run.outcome = applicable_instances(s, p).empty() ? Outcome::NormalForm
                                                             : Outcome::StepLimit;
        break;
      }
      ParallelStep step =
          select_parallel(s, p, std::min(width, step_limit - res.instances), rng);
      if (step.instances.empty()) {
        res.run.outcome = Outcome::NormalForm;
        break;
      }
      State next = apply_parallel(s, p, step, &res.run.trace);
      if (observer) observer(s, step, next);
      s = std::move(next);
      ++res.rounds;
      res.instances += step.instances.size();
    }
  } catch (const Error& e) {
    res.run.outcome = Outcome::Error;
    res.run.message = e.what();
    res.run.error = e.kind();
  }
  res.run.state = std::move(s);
  return res;
}

}  // namespace chr
