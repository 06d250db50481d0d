#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "chr/engine.hpp"

namespace chr {

/// Instances applied together in one round. Each store id is removed by at
/// most one instance; an instance that keeps a constraint is ordered before
/// the instance removing it, so `instances` is also a valid sequential order.
struct ParallelStep {
  std::vector<RuleInstance> instances;
  bool conflict_free = true;
};

/// True when no id is removed twice and the keep-before-remove precedence
/// between the instances is acyclic.
bool conflict_free(std::span<const RuleInstance> instances);

/// Greedy selection of up to `width` instances in seeded random order,
/// instances that remove constraints before pure propagations. A chosen
/// instance's removed constraints are not matched by any other chosen one;
/// kept constraints may be shared.
ParallelStep select_parallel(const State& s, const Program& p, std::size_t width,
                             std::mt19937_64& rng);
ParallelStep select_parallel(const State& s, const Program& p, std::size_t width,
                             std::uint64_t seed);

/// All removals first, then guards and bodies in selection order. Each
/// applied instance is appended to `trace` when given.
State apply_parallel(State s, const Program& p, const ParallelStep& step,
                     Trace* trace = nullptr);

/// Replays the round one instance at a time, checking each is applicable
/// when its turn comes, and compares the outcome with `post`.
bool serializable(const State& pre, const Program& p, const ParallelStep& step,
                  const State& post);

struct ParallelResult {
  RunResult run;
  std::size_t rounds = 0;
  std::size_t instances = 0;
};

using RoundObserver =
    std::function<void(const State& pre, const ParallelStep& step, const State& post)>;

/// `step_limit` bounds the total number of applied instances.
ParallelResult run_parallel(std::span<const Term> goal, const Program& p,
                            std::size_t width, std::uint64_t seed,
                            std::size_t step_limit = kDefaultStepLimit,
                            const RoundObserver& observer = {});

}  // namespace chr
