#include <gtest/gtest.h>

#include <set>

#include "chr/parallel.hpp"
#include "chr/syntax.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace chr;

namespace {

State S(const char* goal) { return initial_state(parse_goal(goal)); }

std::vector<Term> prime_goal(int hi) {
  std::vector<Term> g;
  for (int k = 2; k <= hi; ++k) g.push_back(parse_term("prime(" + std::to_string(k) + ")"));
  return g;
}

}  // namespace

TEST(ConflictFree, RemovalsMustBeDisjoint) {
  RuleInstance a{0, {2}, {1}, {}};
  RuleInstance b{0, {4}, {3}, {}};
  RuleInstance c{0, {3}, {1}, {}};
  std::vector<RuleInstance> ab{a, b}, ac{a, c};
  EXPECT_TRUE(conflict_free(ab));
  EXPECT_FALSE(conflict_free(ac));
}

TEST(ConflictFree, KeepRemoveCycleRejected) {
  RuleInstance a{0, {1}, {2}, {}};
  RuleInstance b{0, {2}, {1}, {}};
  std::vector<RuleInstance> ab{a, b};
  EXPECT_FALSE(conflict_free(ab));
}

TEST(Select, TwoSimultaneousMinInstances) {
  Program p = support::corpus_program("min.chr");
  State s = S("min(5), min(3), min(9), min(7)");
  bool saw_two = false;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    ParallelStep step = select_parallel(s, p, 4, seed);
    EXPECT_TRUE(step.conflict_free);
    EXPECT_TRUE(conflict_free(step.instances));
    std::set<ConstraintId> removed;
    for (const auto& i : step.instances)
      for (ConstraintId id : i.removed_ids) EXPECT_TRUE(removed.insert(id).second);
    if (step.instances.size() >= 2) saw_two = true;
  }
  EXPECT_TRUE(saw_two);
}

TEST(Select, WidthOneIsSequential) {
  Program p = support::corpus_program("min.chr");
  State s = S("min(5), min(3), min(9)");
  ParallelStep step = select_parallel(s, p, 1, 4);
  ASSERT_EQ(step.instances.size(), 1u);
  ParallelResult r = run_parallel(parse_goal("min(5), min(3), min(9), min(7)"), p, 1, 2);
  EXPECT_EQ(r.rounds, r.run.trace.derivation_length());
  EXPECT_EQ(r.rounds, 3u);
}

TEST(Run, GcdMatchesSequential) {
  Program p = support::corpus_program("gcd_repaired.chr");
  auto goal = parse_goal("gcd(12), gcd(8)");
  RunResult seq = run_refined(goal, p);
  ParallelResult par = run_parallel(goal, p, 4, 1);
  EXPECT_TRUE(state_equiv(par.run.state, seq.state));
  EXPECT_TRUE(state_equiv(par.run.state, S("gcd(4)")));
}

TEST(Run, SieveAnyWidth) {
  Program p = support::corpus_program("primes.chr");
  std::string want;
  for (long long q : oracle::primes_upto(20))
    want += (want.empty() ? "" : ",") + ("prime(" + std::to_string(q) + ")");
  for (std::size_t w = 1; w <= 8; ++w) {
    ParallelResult r = run_parallel(prime_goal(20), p, w, w * 17);
    EXPECT_TRUE(state_equiv(r.run.state, S(want.c_str()))) << w;
    EXPECT_LE(r.rounds, r.instances);
  }
}

TEST(Run, RoundsSerialize) {
  Program p = support::corpus_program("primes.chr");
  std::size_t rounds = 0;
  run_parallel(prime_goal(20), p, 4, 9, kDefaultStepLimit,
               [&](const State& pre, const ParallelStep& step, const State& post) {
                 EXPECT_TRUE(serializable(pre, p, step, post));
                 ++rounds;
               });
  EXPECT_GT(rounds, 0u);
}

TEST(Run, WiderIsNotSlower) {
  Program p = support::corpus_program("primes.chr");
  ParallelResult narrow = run_parallel(prime_goal(31), p, 1, 0);
  ParallelResult wide = run_parallel(prime_goal(31), p, 8, 0);
  EXPECT_LE(wide.rounds, narrow.rounds);
  EXPECT_LE(wide.rounds, narrow.run.trace.derivation_length());
}

TEST(Run, ContradictoryTellsFail) {
  Program p = parse_program("a(X) <=> X = 1.\nb(X) <=> X = 2.");
  ParallelResult r = run_parallel(parse_goal("a(Y), b(Y)"), p, 2, 0);
  EXPECT_EQ(r.run.outcome, Outcome::Failed);
}
