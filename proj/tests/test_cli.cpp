#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "chr/cli.hpp"
#include "chr/corpus.hpp"

namespace {

struct Out {
  int code;
  std::string out, err;
};

Out cli(std::vector<std::string> args) {
  std::ostringstream o, e;
  int code = chr::run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

std::string corpus(const std::string& f) { return (chr::default_corpus_dir() / f).string(); }

}  // namespace

TEST(CliRun, PartialOrder) {
  Out r = cli({"run", corpus("leq.chr"), "leq(A,B), leq(B,C), leq(C,A)"});
  EXPECT_EQ(r.code, chr::kExitNormalForm);
  EXPECT_EQ(r.out, "A = B\nB = C\n");
}

TEST(CliRun, ExitCodes) {
  EXPECT_EQ(cli({"run", corpus("gcd_literal.chr"), "gcd(8), gcd(8)"}).code,
            chr::kExitRuntimeError);
  EXPECT_EQ(cli({"run", corpus("min.chr"), "min(1), 1 = 2"}).code, chr::kExitFailed);
  EXPECT_EQ(cli({"run", corpus("fib_bottomup.chr"), "fibstart", "--steps", "5"}).code,
            chr::kExitStepLimit);
  EXPECT_EQ(cli({"run", corpus("min.chr"), "min(1"}).code, chr::kExitInputError);
  EXPECT_EQ(cli({"run", "/nonexistent.chr", "p"}).code, chr::kExitInputError);
  EXPECT_EQ(cli({"run"}).code, chr::kExitInputError);
  EXPECT_EQ(cli({"run", corpus("min.chr"), "--abstract", "--exhaustive"}).code,
            chr::kExitInputError);
}

TEST(CliRun, DivisionByZeroDiagnostic) {
  Out r = cli({"run", corpus("gcd_literal.chr"), "gcd(8), gcd(8)"});
  EXPECT_NE(r.err.find("division by zero"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("rule r1"), std::string::npos) << r.err;
}

TEST(CliRun, Sqrt) {
  Out r = cli({"run", corpus("sqrt.chr"), "eps(1/1000000), sqrt(2,2)"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sqrt(2,665857/470832)"), std::string::npos) << r.out;
}

TEST(CliRun, TraceAndModes) {
  Out t = cli({"run", corpus("min.chr"), "min(2), min(1)", "--trace"});
  EXPECT_EQ(t.out, "STEP 1: r1 removed=[1] added=[] tells=[]\nmin(1)\n");
  Out a = cli({"run", corpus("min.chr"), "min(2), min(1)", "--abstract", "--seed", "5"});
  EXPECT_EQ(a.out, "SEED=5\nmin(1)\n");
  Out p = cli({"run", corpus("min.chr"), "min(2), min(1), min(3)", "--parallel", "2"});
  EXPECT_NE(p.out.find("ROUNDS="), std::string::npos);
  EXPECT_NE(p.out.find("SEED=0"), std::string::npos);
  Out x = cli({"run", corpus("pq_conflict.chr"), "p", "--exhaustive"});
  EXPECT_NE(x.out.find("NORMAL FORMS=2 COMPLETE=yes"), std::string::npos) << x.out;
}

TEST(CliRun, GoalFile) {
  std::string path = ::testing::TempDir() + "goal.txt";
  std::ofstream(path) << "min(4), min(2)\n";
  Out r = cli({"run", corpus("min.chr"), "--goal-file", path});
  EXPECT_EQ(r.out, "min(2)\n");
}

TEST(CliRun, SeedFromEnvironment) {
  ::setenv("CHR_SEED", "42", 1);
  Out r = cli({"run", corpus("min.chr"), "min(2), min(1)", "--abstract", "--seed", "5"});
  ::unsetenv("CHR_SEED");
  EXPECT_EQ(r.out.rfind("SEED=42\n", 0), 0u) << r.out;
}

TEST(CliAnalyze, ExitCodes) {
  EXPECT_EQ(cli({"analyze", "confluence", corpus("leq.chr")}).code, chr::kExitPositive);
  EXPECT_EQ(cli({"analyze", "confluence", corpus("pq_conflict.chr")}).code, chr::kExitNegative);
  EXPECT_EQ(cli({"analyze", "confluence", corpus("gcd_literal.chr")}).code, chr::kExitUnknown);
  Out eq = cli({"analyze", "equiv", corpus("min.chr"), corpus("min_ge.chr")});
  EXPECT_EQ(eq.code, chr::kExitNegative);
  EXPECT_NE(eq.out.find("WITNESS: min(0), min(0)"), std::string::npos) << eq.out;
  EXPECT_EQ(cli({"analyze", "ranking", corpus("min.chr"), "--ranking", corpus("min.rank")}).code,
            chr::kExitPositive);
  EXPECT_EQ(cli({"analyze", "ranking", corpus("fib_bottomup.chr"), "--ranking",
                 corpus("fib_bottomup.rank")})
                .code,
            chr::kExitNegative);
  EXPECT_EQ(cli({"analyze", "redundant", corpus("pq_conflict.chr")}).code, chr::kExitUnknown);
  EXPECT_EQ(cli({"analyze", "confluence", "/nonexistent.chr"}).code, chr::kExitInputError);
}

TEST(CliAnalyze, Complete) {
  Out c = cli({"analyze", "complete", corpus("pq_conflict.chr"), "--ranking",
               corpus("pq_conflict.rank")});
  EXPECT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("ADDED: q <=> r."), std::string::npos) << c.out;
}

TEST(CliAnalyze, Complexity) {
  Out c = cli({"analyze", "complexity", corpus("cyk.chr"), "--measure",
               "s->np*vp, np->det*n, vp->v*np, det->the, n->dog, v->chased, "
               "arc(0,1,the), arc(1,2,dog), arc(2,3,chased), arc(3,4,the), arc(4,5,dog)"});
  EXPECT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("h=3\n"), std::string::npos);
  EXPECT_NE(c.out.find("bound: O(D^3)\n"), std::string::npos);
  EXPECT_NE(c.out.find("D^h="), std::string::npos);
}

TEST(CliCorpus, ListAndRunAll) {
  Out l = cli({"corpus", "list"});
  EXPECT_EQ(l.out.rfind("PROGRAMS=11\n", 0), 0u);
  Out r = cli({"corpus", "run-all"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("FAILED=0"), std::string::npos);
  Out p = cli({"corpus", "run-all", "--parallel", "4"});
  EXPECT_EQ(p.code, 0) << p.out;
}

TEST(CliDeterminism, RepeatedRunsIdentical) {
  std::vector<std::vector<std::string>> cmds{
      {"run", corpus("primes.chr"), "prime(2),prime(3),prime(4),prime(6),prime(9)", "--abstract",
       "--seed", "3"},
      {"run", corpus("primes.chr"), "prime(2),prime(3),prime(4),prime(6),prime(9)", "--parallel",
       "3", "--seed", "7", "--trace"},
      {"analyze", "confluence", corpus("min_hybrid.chr"), "--seed", "9"},
  };
  for (const auto& c : cmds) EXPECT_EQ(cli(c).out, cli(c).out);
}
