#include <gtest/gtest.h>

#include <random>

#include "chr/builtins.hpp"
#include "chr/error.hpp"
#include "chr/syntax.hpp"

using namespace chr;

namespace {

Term T(const char* s) { return parse_term(s); }

}  // namespace

TEST(Tell, Clash) {
  BuiltinStore s = BuiltinStore{}.tell(T("X=3")).tell(T("X=4"));
  EXPECT_FALSE(s.consistent());
}

TEST(Tell, ChainedBindings) {
  BuiltinStore s = BuiltinStore{}.tell(T("X=Y")).tell(T("Y=c"));
  ASSERT_TRUE(s.consistent());
  EXPECT_EQ(s.normalize(T("X")), T("c"));
  EXPECT_EQ(s.normalize(T("Y")), T("c"));
}

TEST(Tell, FalseComparisonFails) {
  EXPECT_FALSE(BuiltinStore{}.tell(T("0 > 4")).consistent());
  EXPECT_TRUE(BuiltinStore{}.tell(T("4 > 0")).consistent());
  EXPECT_FALSE(BuiltinStore{}.tell(T("1=2")).consistent());
}

TEST(Tell, NonGroundComparisonIsAnError) {
  try {
    BuiltinStore{}.tell(T("X > 1"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonGroundComparison);
  }
}

TEST(Tell, DivisionByZeroPropagates) {
  try {
    BuiltinStore{}.tell(T("X = 1/0"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivisionByZero);
  }
}

TEST(Tell, ArithmeticEquationWaitsForOperands) {
  BuiltinStore s = BuiltinStore{}.tell(T("M = M1+M2"));
  ASSERT_TRUE(s.consistent());
  s = s.tell(T("M1 = 2")).tell(T("M2 = 3"));
  EXPECT_EQ(s.normalize(T("M")), T("5"));
}

TEST(Ask, Entailment) {
  EXPECT_TRUE(BuiltinStore{}.ask(T("8 >= 8")));
  EXPECT_TRUE(BuiltinStore{}.tell(T("X=3")).ask(T("X > 1")));
  EXPECT_FALSE(BuiltinStore{}.ask(T("J > I")));
  EXPECT_TRUE(BuiltinStore{}.ask(T("X = X")));
  EXPECT_FALSE(BuiltinStore{}.ask(T("X = Y")));
  EXPECT_TRUE(BuiltinStore{}.tell(T("X=Y")).ask(T("X == Y")));
  EXPECT_TRUE(BuiltinStore{}.ask(T("a =/= b")));
  EXPECT_FALSE(BuiltinStore{}.ask(T("X =/= b")));
  EXPECT_TRUE(BuiltinStore{}.ask(T("true")));
  EXPECT_TRUE(BuiltinStore{}.ask(T("12 mod 4 = 0")));
}

TEST(Normalize, AppliesBindings) {
  BuiltinStore s = BuiltinStore{}.tell(T("X=Y"));
  Term n = s.normalize(T("c(X,Y)"));
  EXPECT_EQ(n.arg(0), n.arg(1));
  EXPECT_TRUE(BuiltinStore{}.consistent());
}

TEST(Properties, AskIsMonotone) {
  std::mt19937_64 rng(11);
  const char* vars[] = {"X", "Y", "Z"};
  auto rnd_eq = [&] {
    std::string rhs = rng() % 2 ? std::string(vars[rng() % 3]) : std::to_string(rng() % 3);
    return parse_term(std::string(vars[rng() % 3]) + " = " + rhs);
  };
  auto rnd_query = [&] {
    switch (rng() % 3) {
      case 0: return parse_term(std::string(vars[rng() % 3]) + " > " + std::to_string(rng() % 3));
      case 1: return parse_term(std::string(vars[rng() % 3]) + " == " + vars[rng() % 3]);
      default: return parse_term(std::string(vars[rng() % 3]) + " = " + std::to_string(rng() % 3));
    }
  };
  int checked = 0;
  for (int n = 0; n < 2000; ++n) {
    BuiltinStore s;
    for (int k = rng() % 3; k > 0; --k) s = s.tell(rnd_eq());
    if (!s.consistent()) continue;
    Term q = rnd_query();
    if (!s.ask(q)) continue;
    BuiltinStore t = s.tell(rnd_eq());
    if (!t.consistent()) continue;
    EXPECT_TRUE(t.ask(q)) << to_string(q);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Properties, TellCommutes) {
  std::mt19937_64 rng(12);
  const char* atoms[] = {"X", "Y", "Z", "a", "b", "1"};
  for (int n = 0; n < 2000; ++n) {
    Term a = parse_term(std::string(atoms[rng() % 6]) + " = " + atoms[rng() % 6]);
    Term b = parse_term(std::string(atoms[rng() % 6]) + " = " + atoms[rng() % 6]);
    BuiltinStore ab = BuiltinStore{}.tell(a).tell(b);
    BuiltinStore ba = BuiltinStore{}.tell(b).tell(a);
    ASSERT_EQ(ab.consistent(), ba.consistent());
    if (!ab.consistent()) continue;
    for (const char* v : {"X", "Y", "Z"})
      for (const char* w : {"X", "Y", "Z", "a", "b", "1"}) {
        Term q = parse_term(std::string(v) + " == " + w);
        EXPECT_EQ(ab.ask(q), ba.ask(q)) << to_string(a) << ", " << to_string(b);
      }
  }
}
