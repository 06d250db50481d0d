#pragma once
// Shared helpers for the unit, property and acceptance tests.

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "chr/corpus.hpp"
#include "chr/engine.hpp"
#include "chr/syntax.hpp"

namespace support {

inline chr::Program corpus_program(const std::string& file) {
  return chr::load_program(chr::default_corpus_dir() / file);
}

inline std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& g : chr::load_manifest(chr::default_corpus_dir()).programs)
    for (const auto& f : g.files) out.push_back(f);
  return out;
}

using Rng = std::mt19937_64;

inline long long pick(Rng& rng, long long lo, long long hi) {
  return lo + static_cast<long long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Random goal text over a program's constraint symbols, sized 1..max_size,
/// with argument domains that keep the program terminating and error-free.
using GoalGen = std::function<std::string(Rng&, int max_size)>;

inline std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
  return out;
}

inline const std::map<std::string, GoalGen>& generators() {
  static const std::map<std::string, GoalGen> gens = [] {
    std::map<std::string, GoalGen> g;
    auto numbers = [](std::string functor, long long lo, long long hi) {
      return [=](Rng& rng, int max) {
        std::vector<std::string> cs;
        for (long long n = pick(rng, 1, max); n > 0; --n)
          cs.push_back(functor + "(" + std::to_string(pick(rng, lo, hi)) + ")");
        return join(cs);
      };
    };
    g["leq.chr"] = [](Rng& rng, int max) {
      const char* vs[] = {"A", "B", "C", "D"};
      std::vector<std::string> cs;
      for (long long n = pick(rng, 1, std::min(max, 5)); n > 0; --n)
        cs.push_back(std::string("leq(") + vs[rng() % 4] + "," + vs[rng() % 4] + ")");
      return join(cs);
    };
    g["min.chr"] = numbers("min", 0, 9);
    g["min_ge.chr"] = numbers("min", 0, 9);
    g["min_hybrid.chr"] = numbers("min", 0, 9);
    g["gcd_literal.chr"] = numbers("gcd", 1, 30);
    g["gcd_repaired.chr"] = numbers("gcd", 0, 30);
    g["primes.chr"] = numbers("prime", 2, 30);
    g["array_sort.chr"] = [](Rng& rng, int max) {
      std::vector<std::string> cs;
      std::vector<int> idx{0, 1, 2, 3, 4, 5};
      std::shuffle(idx.begin(), idx.end(), rng);
      for (long long n = pick(rng, 1, std::min(max, 6)); n > 0; --n)
        cs.push_back("a(" + std::to_string(idx[n - 1]) + "," + std::to_string(pick(rng, 0, 9)) +
                     ")");
      return join(cs);
    };
    g["merge_sort.chr"] = [](Rng& rng, int max) {
      std::vector<int> vs;
      for (int v = 1; v <= 20; ++v) vs.push_back(v);
      std::shuffle(vs.begin(), vs.end(), rng);
      std::vector<std::string> cs;
      for (long long n = pick(rng, 1, max); n > 0; --n)
        cs.push_back("next(0," + std::to_string(vs[n - 1]) + ")");
      return join(cs);
    };
    g["sqrt.chr"] = [](Rng& rng, int max) {
      std::vector<std::string> cs{"eps(1/100)"};
      for (long long n = pick(rng, 1, std::max(1, std::min(max - 1, 2))); n > 0; --n) {
        std::string x = std::to_string(pick(rng, 1, 9));
        cs.push_back("sqrt(" + x + "," + x + ")");
      }
      return join(cs);
    };
    auto fib_calls = [](Rng& rng, int max) {
      std::vector<std::string> cs;
      for (long long n = pick(rng, 1, std::min(max, 3)); n > 0; --n)
        cs.push_back("fib(" + std::to_string(pick(rng, 0, 6)) + ",M" + std::to_string(n) + ")");
      return join(cs);
    };
    g["fib_topdown.chr"] = fib_calls;
    g["fib_memo.chr"] = fib_calls;
    g["fib_bottomup.chr"] = [](Rng&, int) { return std::string("fibstart"); };
    g["fib_bottomup_term.chr"] = [](Rng& rng, int) {
      return "fibmax(" + std::to_string(pick(rng, 1, 6)) + ")";
    };
    g["paths.chr"] = [](Rng& rng, int max) {
      // acyclic: arcs only go from a lower to a higher node
      const char* nodes[] = {"a", "b", "c", "d"};
      std::vector<std::string> cs;
      for (long long n = pick(rng, 1, std::min(max, 5)); n > 0; --n) {
        long long i = pick(rng, 0, 2), j = pick(rng, i + 1, 3);
        cs.push_back(std::string("arc(") + nodes[i] + "," + nodes[j] + "," +
                     std::to_string(pick(rng, 1, 5)) + ")");
      }
      return join(cs);
    };
    g["cyk.chr"] = [](Rng& rng, int max) {
      std::vector<std::string> cs{"s->np*vp", "np->det*n", "vp->v*np", "det->the",
                                  "n->dog",   "n->cat",    "v->chased"};
      const char* words[] = {"the", "dog", "cat", "chased"};
      for (long long i = 0, n = pick(rng, 1, std::min(max, 5)); i < n; ++i)
        cs.push_back("arc(" + std::to_string(i) + "," + std::to_string(i + 1) + "," +
                     words[rng() % 4] + ")");
      return join(cs);
    };
    g["bool_and.chr"] = [](Rng& rng, int max) {
      const char* vals[] = {"0", "1", "A", "B", "C"};
      std::vector<std::string> cs;
      for (long long n = pick(rng, 1, std::min(max, 3)); n > 0; --n)
        cs.push_back(std::string("and(") + vals[rng() % 5] + "," + vals[rng() % 5] + "," +
                     vals[rng() % 5] + ")");
      if (rng() % 3 == 0) cs.push_back(std::string(vals[2 + rng() % 3]) + "=" + vals[rng() % 2]);
      return join(cs);
    };
    return g;
  }();
  return gens;
}

inline std::vector<chr::Term> random_goal(const std::string& file, Rng& rng, int max_size) {
  return chr::parse_goal(generators().at(file)(rng, max_size));
}

}  // namespace support
