#include <algorithm>

#include "chr/analysis.hpp"

namespace chr {

Program without_rule(const Program& p, std::size_t index) {
  std::vector<Rule> rules;
  for (std::size_t i = 0; i < p.rules.size(); ++i)
    if (i != index) rules.push_back(p.rules[i]);
  return make_program(std::move(rules));
}

namespace {

bool same_rules(const Program& a, const Program& b) {
  if (a.rules.size() != b.rules.size()) return false;
  std::vector<bool> used(b.rules.size(), false);
  for (const Rule& r : a.rules) {
    bool found = false;
    for (std::size_t j = 0; j < b.rules.size() && !found; ++j)
      if (!used[j] && b.rules[j] == r) found = used[j] = true;
    if (!found) return false;
  }
  return true;
}

EquivalenceReport compare_minimal_states(const Program& p1, const Program& p2,
                                         const AnalysisOptions& opt) {
  EquivalenceReport rep;
  rep.equivalent = Verdict::Yes;
  std::vector<const Rule*> rules;
  for (const Rule& r : p1.rules) rules.push_back(&r);
  for (const Rule& r : p2.rules) rules.push_back(&r);
  for (const Rule* r : rules) {
    for (const State& s : instantiate(minimal_state(*r), opt)) {
      RunResult a = run_refined_from(s, p1, opt.step_limit);
      RunResult b = run_refined_from(s, p2, opt.step_limit);
      auto final = [](const RunResult& x) {
        return x.outcome == Outcome::NormalForm || x.outcome == Outcome::Failed;
      };
      if (!final(a) || !final(b)) {
        rep.equivalent = Verdict::Unknown;
        rep.reason = "minimal state of rule " + r->label() + " did not reach a normal form";
        rep.witness = s;
        continue;
      }
      if (!state_equiv(a.state, b.state)) {
        rep.equivalent = Verdict::No;
        rep.reason = "minimal state of rule " + r->label() + " distinguishes the programs";
        rep.witness = s;
        rep.nf1 = a.state;
        rep.nf2 = b.state;
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace

EquivalenceReport check_operational_equivalence(const Program& p1, const Program& p2,
                                                const AnalysisOptions& opt) {
  if (same_rules(p1, p2)) {
    EquivalenceReport rep;
    rep.equivalent = Verdict::Yes;
    rep.reason = "identical rule sets";
    return rep;
  }
  AnalysisOptions quick = opt;
  quick.stop_early = true;
  for (const Program* p : {&p1, &p2}) {
    Verdict c = check_confluence(*p, quick).confluent;
    if (c != Verdict::Yes) {
      EquivalenceReport rep;
      rep.reason = std::string("refused: ") + (p == &p1 ? "first" : "second") +
                   " program is not known to be confluent (" + std::string(to_string(c)) +
                   ")";
      return rep;
    }
  }
  return compare_minimal_states(p1, p2, opt);
}

std::optional<std::vector<std::size_t>> find_redundant_rules(const Program& p,
                                                             const AnalysisOptions& opt) {
  std::vector<std::size_t> out;
  AnalysisOptions quick = opt;
  quick.stop_early = true;
  if (check_confluence(p, quick).confluent != Verdict::Yes) return std::nullopt;
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    Program q = without_rule(p, i);
    // the minimal-state comparison is cheap and usually decides; confluence
    // of the reduced program is only needed to confirm a Yes
    if (compare_minimal_states(p, q, opt).equivalent != Verdict::Yes) continue;
    if (check_confluence(q, quick).confluent == Verdict::Yes) out.push_back(i);
  }
  return out;
}

}  // namespace chr
