#include "chr/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "chr/analysis.hpp"
#include "chr/corpus.hpp"
#include "chr/engine.hpp"
#include "chr/error.hpp"
#include "chr/parallel.hpp"

namespace chr {

namespace {

struct RunOptions {
  std::string program;
  std::string goal;
  std::string goal_file;
  bool refined = false;
  bool abstract = false;
  bool exhaustive = false;
  std::size_t parallel = 0;
  bool trace = false;
  std::uint64_t seed = 0;
  std::size_t steps = kDefaultStepLimit;
  std::size_t bound = 1000;
};

struct AnalyzeOptions {
  std::vector<std::string> programs;
  std::string ranking;
  std::string measure;
  std::size_t bound = 1000;
  int grid = 10;
  std::uint64_t seed = 0;
  std::size_t iterations = 25;
  std::size_t samples = 1000;
  std::size_t steps = kDefaultStepLimit;

  AnalysisOptions analysis() const {
    AnalysisOptions o;
    o.bound = bound;
    o.grid = grid;
    o.seed = seed;
    o.step_limit = steps;
    return o;
  }
};

std::uint64_t effective_seed(std::uint64_t flag) {
  if (const char* env = std::getenv("CHR_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Syntax, std::string("CHR_SEED is not a number: ") + env);
    }
  }
  return flag;
}

int exit_for(Outcome o) {
  switch (o) {
    case Outcome::NormalForm: return kExitNormalForm;
    case Outcome::Failed: return kExitFailed;
    case Outcome::StepLimit: return kExitStepLimit;
    case Outcome::Error: return kExitRuntimeError;
  }
  return kExitRuntimeError;
}

// Result of one `run`, shared by `chr run` and `chr corpus run-all`.
struct Execution {
  int code = 0;
  std::string answer;  // format_answer of the final state
  std::string report;  // everything printed to stdout
  std::string error;
};

Execution execute(const Program& p, const std::vector<Term>& goal, const RunOptions& o,
                  std::uint64_t seed) {
  Execution ex;
  std::ostringstream os;
  auto finish = [&](const RunResult& r) {
    if (o.trace) os << format_trace(r.trace);
    if (r.outcome == Outcome::Error) {
      ex.error = r.message;
    } else {
      if (r.outcome == Outcome::StepLimit)
        os << "STEP LIMIT: " << o.steps << "\n";
      ex.answer = format_answer(r.state);
      os << ex.answer;
    }
    ex.code = exit_for(r.outcome);
  };
  if (o.exhaustive) {
    ExhaustiveResult r = run_exhaustive(initial_state(goal), p, o.bound);
    for (std::size_t i = 0; i < r.normal_forms.size(); ++i) {
      os << "NORMAL FORM " << i + 1 << ":\n" << format_answer(r.normal_forms[i]);
      if (i == 0) ex.answer = format_answer(r.normal_forms[i]);
    }
    for (const auto& e : r.errors) os << "ERROR ON SOME PATH: " << e << "\n";
    os << "NORMAL FORMS=" << r.normal_forms.size()
       << " COMPLETE=" << (r.complete ? "yes" : "no") << "\n";
    bool all_failed = !r.normal_forms.empty() &&
                      std::all_of(r.normal_forms.begin(), r.normal_forms.end(),
                                  [](const State& s) { return s.failed(); });
    if (r.normal_forms.empty() && !r.errors.empty())
      ex.code = kExitRuntimeError;
    else if (!r.complete)
      ex.code = kExitStepLimit;
    else if (all_failed)
      ex.code = kExitFailed;
    else
      ex.code = kExitNormalForm;
  } else if (o.parallel > 0) {
    ParallelResult r = run_parallel(goal, p, o.parallel, seed, o.steps);
    os << "SEED=" << seed << "\n";
    os << "ROUNDS=" << r.rounds << " INSTANCES=" << r.instances << "\n";
    finish(r.run);
  } else if (o.abstract) {
    os << "SEED=" << seed << "\n";
    finish(run_abstract(initial_state(goal), p, seed, o.steps));
  } else {
    finish(run_refined(goal, p, o.steps));
  }
  ex.report = os.str();
  return ex;
}

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  Program p;
  std::vector<Term> goal;
  std::uint64_t seed = 0;
  try {
    p = load_program(o.program);
    std::string text = o.goal_file.empty() ? o.goal : read_file(o.goal_file);
    goal = parse_goal(text);
    seed = effective_seed(o.seed);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  Execution ex = execute(p, goal, o, seed);
  out << ex.report;
  if (!ex.error.empty()) err << "error: " << ex.error << "\n";
  return ex.code;
}

// --- analyze ------------------------------------------------------------------------

int verdict_exit(Verdict v) {
  return v == Verdict::Yes ? kExitPositive : v == Verdict::No ? kExitNegative : kExitUnknown;
}

int cmd_confluence(const AnalyzeOptions& o, std::ostream& out) {
  Program p = load_program(o.programs.at(0));
  ConfluenceReport r = check_confluence(p, o.analysis());
  out << "SEED=" << o.seed << "\n" << format_report(p, r);
  return verdict_exit(r.confluent);
}

int cmd_complete(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  Program p = load_program(o.programs.at(0));
  if (o.ranking.empty()) throw Error(ErrorKind::Io, "--ranking is required");
  RankingSpec rk = parse_ranking(read_file(o.ranking));
  try {
    CompletionResult r = complete(p, rk, o.iterations, o.analysis());
    out << "ITERATIONS=" << r.iterations << "\n";
    for (const auto& a : r.added) out << "ADDED: " << a << "\n";
    out << to_string(r.program);
    return kExitPositive;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::UnorientablePair) {
      err << "error: " << e.what() << "\n";
      return kExitNegative;
    }
    if (e.kind() == ErrorKind::IterationLimit) {
      err << "error: " << e.what() << "\n";
      return kExitUnknown;
    }
    throw;
  }
}

int cmd_equiv(const AnalyzeOptions& o, std::ostream& out) {
  if (o.programs.size() != 2) throw Error(ErrorKind::Io, "equiv needs two programs");
  Program p1 = load_program(o.programs[0]);
  Program p2 = load_program(o.programs[1]);
  EquivalenceReport r = check_operational_equivalence(p1, p2, o.analysis());
  out << "EQUIVALENT: " << to_string(r.equivalent) << "\n";
  if (!r.reason.empty()) out << "REASON: " << r.reason << "\n";
  if (r.equivalent == Verdict::No) {
    out << "WITNESS: " << format_answer_inline(*r.witness) << "\n";
    out << "FIRST: " << format_answer_inline(*r.nf1) << "\n";
    out << "SECOND: " << format_answer_inline(*r.nf2) << "\n";
  }
  return verdict_exit(r.equivalent);
}

int cmd_redundant(const AnalyzeOptions& o, std::ostream& out) {
  Program p = load_program(o.programs.at(0));
  auto r = find_redundant_rules(p, o.analysis());
  if (!r) {
    out << "REDUNDANT: unknown (program not known to be confluent)\n";
    return kExitUnknown;
  }
  out << "REDUNDANT:";
  if (r->empty()) out << " none";
  for (std::size_t i : *r) out << " " << p.rules[i].label();
  out << "\n";
  return kExitPositive;
}

int cmd_ranking(const AnalyzeOptions& o, std::ostream& out) {
  Program p = load_program(o.programs.at(0));
  if (o.ranking.empty()) throw Error(ErrorKind::Io, "--ranking is required");
  RankingSpec rk = parse_ranking(read_file(o.ranking));
  RankingReport r = verify_ranking(p, rk, o.samples, o.seed);
  out << "SEED=" << o.seed << "\n" << format_report(r);
  switch (r.verdict) {
    case RankingVerdict::Proved: return kExitPositive;
    case RankingVerdict::Refuted: return kExitNegative;
    case RankingVerdict::ProbabilisticPass: return kExitUnknown;
  }
  return kExitUnknown;
}

int cmd_complexity(const AnalyzeOptions& o, std::ostream& out) {
  Program p = load_program(o.programs.at(0));
  std::optional<std::size_t> d;
  if (!o.measure.empty()) {
    std::vector<Term> goal = parse_goal(o.measure);
    RunResult r = run_refined(goal, p, o.steps);
    if (r.outcome == Outcome::Error) throw Error(r.error.value_or(ErrorKind::Runtime), r.message);
    d = r.trace.derivation_length();
  }
  out << format_report(complexity_bound(p, d));
  return kExitPositive;
}

// --- corpus -------------------------------------------------------------------------

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

int cmd_corpus_list(const std::string& dir, std::ostream& out) {
  Manifest m = load_manifest(dir.empty() ? default_corpus_dir() : std::filesystem::path(dir));
  out << "PROGRAMS=" << m.programs.size() << "\n";
  for (const auto& g : m.programs) {
    out << g.group << ":";
    for (const auto& f : g.files) out << " " << f;
    out << "\n";
  }
  out << "FIXTURES=" << m.fixtures.size() << "\n";
  for (const auto& f : m.fixtures)
    out << "  " << f.name << " " << f.program << " exit=" << f.exit << "\n";
  return 0;
}

int cmd_corpus_run_all(const std::string& dir, std::size_t width, std::uint64_t seed,
                       std::ostream& out) {
  Manifest m = load_manifest(dir.empty() ? default_corpus_dir() : std::filesystem::path(dir));
  std::size_t passed = 0, failed = 0;
  for (const Fixture& f : m.fixtures) {
    RunOptions o;
    o.steps = f.steps ? f.steps : kDefaultStepLimit;
    if (width > 0 && f.confluent) o.parallel = width;
    std::string problem;
    int code = -1;
    try {
      Program p = load_program(m.dir / f.program);
      Execution ex = execute(p, parse_goal(f.goal), o, seed);
      code = ex.code;
      std::vector<std::string> got = lines(ex.answer);
      std::multiset<std::string> have(got.begin(), got.end());
      if (code != f.exit) problem = "exit " + std::to_string(code);
      for (const auto& e : f.expect)
        if (!have.count(e)) problem += (problem.empty() ? "" : "; ") + ("missing " + e);
      if (f.exact && problem.empty()) {
        std::multiset<std::string> want(f.expect.begin(), f.expect.end());
        if (want != have) problem = "unexpected extra answer lines";
      }
    } catch (const Error& e) {
      problem = e.what();
    }
    if (problem.empty()) {
      ++passed;
      out << "PASS " << f.name << " exit=" << code << "\n";
    } else {
      ++failed;
      out << "FAIL " << f.name << ": " << problem << "\n";
    }
  }
  out << "PASSED=" << passed << " FAILED=" << failed << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constraint Handling Rules interpreter and analyser", "chr"};
  app.require_subcommand(1);

  RunOptions ro;
  CLI::App* run = app.add_subcommand("run", "Run a goal against a program");
  run->add_option("program", ro.program, "Program file")->required();
  run->add_option("goal", ro.goal, "Goal, a comma-separated conjunction");
  run->add_option("--goal-file", ro.goal_file, "Read the goal from a file");
  auto* f_ref = run->add_flag("--refined", ro.refined, "Deterministic refined semantics (default)");
  auto* f_abs = run->add_flag("--abstract", ro.abstract, "Seeded random abstract semantics");
  auto* f_exh = run->add_flag("--exhaustive", ro.exhaustive, "All normal forms (bounded)");
  auto* f_par = run->add_option("--parallel", ro.parallel, "Parallel rounds of this width")
                    ->check(CLI::PositiveNumber);
  f_ref->excludes(f_abs)->excludes(f_exh)->excludes(f_par);
  f_abs->excludes(f_exh)->excludes(f_par);
  f_exh->excludes(f_par);
  run->add_flag("--trace", ro.trace, "Print one line per rule application");
  run->add_option("--seed", ro.seed, "Random seed (CHR_SEED overrides)");
  run->add_option("--steps", ro.steps, "Step limit")->check(CLI::PositiveNumber);
  run->add_option("--bound", ro.bound, "State bound for --exhaustive")
      ->check(CLI::PositiveNumber);

  AnalyzeOptions ao;
  CLI::App* analyze = app.add_subcommand("analyze", "Static analyses");
  analyze->require_subcommand(1);
  auto common = [&](CLI::App* c, const std::string& what) {
    c->add_option("programs", ao.programs, what)->required();
    c->add_option("--bound", ao.bound, "States explored per side")->check(CLI::PositiveNumber);
    c->add_option("--grid", ao.grid, "Numeric guard variables range over -grid..grid")
        ->check(CLI::PositiveNumber);
    c->add_option("--seed", ao.seed, "Random seed (CHR_SEED overrides)");
    c->add_option("--steps", ao.steps, "Step limit")->check(CLI::PositiveNumber);
    return c;
  };
  CLI::App* a_conf = common(analyze->add_subcommand("confluence", "Critical-pair confluence test"),
                            "Program file");
  CLI::App* a_comp = common(analyze->add_subcommand("complete", "Completion"), "Program file");
  a_comp->add_option("--ranking", ao.ranking, "Ranking file orienting new rules");
  a_comp->add_option("--iterations", ao.iterations, "Iteration limit")
      ->check(CLI::PositiveNumber);
  CLI::App* a_eq = common(analyze->add_subcommand("equiv", "Operational equivalence"),
                          "Two program files");
  CLI::App* a_red = common(analyze->add_subcommand("redundant", "Redundant rules"),
                           "Program file");
  CLI::App* a_rank = common(analyze->add_subcommand("ranking", "Termination by ranking"),
                            "Program file");
  a_rank->add_option("--ranking", ao.ranking, "Ranking file")->required();
  a_rank->add_option("--samples", ao.samples, "Samples for refutation")
      ->check(CLI::PositiveNumber);
  CLI::App* a_cx = common(analyze->add_subcommand("complexity", "Meta-complexity bound"),
                          "Program file");
  a_cx->add_option("--measure", ao.measure, "Goal whose derivation length gives D");

  std::string corpus_dir;
  std::size_t corpus_width = 0;
  std::uint64_t corpus_seed = 0;
  CLI::App* corpus = app.add_subcommand("corpus", "Bundled example programs");
  corpus->require_subcommand(1);
  corpus->add_option("--dir", corpus_dir, "Corpus directory");
  CLI::App* c_list = corpus->add_subcommand("list", "List programs and fixtures");
  CLI::App* c_run = corpus->add_subcommand("run-all", "Run every fixture");
  c_run->add_option("--parallel", corpus_width, "Run confluent fixtures in parallel rounds")
      ->check(CLI::PositiveNumber);
  c_run->add_option("--seed", corpus_seed, "Random seed (CHR_SEED overrides)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (run->parsed()) return cmd_run(ro, out, err);
    if (analyze->parsed()) {
      ao.seed = effective_seed(ao.seed);
      try {
        if (a_conf->parsed()) return cmd_confluence(ao, out);
        if (a_comp->parsed()) return cmd_complete(ao, out, err);
        if (a_eq->parsed()) return cmd_equiv(ao, out);
        if (a_red->parsed()) return cmd_redundant(ao, out);
        if (a_rank->parsed()) return cmd_ranking(ao, out);
        if (a_cx->parsed()) return cmd_complexity(ao, out);
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        bool input = e.kind() == ErrorKind::Syntax || e.kind() == ErrorKind::Io ||
                     e.kind() == ErrorKind::ArityClash || e.kind() == ErrorKind::BuiltinInHead;
        return input ? int{kExitInputError} : int{kExitUnknown};
      }
    }
    if (corpus->parsed()) {
      if (c_list->parsed()) return cmd_corpus_list(corpus_dir, out);
      if (c_run->parsed())
        return cmd_corpus_run_all(corpus_dir, corpus_width, effective_seed(corpus_seed), out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace chr
