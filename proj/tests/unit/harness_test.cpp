#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "abeam/harness/driver.hpp"
#include "abeam/harness/stats.hpp"
#include "doctest.h"

using namespace abeam;
namespace fs = std::filesystem;

namespace {

const Ty L = Ty::int_list();

fs::path data_dir() {
  const char* d = std::getenv("ABEAM_DATA_DIR");
  return d ? fs::path(d) : fs::path("data");
}

std::vector<Task> motif_tasks(std::size_t n) {
  auto all = load_tasks_file(data_dir() / "tasks" / "loop_motif.tasks");
  all.resize(std::min(n, all.size()));
  return all;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("abeam_harness_" + name);
  fs::remove_all(p);
  return p;
}

// Small enough to run the whole loop in a few seconds.
RunConfig tiny_config(const fs::path& out) {
  RunConfig c;
  c.library = "toy";
  c.iterations = 2;
  c.output_dir = out.string();
  c.random_seed = 3;
  c.search.per_task_timeout = 0.3;
  c.search.restart_interval = 0.1;
  c.traces.episode_timeout = 0.05;
  c.traces.per_abstraction_bonus = 0.01;
  c.traces.max_weight = 5;
  c.traces.episodes = 2;
  c.traces.targets_per_episode = 3;
  c.traces.parallel_searches = 1;
  c.train.max_steps = 50;
  return c;
}

Corpus motif_corpus(const Library& toy) {
  const std::vector<std::string> in{"l"};
  Corpus c;
  c.push_back({"a", parse_term("(Loop l 0 (Len l) (lam (If (IsEven $0) (Double $0))))", toy.symbols(in)), {{"l", L}}});
  c.push_back({"b", parse_term("(Loop l 0 (Len l) (lam (If (IsEven $0) 3)))", toy.symbols(in)), {{"l", L}}});
  return c;
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

}  // namespace

// Reference values computed with scipy.stats (ttest_ind, t.ppf).
TEST_CASE("t-test and confidence intervals against reference values") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 3, 4, 5, 6};
  TTestResult r = t_test(a, b);
  CHECK(std::abs(r.t - (-1.0)) <= 1e-9);
  CHECK(std::abs(r.p - 0.34659350708733416) <= 1e-9);
  CHECK(r.df == 8);
  CHECK_FALSE(r.degenerate);

  const std::vector<double> c{0.53, 0.55, 0.51, 0.56, 0.54}, d{0.50, 0.52, 0.49, 0.51, 0.49};
  TTestResult s = t_test(c, d);
  CHECK(std::abs(s.t - 3.4641016151377544) <= 1e-9);
  CHECK(std::abs(s.p - 0.008516263370901278) <= 1e-9);

  CHECK(std::abs(ci95_half_width(a) - 1.9632431614775607) <= 1e-9);
  CHECK(std::abs(ci95_half_width(c) - 0.023883883880999872) <= 1e-9);
  CHECK(std::abs(ci95_half_width(std::vector<double>{0.2, 0.9}) - 4.447171657751233) <= 1e-9);

  // Swapping the samples flips t and keeps p.
  TTestResult back = t_test(b, a);
  CHECK(back.t == -r.t);
  CHECK(back.p == doctest::Approx(r.p).epsilon(1e-12));
}

TEST_CASE("degenerate statistics") {
  const std::vector<double> x{0.4, 0.4, 0.4};
  TTestResult same = t_test(x, x);
  CHECK(same.t == 0);
  CHECK(same.p == 1);
  CHECK_FALSE(same.degenerate);
  CHECK(ci95_half_width(x) == 0);

  TTestResult apart = t_test(x, std::vector<double>{0.6, 0.6});
  CHECK(apart.degenerate);
  CHECK(apart.p == 0);
  CHECK(std::isinf(apart.t));
  CHECK(apart.t < 0);

  // Elementwise-equal samples with spread.
  const std::vector<double> y{0.1, 0.5, 0.3};
  TTestResult eq = t_test(y, y);
  CHECK(eq.t == 0);
  CHECK(eq.p == doctest::Approx(1.0));

  CHECK_THROWS_AS(ci95_half_width(std::vector<double>{0.5}), std::invalid_argument);
  CHECK_THROWS_AS(t_test(std::vector<double>{0.5}, y), std::invalid_argument);
}

TEST_CASE("run config parsing") {
  RunConfig c = parse_run_config(
      "# comment\n"
      "iterations = 3\n"
      "mode = baseline\n"
      "search.timeout = inf\n"
      "search.beam_size = 7\n"
      "mining.max_arity = 2\n"
      "  seed=42  # trailing comment\n");
  CHECK(c.iterations == 3);
  CHECK(c.mode == RunMode::Baseline);
  CHECK(std::isinf(c.search.per_task_timeout));
  CHECK(c.search.beam_size == 7);
  CHECK(c.mining.max_arity == 2);
  CHECK(c.random_seed == 42);
  CHECK(c.trials == 5);
  CHECK(c.folds == 2);

  // Every key survives a format/parse round trip.
  const std::string text = format_run_config(c);
  RunConfig back = parse_run_config(text);
  CHECK(format_run_config(back) == text);
  for (const auto& k : config_keys()) CHECK(get_config_value(back, k) == get_config_value(c, k));

  CHECK_THROWS_AS(parse_run_config("frobnicate = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("iterations = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("iterations\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("mode = sometimes\n"), ConfigError);

  RunConfig bad;
  bad.iterations = 0;
  CHECK_FALSE(bad.validate().empty());
  bad = RunConfig{};
  bad.folds = 3;
  CHECK_FALSE(bad.validate().empty());
  bad = RunConfig{};
  bad.trials = 0;
  CHECK_FALSE(bad.validate().empty());
  CHECK(RunConfig{}.validate().empty());

  CHECK(resolve_library("toy").name() == "toy");
  CHECK_THROWS(resolve_library("/nonexistent/library.txt"));
}

TEST_CASE("fold split") {
  auto tasks = motif_tasks(30);
  REQUIRE(tasks.size() == 30);
  auto [a, b] = fold_split(tasks, 2, 1, 9);
  auto [c, d] = fold_split(tasks, 2, 2, 9);
  CHECK(a.size() == 15);
  CHECK(b.size() == 15);
  std::set<std::string> names;
  for (const auto& t : a) names.insert(t.name);
  for (const auto& t : b) names.insert(t.name);
  CHECK(names.size() == 30);
  // The second fold swaps the halves.
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].name == d[i].name);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b[i].name == c[i].name);
  // Order of the input does not matter.
  std::vector<Task> rev(tasks.rbegin(), tasks.rend());
  auto [ra, rb] = fold_split(rev, 2, 1, 9);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(ra[i].name == a[i].name);
  auto [all, same] = fold_split(tasks, 2, 0, 9);
  CHECK(all.size() == 30);
  CHECK(same.size() == 30);
  CHECK_THROWS_AS(fold_split(tasks, 2, 3, 9), ConfigError);
}

TEST_CASE("sleep on the loop motif gains the loop abstraction") {
  const Library toy = toy_loop_dsl();
  RunConfig cfg = tiny_config(scratch("sleep"));
  cfg.scorer = ScorerMode::Uniform;
  SleepResult s = run_sleep(motif_corpus(toy), toy, LinearScorer{}, cfg, 1);
  REQUIRE_FALSE(s.mining.abstractions.empty());
  CHECK(print_term(s.mining.abstractions.front().body) == "(lam2 (Loop $1 0 (Len $1) $0))");
  CHECK(s.library.version() == toy.version() + static_cast<int>(s.mining.abstractions.size()));
  CHECK(s.library.find("fn_1") != nullptr);
  CHECK_FALSE(s.traces.has_value());

  // Nothing to mine: the library stays, the scorer still trains.
  RunConfig lin = tiny_config(scratch("sleep2"));
  SleepResult none = run_sleep(Corpus{}, toy, LinearScorer{}, lin, 1);
  CHECK(libraries_equal(none.library, toy));
  CHECK(none.library.version() == toy.version());
  CHECK(none.traces_regenerated);
  REQUIRE(none.training.has_value());
  CHECK(none.training->steps > 0);

  // Baseline mode never mines, and reuses traces for an unchanged library.
  RunConfig base = lin;
  base.mode = RunMode::Baseline;
  SleepResult b = run_sleep(motif_corpus(toy), toy, LinearScorer{}, base, 2, &*none.traces);
  CHECK(b.mining.abstractions.empty());
  CHECK_FALSE(b.traces_regenerated);
  CHECK(save_traces(*b.traces) == save_traces(*none.traces));
}

TEST_CASE("iteration reports round trip and re-verify") {
  const Library toy = toy_loop_dsl();
  auto tasks = motif_tasks(4);
  WakeResult w;
  const std::vector<std::string> in{"l"};
  // Reference programs for the first tasks, as listed in the spec file.
  const char* programs[] = {"(Loop l 0 (Len l) (lam (If (IsEven $0) $0)))",
                            "(Loop l 0 (Len l) (lam (If (IsEven $0) (Double $0))))"};
  for (int i = 0; i < 2; ++i) {
    SolveResult r;
    r.solved = true;
    r.program = parse_term(programs[i], toy.symbols(in));
    r.weight = term_size(r.program);
    r.elapsed = 0.25 * (i + 1);
    r.candidates_evaluated = 100 * (i + 1);
    w.outcomes.push_back({tasks[i].name, r});
  }
  for (int i = 2; i < 4; ++i) {
    SolveResult r;
    r.elapsed = 1;
    r.restarts = 2;
    w.outcomes.push_back({tasks[i].name, r});
  }
  RunConfig cfg;
  IterationReport rep = make_iteration_report(1, cfg, toy, w, nullptr);
  CHECK(rep.solved() == 2);
  CHECK(verify_report(rep, tasks, toy, EvalLimits{}).empty());

  const std::string text = format_iteration_report(rep);
  IterationReport back = parse_iteration_report(text, toy, tasks);
  CHECK(format_iteration_report(back) == text);
  CHECK(back.solved() == 2);

  // A program that does not solve its task is reported.
  w.outcomes[0].result.program = parse_term("(Loop l 0 (Len l) (lam (If (IsEven $0) 1)))", toy.symbols(in));
  IterationReport wrong = make_iteration_report(1, cfg, toy, w, nullptr);
  auto problems = verify_report(wrong, tasks, toy, EvalLimits{});
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].find(tasks[0].name) != std::string::npos);
}

TEST_CASE("summaries, curves and plot data") {
  Library lib = toy_loop_dsl();
  Abstraction a;
  a.name = "fn_1";
  a.arity = 2;
  a.body = parse_term("(lam2 (Loop $1 0 (Len $1) $0))", lib.symbols());
  a.signature = Ty::arrow({L, Ty::arrow({Ty::integer()}, L)}, L);
  lib = extend_with_abstraction(lib, a);
  const std::vector<std::string> in{"l"};
  const char* bodies[] = {"(lam (If (IsEven $0) $0))", "(lam (If (IsEven $0) (Double $0)))", "(lam (If (IsEven $0) 3))"};

  // Three trials; every solution uses fn_1.
  std::vector<WakeResult> trials(3);
  for (int t = 0; t < 3; ++t) {
    for (int i = 0; i < 4; ++i) {
      SolveResult r;
      if (i <= t) {
        r.solved = true;
        r.program = parse_term(std::string("(fn_1 l ") + bodies[i % 3] + ")", lib.symbols(in));
      }
      r.elapsed = 0.5 * (i + 1) + 0.1 * t;
      r.candidates_evaluated = 10 * (i + 1) + t;
      trials[t].outcomes.push_back({"t" + std::to_string(i), r});
    }
  }
  ExperimentSummary s = summarize("ab", 4, lib, trials);
  CHECK(s.trials() == 3);
  CHECK(s.total_solved() == 1 + 2 + 3);
  CHECK(s.mean_rate() == doctest::Approx((0.25 + 0.5 + 0.75) / 3));
  REQUIRE(s.ci95());
  for (const auto& [len, row] : s.by_length) CHECK(row.with_abstraction == row.solved);
  for (std::size_t i = 1; i < s.time_curve.size(); ++i) {
    CHECK(s.time_curve[i].first > s.time_curve[i - 1].first);
    CHECK(s.time_curve[i].second >= s.time_curve[i - 1].second);
  }
  for (std::size_t i = 1; i < s.candidate_curve.size(); ++i) {
    CHECK(s.candidate_curve[i].first > s.candidate_curve[i - 1].first);
    CHECK(s.candidate_curve[i].second >= s.candidate_curve[i - 1].second);
  }
  CHECK(s.time_curve.back().second == doctest::Approx(2.0));

  // Identical trials give a zero-width interval.
  ExperimentSummary flat = summarize("flat", 4, lib, {trials[1], trials[1]});
  CHECK(*flat.ci95() == 0);

  CHECK(format_summary(parse_summary(format_summary(s))) == format_summary(s));

  const fs::path dir = scratch("plots");
  ExperimentSummary base = summarize("base", 4, toy_loop_dsl(), {trials[0], trials[0]});
  auto files = emit_plot_data(s, base, dir);
  REQUIRE(files.size() == 5);
  for (const auto& f : files) CHECK(fs::exists(f));

  // Per-length rows re-sum to the summary totals.
  std::ifstream usage(dir / "abstraction_usage.csv");
  std::string line;
  std::getline(usage, line);
  CHECK(line == "run,length,solutions,with_abstraction,fraction");
  int solved_ab = 0, with_ab = 0;
  while (std::getline(usage, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
    REQUIRE(f.size() == 5);
    if (f[0] != "ab") continue;
    solved_ab += std::stoi(f[2]);
    with_ab += std::stoi(f[3]);
    CHECK(f[4] == "1");
  }
  CHECK(solved_ab == s.total_solved());
  CHECK(with_ab == s.total_solved());

  const std::string sig = slurp(dir / "significance.csv");
  CHECK(sig.rfind("run_a,run_b,trials_a,trials_b,mean_a,ci95_a,mean_b,ci95_b,t,df,p,significant,degenerate\n", 0) == 0);
  CHECK(std::count(sig.begin(), sig.end(), '\n') == 2);

  // Empty summaries give header-only files.
  const fs::path empty_dir = scratch("plots_empty");
  auto empty = emit_plot_data(ExperimentSummary{}, ExperimentSummary{}, empty_dir);
  for (const auto& f : empty) {
    const std::string t = slurp(f);
    CHECK(std::count(t.begin(), t.end(), '\n') == 1);
  }
}

TEST_CASE("one iteration is one wake and one sleep") {
  const fs::path out = scratch("loop1");
  RunConfig cfg = tiny_config(out);
  cfg.iterations = 1;
  auto tasks = motif_tasks(3);
  LoopResult r = wake_sleep_loop(tasks, cfg);
  REQUIRE(r.reports.size() == 1);
  CHECK(r.best_iteration == 1);
  for (const char* f : {"library.txt", "scorer.txt", "mining.txt", "traces.txt", "library_after.txt",
                        "scorer_after.txt", "report.txt"})
    CHECK(fs::exists(out / "iter_001" / f));
  CHECK(fs::exists(out / "iter_000" / "scorer_after.txt"));
  CHECK_FALSE(fs::exists(out / "iter_002"));
  CHECK(fs::exists(out / "summary.txt"));
  CHECK(r.reports[0].outcomes.size() == 3);
}

TEST_CASE("resumed runs match uninterrupted ones") {
  auto tasks = motif_tasks(3);
  const fs::path full = scratch("full"), part = scratch("part");
  RunConfig a = tiny_config(full);
  LoopResult ra = wake_sleep_loop(tasks, a);

  RunConfig b = tiny_config(part);
  b.iterations = 1;
  wake_sleep_loop(tasks, b);
  b.iterations = 2;
  LoopResult rb = wake_sleep_loop(tasks, b);
  CHECK(rb.resumed_iterations == 1);
  for (int it = 1; it <= 2; ++it) {
    const auto rel = iteration_dir("", it);
    CHECK(slurp(full / rel / "report.txt") == slurp(part / rel / "report.txt"));
    CHECK(slurp(full / rel / "library_after.txt") == slurp(part / rel / "library_after.txt"));
    CHECK(slurp(full / rel / "scorer_after.txt") == slurp(part / rel / "scorer_after.txt"));
  }
  CHECK(slurp(full / "summary.txt") == slurp(part / "summary.txt"));

  // A different configuration refuses to reuse the directory.
  RunConfig c = tiny_config(part);
  c.random_seed = 4;
  CHECK_THROWS_AS(wake_sleep_loop(tasks, c), ConfigError);
}

TEST_CASE("seeds and abstraction usage") {
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(mix_seed(1, 2, 3) == mix_seed(1, 2, 3));
  CHECK(name_seed("loop_01") != name_seed("loop_02"));
  const Library toy = toy_loop_dsl();
  SleepResult s = [&] {
    RunConfig cfg;
    cfg.scorer = ScorerMode::Uniform;
    return run_sleep(motif_corpus(toy), toy, LinearScorer{}, cfg, 1);
  }();
  for (const auto& p : s.mining.corpus) CHECK(uses_abstraction(*p.program, s.library));
  for (const auto& p : motif_corpus(toy)) CHECK_FALSE(uses_abstraction(*p.program, s.library));
}
