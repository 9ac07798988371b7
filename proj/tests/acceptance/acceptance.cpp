// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.
//
//   acceptance --abeam <cli> --data <data dir> --config <micro-domain config> --work <scratch dir>
//              [--report <file>]

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "abeam/harness/driver.hpp"
#include "abeam/harness/stats.hpp"
#include "abeam/synth/sampler.hpp"
#include "support/brute_miner.hpp"
#include "support/oracle_tasks.hpp"
#include "support/signatures.hpp"

using namespace abeam;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and limits.
constexpr double kStatsTolerance = 1e-9;
constexpr double kChiSquareMinP = 0.01;
constexpr int kMinImprovement = 3;
constexpr double kOracleSeconds = 60;
constexpr double kWorkedExampleSeconds = 30;
constexpr double kMinerSeconds = 120;
constexpr double kSamplerSeconds = 60;
constexpr double kMicroDomainSeconds = 15 * 60;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;
std::ofstream report_file;

void say(const std::string& line) {
  std::cout << line << std::endl;
  if (report_file) report_file << line << std::endl;
}

void report(int id, const std::string& name, const Outcome& o) {
  say(std::string(o.pass ? "PASS" : "FAIL") + " " + std::to_string(id) + " " + name + ": " + o.detail);
  if (!o.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double x, int digits = 1) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << x;
  return os.str();
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const Library lib = testing::six_op_dsl();
  UniformScorer uni;
  SearchConfig cfg;
  cfg.beam_size = 0;
  cfg.max_weight = 5;
  cfg.restart_interval = 0;
  cfg.per_task_timeout = std::numeric_limits<double>::infinity();
  cfg.stop_on_solution = false;
  int agree = 0, solved = 0;
  const int n = 50;
  for (int i = 0; i < n; ++i) {
    Task t = testing::random_oracle_task(1000 + i, lib);
    std::optional<ValueStore> st;
    SolveResult r = search(t, lib, uni, cfg, &st);
    ExhaustiveResult ex = exhaustive_search(t, lib, cfg.max_weight);
    const bool same = r.solved == (ex.solution != nullptr) &&
                      testing::signature_set(*st) == testing::signature_set(ex.store);
    agree += same;
    solved += r.solved;
  }
  const double secs = seconds_since(t0);
  return {agree == n && secs <= kOracleSeconds,
          std::to_string(agree) + "/" + std::to_string(n) + " tasks identical (" + std::to_string(solved) +
              " solved), " + fixed(secs) + " s"};
}

Outcome worked_example() {
  const auto t0 = std::chrono::steady_clock::now();
  const Library toy = toy_loop_dsl();
  const std::uint64_t combos = syntactic_combinations(toy, 8);

  const std::vector<std::string> in{"l"};
  const TypeMap types{{"l", Ty::int_list()}};
  Corpus corpus{{"double-evens", parse_term("(Loop l 0 (Len l) (lam (If (IsEven $0) (Double $0))))", toy.symbols(in)),
                 types},
                {"evens-of-doubles", parse_term("(Loop l 0 (Len l) (lam (If (IsEven (Double $0)) $0)))", toy.symbols(in)),
                 types}};
  MiningConfig mc;
  mc.max_rounds = 1;
  MineResult m = mine(corpus, toy, mc, 1);
  if (m.abstractions.empty()) return {false, "no abstraction mined"};
  const Abstraction& a = m.abstractions.front();
  const int rewritten = term_size(rewrite({corpus[0]}, a, toy)[0].program);

  // Solve the target task with and without the abstraction.
  std::vector<std::pair<std::vector<Value>, Value>> ex;
  for (IntList l : {IntList{1, 2, 3, 4}, IntList{5, 6}, IntList{7, 8, 10, 1, 2}, IntList{3}}) {
    IntList out;
    for (auto x : l)
      if (x % 2 == 0) out.push_back(2 * x);
    ex.push_back({{Value::list(l)}, Value::list(out)});
  }
  Task task = make_task("double-evens", {{"l", Ty::int_list()}}, ex);
  ExhaustiveResult with = exhaustive_search(task, m.library, 5);
  ExhaustiveResult without7 = exhaustive_search(task, toy, 7);
  ExhaustiveResult without8 = exhaustive_search(task, toy, 8);
  const int solved_with = with.solution ? term_size(with.solution) : -1;
  const int solved_without = without7.solution ? 7 : (without8.solution ? term_size(without8.solution) : -1);
  const double secs = seconds_since(t0);
  const bool pass = combos == 43'046'721u && rewritten == 5 && solved_with == 5 && solved_without == 8 &&
                    print_term(a.body) == "(lam2 (Loop $1 0 (Len $1) $0))" && secs <= kWorkedExampleSeconds;
  return {pass, "9^8 count " + std::to_string(combos) + ", mined " + print_term(a.body) + ", rewritten size " +
                    std::to_string(rewritten) + ", solved size " + std::to_string(solved_with) + " vs minimum " +
                    std::to_string(solved_without) + " without, " + fixed(secs) + " s"};
}

Outcome miner_vs_brute_force() {
  const auto t0 = std::chrono::steady_clock::now();
  const Library lib = default_list_dsl();
  MiningConfig on, off;
  on.max_rounds = off.max_rounds = 1;
  off.prune = false;
  int agree = 0, nonempty = 0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    const Corpus corpus = testing::random_small_corpus(5000 + i, lib);
    MineResult a = mine(corpus, lib, on, 1), b = mine(corpus, lib, off, 1);
    auto brute = testing::brute_force_best(corpus, on.max_arity, on.min_distinct_tasks, on.min_non_variable);
    const int va = a.abstractions.empty() ? 0 : a.abstractions[0].utility.value;
    const int vb = b.abstractions.empty() ? 0 : b.abstractions[0].utility.value;
    const int vbrute = brute.pattern ? brute.value : 0;
    const bool same_body = a.abstractions.size() == b.abstractions.size() &&
                           (a.abstractions.empty() || print_term(a.abstractions[0].body) ==
                                                          print_term(b.abstractions[0].body));
    agree += va == vbrute && vb == vbrute && same_body;
    nonempty += brute.pattern.has_value();
  }
  const double secs = seconds_since(t0);
  return {agree == n && secs <= kMinerSeconds,
          std::to_string(agree) + "/" + std::to_string(n) + " corpora agree (" + std::to_string(nonempty) +
              " with an abstraction), " + fixed(secs) + " s"};
}

Outcome filter_enforcement() {
  const Library lib = default_list_dsl();
  const std::vector<std::string> names{"xs", "k"};
  const TypeMap in{{"xs", Ty::int_list()}, {"k", Ty::integer()}};
  auto p = [&](const std::string& s) { return parse_term(s, lib.symbols(names)); };
  const std::vector<Corpus> corpora{
      // Only single operations are shared across tasks.
      {{"a", p("(Sum (Reverse (Sort xs)))"), in}, {"b", p("(Sum (Take k xs))"), in},
       {"c", p("(Add (Sum xs) (Sum (Sort xs)))"), in}},
      {{"a", p("(Map (lam (Add $0 1)) xs)"), in}, {"b", p("(Filter (lam (Greater $0 1)) xs)"), in}},
      // Rich repeats, all inside one task.
      {{"a", p("(Add (Max (Head xs) 2) (Max (Head xs) 2))"), in}, {"a", p("(Max (Head xs) 2)"), in}},
      {{"t", p("(Map (lam (Multiply $0 (Add $0 3))) (Map (lam (Multiply $0 (Add $0 3))) xs))"), in}},
      // Mixed: shared single ops across tasks, deep repeats within one.
      {{"a", p("(Reverse (Sort (Reverse (Sort xs))))"), in}, {"b", p("(Reverse (Take k xs))"), in}},
  };
  int accepted = 0;
  for (const auto& c : corpora) accepted += static_cast<int>(mine(c, lib, MiningConfig{}, 1).abstractions.size());
  return {accepted == 0,
          std::to_string(accepted) + " abstractions accepted from " + std::to_string(corpora.size()) + " corpora"};
}

Outcome sampler_exhaustion() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  int ok = 0, supports = 0;
  for (int k : {1, 2, 7, 60, 256, 999, 1000}) {
    // Factor k into per-position sizes (one to three positions).
    std::vector<int> sizes;
    int rest = k;
    for (int f : {10, 4})
      if (rest % f == 0 && rest > f) {
        sizes.push_back(f);
        rest /= f;
      }
    sizes.push_back(rest);
    std::vector<std::vector<double>> dists;
    for (int s : sizes) {
      std::vector<double> d(static_cast<std::size_t>(s));
      for (auto& x : d) x = u(rng);
      dists.push_back(d);
    }
    auto s = UniqueSampler::independent(dists, static_cast<std::uint64_t>(k));
    std::set<std::vector<int>> seen;
    std::size_t drawn = 0;
    std::uniform_int_distribution<int> budget(1, 40);
    while (!s.exhausted()) {
      auto batch = s.sample(static_cast<std::size_t>(budget(rng)));
      if (batch.empty()) break;
      drawn += batch.size();
      seen.insert(batch.begin(), batch.end());
    }
    ++supports;
    ok += static_cast<int>(seen.size()) == k && drawn == static_cast<std::size_t>(k) && s.exhausted() &&
          s.sample(5).empty();
  }

  // First draws over fresh states follow the product distribution.
  const std::vector<std::vector<double>> dists{{0.5, 0.3, 0.2}, {0.1, 0.6, 0.3}};
  std::vector<double> counts(9, 0);
  const int trials = 10'000;
  for (int seed = 0; seed < trials; ++seed) {
    auto s = UniqueSampler::independent(dists, static_cast<std::uint64_t>(seed) + 77);
    auto t = s.sample(1).at(0);
    counts[static_cast<std::size_t>(t[0] * 3 + t[1])] += 1;
  }
  double chi = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double e = trials * dists[0][i] * dists[1][j];
      chi += std::pow(counts[static_cast<std::size_t>(i * 3 + j)] - e, 2) / e;
    }
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(8), chi));
  const double secs = seconds_since(t0);
  return {ok == supports && p > kChiSquareMinP && secs <= kSamplerSeconds,
          std::to_string(ok) + "/" + std::to_string(supports) + " supports exhausted exactly, chi-square p = " +
              fixed(p, 4) + ", " + fixed(secs, 2) + " s"};
}

Outcome statistics() {
  auto close = [](double a, double b) { return std::abs(a - b) <= kStatsTolerance; };
  // Reference values from scipy.stats (ttest_ind with equal_var, t.ppf).
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 3, 4, 5, 6};
  const std::vector<double> c{0.53, 0.55, 0.51, 0.56, 0.54}, d{0.50, 0.52, 0.49, 0.51, 0.49};
  const TTestResult ab = t_test(a, b), cd = t_test(c, d);
  bool ok = close(ab.t, -1.0) && close(ab.p, 0.34659350708733416) && close(cd.t, 3.4641016151377544) &&
            close(cd.p, 0.008516263370901278) && close(ci95_half_width(a), 1.9632431614775607) &&
            close(ci95_half_width(c), 0.023883883880999872) &&
            close(ci95_half_width(std::vector<double>{0.2, 0.9}), 4.447171657751233);
  const std::vector<double> same{0.4, 0.4, 0.4, 0.4};
  const TTestResult ss = t_test(same, same), cc = t_test(c, c);
  ok = ok && ss.t == 0 && ss.p == 1 && cc.t == 0 && close(cc.p, 1) && ci95_half_width(same) == 0;
  bool threw = false;
  try {
    ci95_half_width(std::vector<double>{1.0});
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  return {ok && threw, "t/p/ci95 within 1e-9 of reference on 3 vectors; identical samples t=0 p=1 ci=0; n=1 rejected"};
}

int run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  if (rc != 0) std::cerr << "command failed (" << rc << "): " << cmd << "\n";
  return rc;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

struct LoopRun {
  fs::path dir;
  bool ok = false;
  double seconds = 0;
};

LoopRun loop_run(const std::string& cli, const fs::path& config, const fs::path& tasks, const fs::path& dir) {
  fs::remove_all(dir);
  LoopRun r{dir};
  const auto t0 = std::chrono::steady_clock::now();
  r.ok = run(quote(cli) + " --config " + quote(config) + " --output-dir " + quote(dir) + " loop --tasks " +
             quote(tasks) + " > " + quote(dir.string() + ".log") + " 2>&1") == 0;
  r.seconds = seconds_since(t0);
  return r;
}

// Evaluates the final and the starting policy, then emits plot data.
bool plot_data(const std::string& cli, const fs::path& config, const fs::path& tasks, const fs::path& run_dir,
               int last) {
  const fs::path final_dir = iteration_dir(run_dir, last), start_dir = iteration_dir(run_dir, 0);
  const std::string base = quote(cli) + " --config " + quote(config) + " --trials 2";
  return run(base + " --library " + quote(final_dir / "library_after.txt") + " eval --tasks " + quote(tasks) +
             " --scorer-file " + quote(final_dir / "scorer_after.txt") + " --label abstraction --out " +
             quote(run_dir / "eval_final.txt") + " > /dev/null") == 0 &&
         run(base + " eval --tasks " + quote(tasks) + " --scorer-file " + quote(start_dir / "scorer_after.txt") +
             " --label start --out " + quote(run_dir / "eval_start.txt") + " > /dev/null") == 0 &&
         run(quote(cli) + " report --a " + quote(run_dir / "eval_final.txt") + " --b " +
             quote(run_dir / "eval_start.txt") + " --out " + quote(run_dir / "plots") + " > /dev/null") == 0;
}

Outcome micro_domain(const LoopRun& r, const std::vector<Task>& tasks, int& it1, int& it2) {
  if (!r.ok) return {false, "loop run failed, see " + r.dir.string() + ".log"};
  const Library lib1 = load_library_file(iteration_dir(r.dir, 1) / "library.txt");
  const Library lib2 = load_library_file(iteration_dir(r.dir, 2) / "library.txt");
  it1 = parse_iteration_report(read_text_file(iteration_dir(r.dir, 1) / "report.txt"), lib1, tasks).solved();
  it2 = parse_iteration_report(read_text_file(iteration_dir(r.dir, 2) / "report.txt"), lib2, tasks).solved();
  return {it2 - it1 >= kMinImprovement && r.seconds <= kMicroDomainSeconds,
          "iteration 1 solved " + std::to_string(it1) + "/" + std::to_string(tasks.size()) + ", iteration 2 solved " +
              std::to_string(it2) + " (library " + lib2.name() + " v" + std::to_string(lib2.version()) + "), " +
              fixed(r.seconds) + " s"};
}

// Re-mines every iteration's wake solutions and checks each rewritten
// program against the original on all task examples.
Outcome semantic_preservation(const LoopRun& r, const std::vector<Task>& tasks) {
  if (!r.ok) return {false, "loop run failed"};
  const RunConfig cfg = load_run_config(r.dir / "config.txt");
  std::map<std::string, const Task*> by_name;
  for (const auto& t : tasks) by_name[t.name] = &t;
  int programs = 0, rewritten = 0, abstractions = 0, bad = 0;
  bool libraries_match = true;
  for (int it = 1; it <= cfg.iterations; ++it) {
    const fs::path dir = iteration_dir(r.dir, it);
    const Library lib = load_library_file(dir / "library.txt");
    IterationReport rep = parse_iteration_report(read_text_file(dir / "report.txt"), lib, tasks);
    Corpus corpus = solution_corpus(tasks, WakeResult{rep.outcomes});
    MineResult m = mine(corpus, lib, cfg.mining, it);
    libraries_match = libraries_match && libraries_equal(m.library, load_library_file(dir / "library_after.txt"));
    abstractions += static_cast<int>(m.abstractions.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      ++programs;
      if (print_term(corpus[i].program) != print_term(m.corpus[i].program)) ++rewritten;
      const Task& t = *by_name.at(corpus[i].task);
      for (const auto& ex : t.examples) {
        EvalResult before = evaluate(corpus[i].program, ex.inputs, lib, cfg.search.eval_limits);
        EvalResult after = evaluate(m.corpus[i].program, ex.inputs, m.library, cfg.search.eval_limits);
        if (!before.ok() || !after.ok() || !(before.value == after.value) || !(after.value == ex.output)) ++bad;
      }
    }
  }
  return {bad == 0 && rewritten > 0 && libraries_match,
          std::to_string(rewritten) + " of " + std::to_string(programs) + " solutions rewritten by " +
              std::to_string(abstractions) + " abstractions, " + std::to_string(bad) + " output mismatches" +
              (libraries_match ? "" : ", re-mined library differs from the persisted one")};
}

Outcome determinism(const LoopRun& a, const LoopRun& b, int iterations, bool plots_a, bool plots_b) {
  if (!a.ok || !b.ok) return {false, "loop run failed"};
  if (!plots_a || !plots_b) return {false, "eval/report failed"};
  std::vector<fs::path> files{"summary.txt", "eval_final.txt", "eval_start.txt"};
  for (int it = 0; it <= iterations; ++it) {
    const fs::path rel = iteration_dir("", it);
    if (it > 0) files.push_back(rel / "report.txt");
    files.push_back(rel / "scorer_after.txt");
    files.push_back(rel / "traces.txt");
    if (it > 0) files.push_back(rel / "library_after.txt");
  }
  for (const char* csv : {"success_by_length.csv", "abstraction_usage.csv", "time_curve.csv", "candidate_curve.csv",
                          "significance.csv"})
    files.push_back(fs::path("plots") / csv);
  int same = 0;
  std::string first_diff;
  for (const auto& f : files) {
    const bool eq = fs::exists(a.dir / f) && fs::exists(b.dir / f) &&
                    read_text_file(a.dir / f) == read_text_file(b.dir / f);
    same += eq;
    if (!eq && first_diff.empty()) first_diff = f.string();
  }
  const int n = static_cast<int>(files.size());
  return {same == n, std::to_string(same) + "/" + std::to_string(n) + " files byte-identical" +
                         (first_diff.empty() ? "" : ", first difference " + first_diff)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string cli, data, config, work, report_path;
  app.add_option("--abeam", cli, "command-line tool")->required();
  app.add_option("--data", data, "data directory")->required();
  app.add_option("--config", config, "micro-domain run config")->required();
  app.add_option("--work", work, "scratch directory")->required();
  app.add_option("--report", report_path, "also write the result lines here");
  CLI11_PARSE(app, argc, argv);
  if (!report_path.empty()) report_file.open(report_path);

  report(1, "oracle-equivalence", oracle_equivalence());
  report(2, "worked-example", worked_example());
  report(3, "miner-vs-brute-force", miner_vs_brute_force());

  const fs::path tasks_file = fs::path(data) / "tasks" / "loop_motif.tasks";
  const std::vector<Task> tasks = load_tasks_file(tasks_file);
  const int iterations = load_run_config(config).iterations;
  fs::create_directories(work);
  LoopRun a = loop_run(cli, config, tasks_file, fs::path(work) / "run_a");
  int it1 = 0, it2 = 0;
  const Outcome micro = micro_domain(a, tasks, it1, it2);

  report(4, "rewrite-semantic-preservation", semantic_preservation(a, tasks));
  report(5, "filter-enforcement", filter_enforcement());
  report(6, "unique-sampler", sampler_exhaustion());
  report(7, "wake-sleep-improvement", micro);
  report(8, "statistics", statistics());

  const bool plots_a = a.ok && plot_data(cli, config, tasks_file, a.dir, iterations);
  LoopRun b = loop_run(cli, config, tasks_file, fs::path(work) / "run_b");
  const bool plots_b = b.ok && plot_data(cli, config, tasks_file, b.dir, iterations);
  report(9, "determinism", determinism(a, b, iterations, plots_a, plots_b));

  say(failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed");
  return failures == 0 ? 0 : 1;
}
