#include "abeam/harness/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "abeam/harness/stats.hpp"
#include "abeam/util/parallel.hpp"

namespace abeam {
namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, d);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

const Task* find_task(const std::vector<Task>& tasks, const std::string& name) {
  for (const auto& t : tasks)
    if (t.name == name) return &t;
  return nullptr;
}

[[noreturn]] void report_error(int line, const std::string& what) {
  throw std::runtime_error("iteration report line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  auto sm = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return sm(sm(sm(a) ^ b) ^ c);
}

std::uint64_t name_seed(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_text_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
  if (!out) throw std::runtime_error("cannot write " + file.string());
}

int WakeResult::solved() const {
  return static_cast<int>(std::count_if(outcomes.begin(), outcomes.end(),
                                        [](const TaskOutcome& o) { return o.result.solved; }));
}

WakeResult run_wake(const std::vector<Task>& tasks, const Library& lib, const Scorer& scorer,
                    const SearchConfig& cfg, int workers, std::uint64_t seed) {
  std::vector<const Task*> order;
  for (const auto& t : tasks) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const Task* a, const Task* b) { return a->name < b->name; });
  WakeResult w;
  w.outcomes.resize(order.size());
  parallel_for(order.size(), workers, [&](std::size_t i) {
    SearchConfig c = cfg;
    c.random_seed = mix_seed(seed, name_seed(order[i]->name));
    w.outcomes[i].task = order[i]->name;
    w.outcomes[i].result = search(*order[i], lib, scorer, c);
  });
  return w;
}

Corpus solution_corpus(const std::vector<Task>& tasks, const WakeResult& wake) {
  Corpus c;
  for (const auto& o : wake.outcomes) {
    if (!o.result.solved) continue;
    const Task* t = find_task(tasks, o.task);
    if (!t) throw std::invalid_argument("solution for unknown task '" + o.task + "'");
    c.push_back({t->name, o.result.program, t->input_type_map()});
  }
  return c;
}

SleepResult run_sleep(const Corpus& solutions, const Library& lib, const LinearScorer& scorer, const RunConfig& cfg,
                      int iteration, const TraceDataset* previous) {
  SleepResult r;
  r.library = lib;
  r.scorer = scorer;
  r.mining.library = lib;
  r.mining.corpus = solutions;
  if (cfg.mode == RunMode::Abstraction && !solutions.empty()) {
    r.mining = mine(solutions, lib, cfg.mining, iteration);
    r.library = r.mining.library;
    for (const auto& a : r.mining.abstractions) {
      WarmStartResult ws = warm_start_new_op(r.scorer, a);
      r.scorer = std::move(ws.scorer);
      if (ws.neutral) r.notes.push_back(ws.note);
    }
  }
  if (cfg.scorer == ScorerMode::Uniform) return r;

  const bool regenerate = cfg.mode == RunMode::Abstraction || !previous ||
                          previous->library_version != r.library.version() ||
                          previous->library_name != r.library.name();
  if (regenerate) {
    TraceGenConfig tc = cfg.traces;
    tc.random_seed = mix_seed(cfg.random_seed, static_cast<std::uint64_t>(iteration), 1);
    r.traces = generate_traces(r.library, tc);
    r.traces_regenerated = true;
  } else {
    r.traces = *previous;
  }
  if (r.traces->steps.empty()) {
    r.notes.push_back("no trace steps; scorer not retrained");
    return r;
  }
  TrainConfig tc = cfg.train;
  tc.random_seed = mix_seed(cfg.random_seed, static_cast<std::uint64_t>(iteration), 2);
  r.training = train_scorer(*r.traces, &r.scorer, tc);
  r.scorer = r.training->scorer;
  return r;
}

int IterationReport::solved() const {
  return static_cast<int>(std::count_if(outcomes.begin(), outcomes.end(),
                                        [](const TaskOutcome& o) { return o.result.solved; }));
}

IterationReport make_iteration_report(int iteration, const RunConfig& cfg, const Library& wake_lib,
                                      const WakeResult& wake, const SleepResult* sleep) {
  IterationReport r;
  r.iteration = iteration;
  r.mode = cfg.mode == RunMode::Abstraction ? "abstraction" : "baseline";
  r.library_name = wake_lib.name();
  r.library_version = wake_lib.version();
  r.outcomes = wake.outcomes;
  if (!sleep) return r;
  for (const auto& a : sleep->mining.abstractions) {
    AbstractionSummary s;
    s.name = a.name;
    s.arity = a.arity;
    s.matches = a.utility.matches;
    s.value = a.utility.value;
    s.type = a.signature.str();
    s.body = print_term(a.body);
    s.tasks.assign(a.found_in_tasks.begin(), a.found_in_tasks.end());
    r.abstractions.push_back(std::move(s));
  }
  if (!sleep->mining.rounds.empty()) {
    r.corpus_size_before = sleep->mining.rounds.front().corpus_size_before;
    r.corpus_size_after = sleep->mining.rounds.back().corpus_size_after;
  } else {
    r.corpus_size_before = r.corpus_size_after = corpus_size(sleep->mining.corpus);
  }
  if (sleep->traces) {
    r.traces_regenerated = sleep->traces_regenerated;
    r.trace_episodes = static_cast<int>(sleep->traces->episodes.size());
    r.trace_targets = static_cast<int>(sleep->traces->targets.size());
    r.trace_steps = static_cast<int>(sleep->traces->steps.size());
    r.effective_timeout = sleep->traces->effective_timeout;
  }
  if (sleep->training) {
    r.train_steps = sleep->training->steps;
    r.train_loss = sleep->training->final_loss;
    r.underfit_ops = sleep->training->underfit_ops;
  }
  r.notes = sleep->notes;
  return r;
}

std::string format_iteration_report(const IterationReport& r) {
  std::ostringstream os;
  os << "abeam-iteration-report 1\n";
  os << "iteration\t" << r.iteration << "\n";
  os << "mode\t" << r.mode << "\n";
  os << "library\t" << r.library_name << "\t" << r.library_version << "\n";
  os << "tasks\t" << r.outcomes.size() << "\t" << r.solved() << "\n";
  for (const auto& o : r.outcomes) {
    const auto& s = o.result;
    os << "task\t" << o.task << "\t" << s.solved << "\t" << s.weight << "\t" << fmt("%.6f", s.elapsed) << "\t"
       << s.candidates_evaluated << "\t" << s.restarts << "\t" << s.exhausted << "\t"
       << (s.solved ? print_term(s.program) : "-") << "\n";
  }
  for (const auto& a : r.abstractions)
    os << "abstraction\t" << a.name << "\t" << a.arity << "\t" << a.matches << "\t" << a.value << "\t" << a.type
       << "\t" << a.body << "\t" << join(a.tasks, ",") << "\n";
  os << "mining\t" << r.corpus_size_before << "\t" << r.corpus_size_after << "\n";
  os << "traces\t" << r.traces_regenerated << "\t" << r.trace_episodes << "\t" << r.trace_targets << "\t"
     << r.trace_steps << "\t" << fmt("%.6f", r.effective_timeout) << "\n";
  os << "training\t" << r.train_steps << "\t" << fmt("%.9g", r.train_loss) << "\t"
     << (r.underfit_ops.empty() ? "-" : join(r.underfit_ops, ",")) << "\n";
  for (const auto& n : r.notes) os << "note\t" << n << "\n";
  return os.str();
}

IterationReport parse_iteration_report(const std::string& text, const Library& wake_lib,
                                       const std::vector<Task>& tasks) {
  IterationReport r;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (n == 1) {
      if (line != "abeam-iteration-report 1") report_error(n, "bad header");
      continue;
    }
    if (line.empty()) continue;
    auto f = split(line, '\t');
    const std::string& k = f[0];
    try {
      if (k == "iteration" && f.size() == 2) {
        r.iteration = std::stoi(f[1]);
      } else if (k == "mode" && f.size() == 2) {
        r.mode = f[1];
      } else if (k == "library" && f.size() == 3) {
        r.library_name = f[1];
        r.library_version = std::stoi(f[2]);
      } else if (k == "tasks" && f.size() == 3) {
      } else if (k == "task" && f.size() == 9) {
        TaskOutcome o;
        o.task = f[1];
        o.result.solved = f[2] == "1";
        o.result.weight = std::stoi(f[3]);
        o.result.elapsed = std::stod(f[4]);
        o.result.candidates_evaluated = std::stoll(f[5]);
        o.result.restarts = std::stoi(f[6]);
        o.result.exhausted = f[7] == "1";
        if (o.result.solved) {
          const Task* t = find_task(tasks, o.task);
          if (!t) report_error(n, "unknown task '" + o.task + "'");
          o.result.program = parse_term(f[8], wake_lib.symbols(t->input_names));
        }
        r.outcomes.push_back(std::move(o));
      } else if (k == "abstraction" && f.size() == 8) {
        AbstractionSummary a;
        a.name = f[1];
        a.arity = std::stoi(f[2]);
        a.matches = std::stoi(f[3]);
        a.value = std::stoi(f[4]);
        a.type = f[5];
        a.body = f[6];
        if (!f[7].empty()) a.tasks = split(f[7], ',');
        r.abstractions.push_back(std::move(a));
      } else if (k == "mining" && f.size() == 3) {
        r.corpus_size_before = std::stoi(f[1]);
        r.corpus_size_after = std::stoi(f[2]);
      } else if (k == "traces" && f.size() == 6) {
        r.traces_regenerated = f[1] == "1";
        r.trace_episodes = std::stoi(f[2]);
        r.trace_targets = std::stoi(f[3]);
        r.trace_steps = std::stoi(f[4]);
        r.effective_timeout = std::stod(f[5]);
      } else if (k == "training" && f.size() == 4) {
        r.train_steps = std::stoi(f[1]);
        r.train_loss = std::stod(f[2]);
        if (f[3] != "-") r.underfit_ops = split(f[3], ',');
      } else if (k == "note" && f.size() == 2) {
        r.notes.push_back(f[1]);
      } else {
        report_error(n, "unrecognized line");
      }
    } catch (const std::logic_error& e) {
      report_error(n, e.what());
    }
  }
  return r;
}

std::vector<std::string> verify_report(const IterationReport& r, const std::vector<Task>& tasks,
                                       const Library& wake_lib, const EvalLimits& limits) {
  std::vector<std::string> problems;
  for (const auto& o : r.outcomes) {
    if (!o.result.solved) continue;
    const Task* t = find_task(tasks, o.task);
    if (!t) problems.push_back(o.task + ": unknown task");
    else if (!solves(o.result.program, *t, wake_lib, limits)) problems.push_back(o.task + ": program does not solve");
  }
  return problems;
}

fs::path iteration_dir(const fs::path& out, int iteration) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "iter_%03d", iteration);
  return out / buf;
}

namespace {

// Settings that must match for a run directory to be resumed.
std::string resume_key(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : config_keys()) {
    if (k == "iterations" || k == "output_dir" || k == "workers") continue;
    out += k + " = " + get_config_value(cfg, k) + "\n";
  }
  return out;
}

int best_of(const std::vector<IterationReport>& reports) {
  int best = 0, solved = -1;
  for (const auto& r : reports)
    if (r.solved() > solved) {
      solved = r.solved();
      best = r.iteration;
    }
  return best;
}

}  // namespace

LoopResult wake_sleep_loop(const std::vector<Task>& train, const RunConfig& cfg,
                           const std::function<void(const IterationReport&)>& progress) {
  if (auto errs = cfg.validate(); !errs.empty()) throw ConfigError(errs.front());
  const fs::path out = cfg.output_dir;
  fs::create_directories(out);
  const fs::path key_file = out / "resume_key.txt";
  const std::string key = resume_key(cfg);
  if (fs::exists(key_file) && read_text_file(key_file) != key)
    throw ConfigError("output directory " + out.string() + " holds a run with a different configuration");
  write_text_file(key_file, key);
  write_text_file(out / "config.txt", format_run_config(cfg));

  LoopResult res;
  res.library = resolve_library(cfg.library);
  std::optional<TraceDataset> traces;

  int it = 1;
  for (; it <= cfg.iterations; ++it) {
    const fs::path dir = iteration_dir(out, it);
    if (!fs::exists(dir / "report.txt")) break;
    Library wake_lib = load_library_file(dir / "library.txt");
    res.reports.push_back(parse_iteration_report(read_text_file(dir / "report.txt"), wake_lib, train));
    res.library = load_library_file(dir / "library_after.txt");
    res.scorer = load_scorer_file(dir / "scorer_after.txt");
    traces.reset();
    if (fs::exists(dir / "traces.txt")) traces = load_traces_file(dir / "traces.txt", res.library);
    ++res.resumed_iterations;
  }

  // The policy is trained on the starting library before the first wake;
  // iteration 0 is that sleep with no solutions to mine.
  if (cfg.scorer == ScorerMode::Linear && res.resumed_iterations == 0) {
    const fs::path dir = iteration_dir(out, 0);
    if (fs::exists(dir / "scorer_after.txt")) {
      res.scorer = load_scorer_file(dir / "scorer_after.txt");
      if (fs::exists(dir / "traces.txt")) traces = load_traces_file(dir / "traces.txt", res.library);
    } else {
      SleepResult pre = run_sleep(Corpus{}, res.library, res.scorer, cfg, 0);
      fs::create_directories(dir);
      if (pre.traces) save_traces(*pre.traces, dir / "traces.txt");
      save_scorer(pre.scorer, dir / "scorer_after.txt");
      res.scorer = std::move(pre.scorer);
      traces = std::move(pre.traces);
    }
  }

  UniformScorer uniform;
  for (; it <= cfg.iterations; ++it) {
    const fs::path dir = iteration_dir(out, it);
    fs::create_directories(dir);
    save_library(res.library, dir / "library.txt");
    save_scorer(res.scorer, dir / "scorer.txt");

    const Scorer& scorer = cfg.scorer == ScorerMode::Uniform ? static_cast<const Scorer&>(uniform) : res.scorer;
    WakeResult wake = run_wake(train, res.library, scorer, cfg.search, cfg.workers,
                               mix_seed(cfg.random_seed, static_cast<std::uint64_t>(it)));
    SleepResult sleep =
        run_sleep(solution_corpus(train, wake), res.library, res.scorer, cfg, it, traces ? &*traces : nullptr);

    IterationReport report = make_iteration_report(it, cfg, res.library, wake, &sleep);
    for (const auto& p : verify_report(report, train, res.library, cfg.search.eval_limits))
      report.notes.push_back("verification failed: " + p);

    write_text_file(dir / "mining.txt", format_mining_report(sleep.mining, it));
    if (sleep.traces) save_traces(*sleep.traces, dir / "traces.txt");
    save_library(sleep.library, dir / "library_after.txt");
    save_scorer(sleep.scorer, dir / "scorer_after.txt");
    write_text_file(dir / "report.txt", format_iteration_report(report));

    res.library = std::move(sleep.library);
    res.scorer = std::move(sleep.scorer);
    traces = std::move(sleep.traces);
    if (progress) progress(report);
    res.reports.push_back(std::move(report));
  }

  res.best_iteration = best_of(res.reports);
  std::ostringstream os;
  for (const auto& r : res.reports)
    os << "iteration " << r.iteration << " solved " << r.solved() << " of " << r.outcomes.size()
       << " library_version " << r.library_version << " abstractions_added " << r.abstractions.size() << "\n";
  os << "best_iteration " << res.best_iteration << "\n";
  write_text_file(out / "summary.txt", os.str());
  return res;
}

std::pair<std::vector<Task>, std::vector<Task>> fold_split(const std::vector<Task>& tasks, int folds, int fold,
                                                           std::uint64_t seed) {
  if (fold == 0 || folds == 1) return {tasks, tasks};
  if (folds != 2 || fold < 0 || fold > 2) throw ConfigError("fold must be 0, 1 or 2");
  std::vector<Task> shuffled = tasks;
  std::sort(shuffled.begin(), shuffled.end(), [](const Task& a, const Task& b) { return a.name < b.name; });
  std::mt19937_64 rng(seed);
  for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng() % i]);
  const std::size_t half = (shuffled.size() + 1) / 2;
  std::vector<Task> a(shuffled.begin(), shuffled.begin() + half), b(shuffled.begin() + half, shuffled.end());
  if (fold == 1) return {a, b};
  return {b, a};
}

bool uses_abstraction(const Term& t, const Library& lib) {
  if (t.kind() == TermKind::PrimRef) {
    if (const Operation* op = lib.find(t.name())) return op->learned();
    if (const Constant* c = lib.find_constant(t.name())) return c->named();
    return false;
  }
  for (const auto& c : t.children())
    if (uses_abstraction(*c, lib)) return true;
  return false;
}

int ExperimentSummary::total_solved() const {
  int n = 0;
  for (const auto& [len, row] : by_length) n += row.solved;
  return n;
}

double ExperimentSummary::mean_rate() const { return rates.empty() ? 0.0 : mean(rates); }

std::optional<double> ExperimentSummary::ci95() const {
  if (rates.size() < 2) return std::nullopt;
  return ci95_half_width(rates);
}

ExperimentSummary summarize(const std::string& label, int tasks, const Library& lib,
                            const std::vector<WakeResult>& trials) {
  ExperimentSummary s;
  s.label = label;
  s.tasks = tasks;
  std::vector<double> times;
  std::vector<std::int64_t> cands;
  for (const auto& w : trials) {
    s.rates.push_back(tasks ? static_cast<double>(w.solved()) / tasks : 0.0);
    for (const auto& o : w.outcomes) {
      if (!o.result.solved) continue;
      auto& row = s.by_length[term_size(o.result.program)];
      ++row.solved;
      if (uses_abstraction(*o.result.program, lib)) ++row.with_abstraction;
      times.push_back(o.result.elapsed);
      cands.push_back(o.result.candidates_evaluated);
    }
  }
  std::sort(times.begin(), times.end());
  std::sort(cands.begin(), cands.end());
  const double n = trials.empty() ? 1.0 : static_cast<double>(trials.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    if (i + 1 == times.size() || times[i + 1] != times[i]) s.time_curve.push_back({times[i], (i + 1) / n});
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (i + 1 == cands.size() || cands[i + 1] != cands[i]) s.candidate_curve.push_back({cands[i], (i + 1) / n});
  return s;
}

ExperimentSummary evaluate(const std::vector<Task>& tasks, const Library& lib, const Scorer& scorer, int trials,
                           const SearchConfig& cfg, int workers, std::uint64_t seed, const std::string& label) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  std::vector<WakeResult> runs;
  for (int t = 0; t < trials; ++t)
    runs.push_back(run_wake(tasks, lib, scorer, cfg, workers, mix_seed(seed, static_cast<std::uint64_t>(t), 7)));
  return summarize(label, static_cast<int>(tasks.size()), lib, runs);
}

std::string format_summary(const ExperimentSummary& s) {
  std::ostringstream os;
  os << "abeam-summary 1\n";
  os << "label\t" << s.label << "\n";
  os << "tasks\t" << s.tasks << "\n";
  for (double r : s.rates) os << "rate\t" << fmt("%.17g", r) << "\n";
  for (const auto& [len, row] : s.by_length)
    os << "length\t" << len << "\t" << row.solved << "\t" << row.with_abstraction << "\n";
  for (const auto& [t, y] : s.time_curve) os << "time\t" << fmt("%.17g", t) << "\t" << fmt("%.17g", y) << "\n";
  for (const auto& [c, y] : s.candidate_curve) os << "candidates\t" << c << "\t" << fmt("%.17g", y) << "\n";
  return os.str();
}

ExperimentSummary parse_summary(const std::string& text) {
  ExperimentSummary s;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (n == 1) {
      if (line != "abeam-summary 1") throw std::runtime_error("summary: bad header");
      continue;
    }
    if (line.empty()) continue;
    auto f = split(line, '\t');
    try {
      if (f[0] == "label" && f.size() == 2) s.label = f[1];
      else if (f[0] == "tasks" && f.size() == 2) s.tasks = std::stoi(f[1]);
      else if (f[0] == "rate" && f.size() == 2) s.rates.push_back(std::stod(f[1]));
      else if (f[0] == "length" && f.size() == 4) s.by_length[std::stoi(f[1])] = {std::stoi(f[2]), std::stoi(f[3])};
      else if (f[0] == "time" && f.size() == 3) s.time_curve.push_back({std::stod(f[1]), std::stod(f[2])});
      else if (f[0] == "candidates" && f.size() == 3) s.candidate_curve.push_back({std::stoll(f[1]), std::stod(f[2])});
      else throw std::runtime_error("unrecognized line");
    } catch (const std::exception& e) {
      throw std::runtime_error("summary line " + std::to_string(n) + ": " + e.what());
    }
  }
  return s;
}

std::vector<fs::path> emit_plot_data(const ExperimentSummary& a, const ExperimentSummary& b, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create directory " + dir.string());
  const std::vector<const ExperimentSummary*> runs{&a, &b};
  std::vector<fs::path> files;
  auto g = [](double d) { return fmt("%.10g", d); };

  {
    std::ostringstream os;
    os << "run,length,solved,fraction_of_attempts\n";
    for (const auto* s : runs) {
      const double attempts = static_cast<double>(s->tasks) * s->trials();
      for (const auto& [len, row] : s->by_length)
        os << s->label << "," << len << "," << row.solved << "," << g(attempts ? row.solved / attempts : 0) << "\n";
    }
    files.push_back(dir / "success_by_length.csv");
    write_text_file(files.back(), os.str());
  }
  {
    std::ostringstream os;
    os << "run,length,solutions,with_abstraction,fraction\n";
    for (const auto* s : runs)
      for (const auto& [len, row] : s->by_length)
        os << s->label << "," << len << "," << row.solved << "," << row.with_abstraction << ","
           << g(static_cast<double>(row.with_abstraction) / row.solved) << "\n";
    files.push_back(dir / "abstraction_usage.csv");
    write_text_file(files.back(), os.str());
  }
  {
    std::ostringstream os;
    os << "run,seconds,mean_solved\n";
    for (const auto* s : runs)
      for (const auto& [t, y] : s->time_curve) os << s->label << "," << g(t) << "," << g(y) << "\n";
    files.push_back(dir / "time_curve.csv");
    write_text_file(files.back(), os.str());
  }
  {
    std::ostringstream os;
    os << "run,candidates,mean_solved\n";
    for (const auto* s : runs)
      for (const auto& [c, y] : s->candidate_curve) os << s->label << "," << c << "," << g(y) << "\n";
    files.push_back(dir / "candidate_curve.csv");
    write_text_file(files.back(), os.str());
  }
  {
    std::ostringstream os;
    os << "run_a,run_b,trials_a,trials_b,mean_a,ci95_a,mean_b,ci95_b,t,df,p,significant,degenerate\n";
    if (a.trials() >= 2 && b.trials() >= 2) {
      TTestResult t = t_test(a.rates, b.rates);
      os << a.label << "," << b.label << "," << a.trials() << "," << b.trials() << "," << g(a.mean_rate()) << ","
         << g(*a.ci95()) << "," << g(b.mean_rate()) << "," << g(*b.ci95()) << "," << g(t.t) << "," << t.df << ","
         << g(t.p) << "," << (t.p < 0.05 ? 1 : 0) << "," << (t.degenerate ? 1 : 0) << "\n";
    }
    files.push_back(dir / "significance.csv");
    write_text_file(files.back(), os.str());
  }
  return files;
}

}  // namespace abeam
