// Command-line front end: solve, wake, sleep, loop, trace-gen, train, eval,
// mine, report.

#include <cstdlib>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "abeam/harness/driver.hpp"

using namespace abeam;
namespace fs = std::filesystem;

namespace {

constexpr int kConfigError = 2;
constexpr int kTaskFormatError = 3;

std::string flag_name(std::string key) {
  for (char& c : key)
    if (c == '.' || c == '_') c = '-';
  return "--" + key;
}

// Training side of the configured fold, or its test side.
std::vector<Task> tasks_for(const std::string& file, const RunConfig& cfg, bool test_side) {
  auto tasks = load_tasks_file(file);
  if (cfg.fold == 0) return tasks;
  auto [train, test] = fold_split(tasks, cfg.folds, cfg.fold, cfg.random_seed);
  return test_side ? test : train;
}

LinearScorer scorer_or_empty(const std::string& file) {
  return file.empty() ? LinearScorer{} : load_scorer_file(file);
}

void print_outcome(const std::string& name, const SolveResult& r) {
  std::cout << "task " << name << ": " << (r.solved ? "solved" : "unsolved") << "\n";
  if (r.solved) std::cout << "program " << print_term(r.program) << "\nweight " << r.weight << "\n";
  std::cout << "elapsed " << r.elapsed << "\ncandidates " << r.candidates_evaluated << "\nrestarts " << r.restarts
            << "\nexhausted " << (r.exhausted ? "yes" : "no") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bottom-up synthesis with library learning"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
  app.add_option("--config", config_file, "key = value config file");
  app.add_option("--set", sets, "override a config key (key=value)");
  for (const auto& key : config_keys()) app.add_option(flag_name(key), flags[key], "config key " + key);

  std::string tasks_file, task_name, scorer_file, solutions_file, out, traces_file, init_file, label = "run";
  std::string a_file, b_file;
  int iteration = 1;

  auto* solve = app.add_subcommand("solve", "search one task and print the program");
  solve->add_option("--tasks", tasks_file, "task file")->required();
  solve->add_option("--task", task_name, "task name (default: first)");
  solve->add_option("--scorer-file", scorer_file, "trained scorer");

  auto* wake = app.add_subcommand("wake", "solve every task and write an iteration report");
  wake->add_option("--tasks", tasks_file, "task file")->required();
  wake->add_option("--scorer-file", scorer_file, "trained scorer");
  wake->add_option("--out", out, "report file (default <output_dir>/wake_report.txt)");

  auto* sleep = app.add_subcommand("sleep", "mine, regenerate traces and retrain from a wake report");
  sleep->add_option("--tasks", tasks_file, "task file")->required();
  sleep->add_option("--solutions", solutions_file, "wake report")->required();
  sleep->add_option("--scorer-file", scorer_file, "scorer to warm start and retrain");
  sleep->add_option("--iteration", iteration, "iteration index for seeds and names");

  auto* loop = app.add_subcommand("loop", "full wake-sleep run");
  loop->add_option("--tasks", tasks_file, "training task file")->required();

  auto* tracegen = app.add_subcommand("trace-gen", "generate search traces for the library");
  tracegen->add_option("--out", out, "trace file")->required();

  auto* train = app.add_subcommand("train", "train the scorer on a trace file");
  train->add_option("--traces", traces_file, "trace file")->required();
  train->add_option("--init", init_file, "initial scorer");
  train->add_option("--out", out, "scorer file")->required();

  auto* eval = app.add_subcommand("eval", "solve test tasks over several trials");
  eval->add_option("--tasks", tasks_file, "test task file")->required();
  eval->add_option("--scorer-file", scorer_file, "trained scorer");
  eval->add_option("--label", label, "run label");
  eval->add_option("--out", out, "summary file")->required();

  auto* minecmd = app.add_subcommand("mine", "mine abstractions from a wake report");
  minecmd->add_option("--tasks", tasks_file, "task file")->required();
  minecmd->add_option("--solutions", solutions_file, "wake report")->required();
  minecmd->add_option("--iteration", iteration, "iteration index for names");

  auto* report = app.add_subcommand("report", "plot data and significance from two summaries");
  report->add_option("--a", a_file, "summary file")->required();
  report->add_option("--b", b_file, "baseline summary file")->required();
  report->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  // defaults < config file < ABEAM_OUTPUT_DIR < flags and --set
  RunConfig cfg;
  try {
    if (!config_file.empty()) cfg = load_run_config(config_file);
    if (const char* env = std::getenv("ABEAM_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    for (const auto& key : config_keys())
      if (app.get_option(flag_name(key))->count()) set_config_value(cfg, key, flags[key]);
    for (const auto& s : sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (auto errs = cfg.validate(); !errs.empty()) throw ConfigError(errs.front());
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const fs::path outdir = cfg.output_dir;
    LinearScorer linear;
    UniformScorer uniform;
    auto pick_scorer = [&]() -> const Scorer& {
      linear = scorer_or_empty(scorer_file);
      if (cfg.scorer == ScorerMode::Uniform) return uniform;
      return linear;
    };

    if (*solve) {
      Library lib = resolve_library(cfg.library);
      auto tasks = load_tasks_file(tasks_file);
      const Task* task = tasks.empty() ? nullptr : &tasks.front();
      if (!task_name.empty()) {
        task = nullptr;
        for (const auto& t : tasks)
          if (t.name == task_name) task = &t;
      }
      if (!task) throw ConfigError("no task named '" + task_name + "'");
      const Scorer& sc = pick_scorer();
      SearchConfig scfg = cfg.search;
      scfg.random_seed = mix_seed(cfg.random_seed, name_seed(task->name));
      print_outcome(task->name, search(*task, lib, sc, scfg));
    } else if (*wake) {
      Library lib = resolve_library(cfg.library);
      auto tasks = tasks_for(tasks_file, cfg, false);
      const Scorer& sc = pick_scorer();
      WakeResult w = run_wake(tasks, lib, sc, cfg.search, cfg.workers, mix_seed(cfg.random_seed, 1));
      IterationReport r = make_iteration_report(1, cfg, lib, w, nullptr);
      fs::path file = out.empty() ? outdir / "wake_report.txt" : fs::path(out);
      if (file.has_parent_path()) fs::create_directories(file.parent_path());
      write_text_file(file, format_iteration_report(r));
      std::cout << "solved " << w.solved() << " of " << tasks.size() << "\nreport " << file.string() << "\n";
    } else if (*sleep || *minecmd) {
      Library lib = resolve_library(cfg.library);
      auto tasks = load_tasks_file(tasks_file);
      IterationReport wr = parse_iteration_report(read_text_file(solutions_file), lib, tasks);
      Corpus corpus = solution_corpus(tasks, WakeResult{wr.outcomes});
      fs::create_directories(outdir);
      if (*minecmd) {
        MineResult m = mine(corpus, lib, cfg.mining, iteration);
        write_mining_report(m, iteration, outdir / "mining.txt");
        save_library(m.library, outdir / "library_after.txt");
        std::cout << format_mining_report(m, iteration);
      } else {
        SleepResult s = run_sleep(corpus, lib, scorer_or_empty(scorer_file), cfg, iteration);
        write_mining_report(s.mining, iteration, outdir / "mining.txt");
        save_library(s.library, outdir / "library_after.txt");
        save_scorer(s.scorer, outdir / "scorer_after.txt");
        if (s.traces) save_traces(*s.traces, outdir / "traces.txt");
        std::cout << "abstractions " << s.mining.abstractions.size() << "\nlibrary_version " << s.library.version()
                  << "\n";
        for (const auto& n : s.notes) std::cout << "note " << n << "\n";
      }
    } else if (*loop) {
      auto tasks = tasks_for(tasks_file, cfg, false);
      LoopResult r = wake_sleep_loop(tasks, cfg, [](const IterationReport& rep) {
        std::cout << "iteration " << rep.iteration << ": solved " << rep.solved() << " of " << rep.outcomes.size()
                  << ", library version " << rep.library_version << ", " << rep.abstractions.size()
                  << " new abstraction(s)" << std::endl;
      });
      if (r.resumed_iterations) std::cout << "resumed " << r.resumed_iterations << " iteration(s)\n";
      std::cout << "best iteration " << r.best_iteration << "\n";
    } else if (*tracegen) {
      Library lib = resolve_library(cfg.library);
      TraceGenConfig tc = cfg.traces;
      tc.random_seed = cfg.random_seed;
      TraceDataset d = generate_traces(lib, tc);
      save_traces(d, out);
      std::cout << "episodes " << d.episodes.size() << "\ntargets " << d.targets.size() << "\nsteps "
                << d.steps.size() << "\neffective_timeout " << d.effective_timeout << "\n";
    } else if (*train) {
      Library lib = resolve_library(cfg.library);
      TraceDataset d = load_traces_file(traces_file, lib);
      LinearScorer init = scorer_or_empty(init_file);
      TrainConfig tc = cfg.train;
      tc.random_seed = cfg.random_seed;
      TrainResult r = train_scorer(d, &init, tc);
      save_scorer(r.scorer, out);
      std::cout << "steps " << r.steps << "\nloss " << r.final_loss << "\n";
      for (const auto& op : r.underfit_ops) std::cout << "underfit " << op << "\n";
    } else if (*eval) {
      Library lib = resolve_library(cfg.library);
      auto tasks = tasks_for(tasks_file, cfg, true);
      const Scorer& sc = pick_scorer();
      ExperimentSummary s = evaluate(tasks, lib, sc, cfg.trials, cfg.search, cfg.workers, cfg.random_seed, label);
      fs::path file(out);
      if (file.has_parent_path()) fs::create_directories(file.parent_path());
      write_text_file(file, format_summary(s));
      std::cout << "mean solve rate " << s.mean_rate();
      if (auto ci = s.ci95()) std::cout << " +- " << *ci;
      std::cout << "\n";
    } else if (*report) {
      auto a = parse_summary(read_text_file(a_file));
      auto b = parse_summary(read_text_file(b_file));
      for (const auto& f : emit_plot_data(a, b, out)) std::cout << f.string() << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const TaskFormatError& e) {
    std::cerr << "task format error: " << e.what() << "\n";
    return kTaskFormatError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
