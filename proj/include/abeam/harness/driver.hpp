#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>

#include "abeam/guidance/linear_scorer.hpp"
#include "abeam/harness/config.hpp"
#include "abeam/librarian/mine.hpp"

namespace abeam {

/// splitmix64 over the combined words.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0);
/// FNV-1a; keeps per-task seeds independent of task order and fold.
std::uint64_t name_seed(const std::string& name);

struct TaskOutcome {
  std::string task;
  SolveResult result;
};

struct WakeResult {
  std::vector<TaskOutcome> outcomes;  // sorted by task name
  int solved() const;
};

/// Searches every task (up to `workers` at a time). Task t gets seed
/// mix_seed(seed, name_seed(t.name)).
WakeResult run_wake(const std::vector<Task>& tasks, const Library& lib, const Scorer& scorer,
                    const SearchConfig& cfg, int workers, std::uint64_t seed);

Corpus solution_corpus(const std::vector<Task>& tasks, const WakeResult& wake);

struct SleepResult {
  Library library;
  LinearScorer scorer;
  std::optional<TraceDataset> traces;  // the data the scorer was trained on
  bool traces_regenerated = false;
  MineResult mining;
  std::optional<TrainResult> training;
  std::vector<std::string> notes;
};

/// Mining (abstraction mode only), warm starts for new operations, trace
/// generation and training (linear scorer only). Baseline mode reuses
/// `previous` traces unless the library changed.
SleepResult run_sleep(const Corpus& solutions, const Library& lib, const LinearScorer& scorer, const RunConfig& cfg,
                      int iteration, const TraceDataset* previous = nullptr);

struct AbstractionSummary {
  std::string name;
  int arity = 0;
  int matches = 0;
  int value = 0;
  std::string type;
  std::string body;
  std::vector<std::string> tasks;
};

struct IterationReport {
  int iteration = 0;
  std::string mode;
  std::string library_name;
  int library_version = 0;
  std::vector<TaskOutcome> outcomes;
  std::vector<AbstractionSummary> abstractions;
  int corpus_size_before = 0;
  int corpus_size_after = 0;
  bool traces_regenerated = false;
  int trace_episodes = 0;
  int trace_targets = 0;
  int trace_steps = 0;
  double effective_timeout = 0;
  int train_steps = 0;
  double train_loss = 0;
  std::vector<std::string> underfit_ops;
  std::vector<std::string> notes;

  int solved() const;
};

IterationReport make_iteration_report(int iteration, const RunConfig& cfg, const Library& wake_lib,
                                      const WakeResult& wake, const SleepResult* sleep);
std::string format_iteration_report(const IterationReport& r);
/// Programs are parsed with `wake_lib`'s symbols and the task's inputs.
IterationReport parse_iteration_report(const std::string& text, const Library& wake_lib,
                                       const std::vector<Task>& tasks);
/// Problems found when re-running solved programs; empty when all verify.
std::vector<std::string> verify_report(const IterationReport& r, const std::vector<Task>& tasks,
                                       const Library& wake_lib, const EvalLimits& limits);

struct LoopResult {
  std::vector<IterationReport> reports;
  Library library;
  LinearScorer scorer;
  int best_iteration = 0;  // most training tasks solved, earliest on ties
  int resumed_iterations = 0;
};

/// Alternates wake and sleep, persisting each iteration under
/// `cfg.output_dir/iter_NNN/`. With the linear scorer, `iter_000/` holds the
/// traces and scorer trained before the first wake. An existing run directory with the same
/// configuration is resumed after its last complete iteration.
LoopResult wake_sleep_loop(const std::vector<Task>& train, const RunConfig& cfg,
                           const std::function<void(const IterationReport&)>& progress = {});

std::filesystem::path iteration_dir(const std::filesystem::path& out, int iteration);

/// Task split for cross validation: a stable shuffle under `seed`, halved.
/// fold 0 (or folds == 1) trains and tests on everything; fold 1 trains on
/// the first half, fold 2 on the second.
std::pair<std::vector<Task>, std::vector<Task>> fold_split(const std::vector<Task>& tasks, int folds, int fold,
                                                           std::uint64_t seed);

/// True when the term references a learned operation or named constant.
bool uses_abstraction(const Term& t, const Library& lib);

struct ExperimentSummary {
  struct LengthRow {
    int solved = 0;
    int with_abstraction = 0;
  };
  std::string label;
  int tasks = 0;
  std::vector<double> rates;           // solve rate per trial
  std::map<int, LengthRow> by_length;  // term size of the found program
  std::vector<std::pair<double, double>> time_curve;             // (seconds, mean solved)
  std::vector<std::pair<std::int64_t, double>> candidate_curve;  // (candidates, mean solved)

  int trials() const { return static_cast<int>(rates.size()); }
  int total_solved() const;
  double mean_rate() const;
  std::optional<double> ci95() const;  // needs two trials
};

ExperimentSummary summarize(const std::string& label, int tasks, const Library& lib,
                            const std::vector<WakeResult>& trials);

/// Solves the test set `trials` times with seeds mix_seed(seed, trial).
ExperimentSummary evaluate(const std::vector<Task>& tasks, const Library& lib, const Scorer& scorer, int trials,
                           const SearchConfig& cfg, int workers, std::uint64_t seed, const std::string& label);

std::string format_summary(const ExperimentSummary& s);
ExperimentSummary parse_summary(const std::string& text);

/// Writes success_by_length.csv, abstraction_usage.csv, time_curve.csv,
/// candidate_curve.csv and significance.csv; returns their paths.
std::vector<std::filesystem::path> emit_plot_data(const ExperimentSummary& a, const ExperimentSummary& b,
                                                  const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, const std::string& text);

}  // namespace abeam
