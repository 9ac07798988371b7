#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "abeam/guidance/linear_scorer.hpp"
#include "abeam/synth/search.hpp"

namespace abeam {

struct TraceGenConfig {
  double episode_timeout = 1000;         // seconds per exhaustive search
  double per_abstraction_bonus = 100;    // added per learned abstraction
  int max_weight = 15;
  int parallel_searches = 300;
  int episodes = 32;
  int targets_per_episode = 8;
  int max_negatives = 32;
  std::uint64_t random_seed = 0;
  EvalLimits eval_limits;
  ClockMode clock = ClockMode::Virtual;
  double seconds_per_unit = kDefaultSecondsPerUnit;

  std::vector<std::string> validate() const;
};

double effective_timeout(const TraceGenConfig& cfg, const Library& lib);

/// One random input specification searched exhaustively.
struct TraceEpisode {
  std::uint64_t seed = 0;
  Task task;  // outputs are placeholders; targets supply real ones
  std::int64_t values = 0;
  bool timed_out = false;
};

/// An enumerated value chosen as a synthetic task.
struct TraceTarget {
  int episode = 0;
  TermPtr term;
  std::vector<Value> outputs;
};

/// One argument choice inside a target's construction.
struct TraceStep {
  int target = 0;
  std::string op;
  int position = 0;
  int context = 0;
  TermPtr node;  // the application this argument belongs to
  TermPtr arg;   // the chosen argument
  std::vector<float> chosen;
  std::vector<std::vector<float>> negatives;
};

struct TraceDataset {
  std::string library_name;
  int library_version = 0;
  TraceGenConfig config;
  double effective_timeout = 0;
  std::vector<TraceEpisode> episodes;
  std::vector<TraceTarget> targets;
  std::vector<TraceStep> steps;
};

/// Exhaustive searches on random tasks, decomposed into argument choices.
TraceDataset generate_traces(const Library& lib, const TraceGenConfig& cfg);

/// The concrete task a target stands for.
Task target_task(const TraceDataset& d, const TraceTarget& t);

std::string save_traces(const TraceDataset& d);
void save_traces(const TraceDataset& d, const std::filesystem::path& file);
TraceDataset load_traces(const std::string& text, const Library& lib);
TraceDataset load_traces_file(const std::filesystem::path& file, const Library& lib);

struct TrainConfig {
  int max_steps = 10'000;
  double learning_rate = 0.05;
  double l2 = 1e-4;
  int min_op_steps = 10;
  std::uint64_t random_seed = 0;
};

struct TrainResult {
  LinearScorer scorer;
  std::vector<std::string> underfit_ops;  // fewer than min_op_steps records; kept at init
  std::map<std::string, int> op_records;
  int steps = 0;
  double final_loss = 0;  // mean pairwise logistic loss over the data
};

/// Pairwise logistic ranking: the chosen argument should outscore each
/// negative. Each step updates every trainable operation once.
TrainResult train_scorer(const TraceDataset& data, const LinearScorer* init, const TrainConfig& cfg);

}  // namespace abeam
