#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "abeam/guidance/traces.hpp"
#include "abeam/librarian/corpus.hpp"
#include "abeam/synth/search.hpp"

namespace abeam {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `abstraction` mines and installs new operations each sleep; `baseline`
/// keeps the language fixed and only retrains the scorer.
enum class RunMode { Abstraction, Baseline };
/// `linear` trains the per-operation scorer; `uniform` never trains.
enum class ScorerMode { Linear, Uniform };

struct RunConfig {
  int iterations = 10;
  int trials = 5;
  int folds = 2;
  int fold = 0;  // 0 uses every task; k in 1..folds picks that fold's split
  int workers = 1;
  std::string output_dir = "runs";
  std::uint64_t random_seed = 0;
  RunMode mode = RunMode::Abstraction;
  ScorerMode scorer = ScorerMode::Linear;
  std::string library = "list";  // list, toy, or a library file

  SearchConfig search;
  TraceGenConfig traces;
  TrainConfig train;
  MiningConfig mining;

  std::vector<std::string> validate() const;
};

/// Keys accepted by the config file and `--set`, in file order.
const std::vector<std::string>& config_keys();

/// Throws ConfigError for unknown keys or malformed values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// `key = value` lines; `#` starts a comment. Unknown keys are errors.
void apply_config_text(RunConfig& cfg, const std::string& text);
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& file);
/// Every key, one per line.
std::string format_run_config(const RunConfig& cfg);

/// `list`, `toy`, or a path to a saved library.
Library resolve_library(const std::string& spec);

}  // namespace abeam
