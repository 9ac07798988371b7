#pragma once

#include <functional>
#include <limits>
#include <optional>

#include "abeam/guidance/scorer.hpp"
#include "abeam/synth/clock.hpp"
#include "abeam/synth/store.hpp"

namespace abeam {

struct SearchConfig {
  double per_task_timeout = 100;  // seconds; infinity disables
  double restart_interval = 10;   // seconds; <= 0 disables restarts
  int beam_size = 10;             // 0 means unbounded
  int max_weight = 15;
  EvalLimits eval_limits;
  std::uint64_t random_seed = 0;
  bool unique_sampling = true;    // sample after a round that adds nothing
  bool stop_on_solution = true;
  ClockMode clock = ClockMode::Virtual;
  double seconds_per_unit = kDefaultSecondsPerUnit;
  /// Called with each freshly initialized store (restart index 0, 1, ...).
  std::function<void(const ValueStore&, int)> on_restart;

  /// Empty when valid.
  std::vector<std::string> validate() const;
};

struct SolveResult {
  bool solved = false;
  TermPtr program;
  int weight = 0;
  double elapsed = 0;
  std::int64_t candidates_evaluated = 0;  // executed argument tuples, cumulative over restarts
  int restarts = 0;
  bool exhausted = false;  // the search space ran dry before the budget
};

/// Argument tuples (store entry ids) for `op` applied in `context`, best
/// first. Per position the scorer's softmax over all type-compatible
/// candidates is taken; tuples that would exceed `max_weight`, or that build
/// a lambda body without using any parameter, are dropped. Ties go to the
/// lower weight, then to earlier entries.
std::vector<std::vector<int>> beam_select_args(const ValueStore& store, int op_index, int context,
                                               const Scorer& scorer, int beam_size, int max_weight,
                                               std::int64_t* scored = nullptr);

/// Candidate entry ids for each parameter of `op` in `context`. Empty when
/// some position has none, or the op cannot produce a lambda body there.
std::vector<std::vector<int>> argument_candidates(const ValueStore& store, int op_index, int context);

/// Execution-guided bottom-up search.
SolveResult search(const Task& task, const Library& lib, const Scorer& scorer, const SearchConfig& cfg,
                   std::optional<ValueStore>* final_store = nullptr);

struct ExhaustiveResult {
  ValueStore store;
  TermPtr solution;
  bool timed_out = false;
  std::int64_t candidates_evaluated = 0;
  double elapsed = 0;
};

/// Enumerates all semantically distinct values in nondecreasing weight.
ExhaustiveResult exhaustive_search(const Task& task, const Library& lib, int max_weight,
                                   double timeout = std::numeric_limits<double>::infinity(),
                                   const EvalLimits& limits = {}, ClockMode clock = ClockMode::Virtual,
                                   double seconds_per_unit = kDefaultSecondsPerUnit);

/// Number of symbol sequences of length `length` over the library's
/// operations and constants.
std::uint64_t syntactic_combinations(const Library& lib, int length);

}  // namespace abeam
