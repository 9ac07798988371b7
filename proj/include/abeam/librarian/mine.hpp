#pragma once

#include <filesystem>
#include <functional>

#include "abeam/librarian/corpus.hpp"

namespace abeam {

/// A partial pattern visited by the miner. `parent_bound` is -1 at the root.
struct PatternEvent {
  TermPtr pattern;
  int bound = 0;
  int parent_bound = -1;
  bool complete = false;
  int value = -1;  // exact utility of a complete pattern
  bool accepted = false;
};

struct PatternSearchResult {
  std::optional<Candidate> best;
  std::size_t expanded = 0;
  std::size_t pruned = 0;
  std::size_t completed = 0;
  bool budget_exhausted = false;
  bool frontier_capped = false;
};

/// Best-first search over hole patterns, ordered by an upper bound on the
/// utility of any refinement. With pruning, subtrees whose bound falls
/// below the best accepted utility are cut; equal bounds survive so the
/// tie-break is the same as without pruning.
PatternSearchResult best_pattern(const IndexedCorpus& corpus, const MiningConfig& cfg,
                                 const std::function<void(const PatternEvent&)>& observer = {});

/// Total order used to pick among equal-utility candidates: higher value,
/// then larger body, then lower arity, then printed pattern.
bool better_candidate(const Candidate& a, const Candidate& b);

struct MiningRound {
  int round = 0;
  std::size_t expanded = 0;
  std::size_t pruned = 0;
  bool budget_exhausted = false;
  bool frontier_capped = false;
  int corpus_size_before = 0;
  int corpus_size_after = 0;
  std::optional<Abstraction> abstraction;
};

struct MineResult {
  Library library;
  Corpus corpus;  // rewritten
  std::vector<Abstraction> abstractions;
  std::vector<MiningRound> rounds;
};

/// Up to `cfg.max_rounds` rounds; each adds the best accepted abstraction
/// and rewrites the corpus with it. Stops early when nothing is accepted.
MineResult mine(const Corpus& corpus, const Library& lib, const MiningConfig& cfg, int iteration = 0);

std::string format_mining_report(const MineResult& r, int iteration);
void write_mining_report(const MineResult& r, int iteration, const std::filesystem::path& file);

}  // namespace abeam
