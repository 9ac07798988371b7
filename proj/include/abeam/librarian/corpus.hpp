#pragma once

#include <optional>
#include <set>

#include "abeam/dsl/library.hpp"

namespace abeam {

/// One solution program with the task it solves.
struct CorpusProgram {
  std::string task;
  TermPtr program;
  TypeMap inputs;
};
using Corpus = std::vector<CorpusProgram>;

int corpus_size(const Corpus& c);

/// A corpus flattened into preorder nodes. Applications have their
/// arguments as children (the operation symbol is part of the node); a
/// lambda has its body.
class IndexedCorpus {
 public:
  struct Node {
    TermPtr term;
    Ty type;
    int depth = 0;  // binders enclosing the node within its program
    int size = 0;   // term_size
    int end = 0;    // one past the last node of this subtree
    std::vector<int> children;
  };

  IndexedCorpus(const Corpus& corpus, const Library& lib);

  const Corpus& corpus() const { return *corpus_; }
  std::size_t programs() const { return nodes_.size(); }
  const std::vector<Node>& nodes(std::size_t program) const { return nodes_[program]; }
  const Node& node(int program, int index) const { return nodes_[program][index]; }

 private:
  const Corpus* corpus_;
  std::vector<std::vector<Node>> nodes_;
};

/// Pattern occurrence. `bindings[h]` is the node bound to hole h and
/// `hole_depth[h]` the number of pattern binders above its first occurrence.
struct Match {
  int program = 0;
  int root = 0;
  std::vector<int> bindings;
  std::vector<int> hole_depth;

  /// The binding of hole h with pattern-internal binders removed.
  TermPtr lifted(const IndexedCorpus& c, int h) const;
};

int hole_count(const TermPtr& pattern);  // max hole id + 1
/// Pattern weight excluding holes.
int non_hole_size(const TermPtr& pattern);
/// Operations and constants in the pattern (holes, binders and bound
/// variables excluded).
int non_variable_count(const TermPtr& pattern);
/// Renumbers holes 0..h-1 in first-occurrence order.
TermPtr normalize_holes(const TermPtr& pattern);

/// Every occurrence in every program. Repeated holes must bind the same
/// lifted subtree; bindings may not mention binders inside the pattern.
std::vector<Match> count_matches(const TermPtr& pattern, const IndexedCorpus& corpus);

/// Matches applied when rewriting: outermost first in preorder, skipping
/// occurrences rooted in an applied match's body or in a second copy of a
/// repeated hole's binding.
struct Selection {
  std::vector<int> applied;  // indices into the match list
  std::set<std::string> tasks;
  UtilityScore utility;
};

Selection select_matches(const TermPtr& pattern, const std::vector<Match>& matches, const IndexedCorpus& corpus);

/// Saving of one applied match: non-hole weight - 1 + the weight of every
/// second and later copy of a repeated hole.
int match_saving(const TermPtr& pattern, const Match& m, const IndexedCorpus& corpus);

struct MiningConfig {
  int max_arity = 3;
  int max_rounds = 5;
  int min_distinct_tasks = 2;
  int min_non_variable = 2;
  std::size_t frontier_limit = 200'000;  // queued partial patterns
  std::size_t node_budget = 500'000;     // expanded partial patterns per round
  bool prune = true;

  std::vector<std::string> validate() const;
};

struct Candidate {
  TermPtr pattern;  // normalized
  std::vector<Match> matches;
  Selection selection;
  std::vector<Ty> param_types;
  Ty result_type;
  std::string rejection;  // empty when acceptable

  bool accepted() const { return rejection.empty(); }
};

/// Scores a pattern and applies the acceptance filters.
Candidate evaluate_candidate(const TermPtr& pattern, const IndexedCorpus& corpus, const MiningConfig& cfg);

struct FinalizeResult {
  std::optional<Abstraction> abstraction;
  std::string rejection;
};

/// Holes become parameters in first-occurrence order.
FinalizeResult finalize(const TermPtr& pattern, const IndexedCorpus& corpus, const MiningConfig& cfg,
                        const std::string& name);

/// The hole pattern an abstraction's body stands for.
TermPtr abstraction_pattern(const Abstraction& a);

/// Replaces the selected matches by applications of `a`.
Corpus rewrite(const Corpus& corpus, const Abstraction& a, const Library& lib);

}  // namespace abeam
