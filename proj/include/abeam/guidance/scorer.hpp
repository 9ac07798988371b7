#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abeam/dsl/library.hpp"

namespace abeam {

struct Task;
struct ValueEntry;
class ValueStore;

/// What a scorer may condition on besides the candidate itself.
struct ScoreContext {
  const Task* task = nullptr;
  const ValueStore* store = nullptr;  // snapshot being searched
  int op_index = -1;
  int position = 0;
  int context = 0;  // 0: building a concrete value; c > 0: a lambda body
};

/// Argument-selection policy. Scores are unnormalized log-probabilities;
/// callers softmax them per position. Implementations must be pure.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual double score(const Operation& op, std::span<const ValueEntry* const> prefix,
                       const ValueEntry& candidate, const ScoreContext& ctx) const = 0;

  /// Scores every candidate id; `out` is resized.
  virtual void score_all(const Operation& op, std::span<const ValueEntry* const> prefix,
                         std::span<const int> candidates, const ScoreContext& ctx,
                         std::vector<double>& out) const;

  virtual std::string kind() const = 0;
  /// Virtual clock units charged per candidate scored for `op`.
  virtual std::int64_t units_per_score(const Operation&) const { return 1; }
};

class UniformScorer final : public Scorer {
 public:
  double score(const Operation&, std::span<const ValueEntry* const>, const ValueEntry&,
               const ScoreContext&) const override {
    return 0.0;
  }
  void score_all(const Operation&, std::span<const ValueEntry* const>, std::span<const int> candidates,
                 const ScoreContext&, std::vector<double>& out) const override {
    out.assign(candidates.size(), 0.0);
  }
  std::string kind() const override { return "uniform"; }
};

}  // namespace abeam
