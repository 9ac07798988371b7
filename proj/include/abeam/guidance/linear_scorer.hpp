#pragma once

#include <filesystem>
#include <map>
#include <optional>

#include "abeam/guidance/features.hpp"
#include "abeam/guidance/scorer.hpp"

namespace abeam {

/// Features of one (candidate, prefix, position) choice: the candidate's
/// value features placed in a per-position block, then features relating it
/// to the chosen prefix.
enum PairFeature : int {
  kRepeatsPrefix,   // identical to an already chosen argument
  kHeavierPrefix,   // heavier than every chosen argument
  kOpenInBody,      // open value while building a lambda body
  kParamInBody,     // bare lambda parameter while building a lambda body
  kPairFeatureCount,
};

inline constexpr int kPositionBlocks = 4;
inline constexpr int kChoiceDims = kPositionBlocks * kValueFeatureCount + kPairFeatureCount;

std::vector<float> choice_features(std::span<const float> value_features, const ValueEntry& candidate,
                                   std::span<const ValueEntry* const> prefix, int position, int context);

/// Per-operation linear ranking model. Operations without a vector score 0
/// everywhere, which is the uniform policy.
class LinearScorer final : public Scorer {
 public:
  using Params = std::map<std::string, std::vector<double>>;

  LinearScorer() = default;
  explicit LinearScorer(Params p) : params_(std::move(p)) {}

  double score(const Operation& op, std::span<const ValueEntry* const> prefix, const ValueEntry& candidate,
               const ScoreContext& ctx) const override;
  void score_all(const Operation& op, std::span<const ValueEntry* const> prefix, std::span<const int> candidates,
                 const ScoreContext& ctx, std::vector<double>& out) const override;
  std::string kind() const override { return "linear"; }
  /// Ops without a vector score zero at no cost. The trained cost was
  /// measured against the uniform scorer on the toy language.
  std::int64_t units_per_score(const Operation& op) const override {
    return find(op.name) ? kLinearUnitsPerScore : 1;
  }
  static constexpr std::int64_t kLinearUnitsPerScore = 3;

  double score_features(const std::string& op, std::span<const float> phi) const;

  const Params& params() const { return params_; }
  Params& params() { return params_; }
  const std::vector<double>* find(const std::string& op) const;

 private:
  Params params_;
};

std::string save_scorer(const LinearScorer& s);
void save_scorer(const LinearScorer& s, const std::filesystem::path& file);
LinearScorer load_scorer(const std::string& text);
LinearScorer load_scorer_file(const std::filesystem::path& file);

struct WarmStartResult {
  LinearScorer scorer;
  bool neutral = false;  // outermost op had no parameters
  std::string note;
};

/// Gives a new operation the parameter vector of the outermost operation of
/// its body.
WarmStartResult warm_start_new_op(const LinearScorer& scorer, const Abstraction& a);

}  // namespace abeam
