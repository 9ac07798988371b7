#include "abeam/guidance/scorer.hpp"

#include "abeam/synth/store.hpp"

namespace abeam {

void Scorer::score_all(const Operation& op, std::span<const ValueEntry* const> prefix,
                       std::span<const int> candidates, const ScoreContext& ctx,
                       std::vector<double>& out) const {
  out.resize(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    out[i] = score(op, prefix, ctx.store->entry(candidates[i]), ctx);
}

}  // namespace abeam
