#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace abeam {

/// Sampling without replacement from a distribution over fixed-length
/// choice tuples. Each position's distribution may depend on the chosen
/// prefix; it is requested lazily. Sampled leaves have their probability
/// mass subtracted from every ancestor, so later draws come from the
/// renormalized remainder and never repeat.
class UniqueSampler {
 public:
  /// Fills `probs` for the choices at position `prefix.size()`. Entries need
  /// not sum to 1; zero entries are outside the support.
  using Provider = std::function<void(std::span<const int> prefix, std::vector<double>& probs)>;

  UniqueSampler(int positions, Provider provider, std::uint64_t seed);

  /// Independent per-position distributions.
  static UniqueSampler independent(std::vector<std::vector<double>> dists, std::uint64_t seed);

  /// Up to `budget` new tuples; fewer once the support runs out.
  std::vector<std::vector<int>> sample(std::size_t budget);

  bool exhausted() const { return nodes_[0].done; }
  std::size_t drawn() const { return drawn_; }

 private:
  struct Node {
    double mass = 1.0;       // probability of reaching this prefix
    double remaining = 1.0;  // mass not yet sampled below
    bool expanded = false;
    bool done = false;
    std::vector<double> prob;  // conditional child probabilities
    std::vector<int> child;    // node index or -1
  };

  void expand(int node, std::span<const int> prefix);
  bool child_done(const Node& n, std::size_t i) const;

  int positions_;
  Provider provider_;
  std::mt19937_64 rng_;
  std::vector<Node> nodes_;
  std::size_t drawn_ = 0;
};

}  // namespace abeam
