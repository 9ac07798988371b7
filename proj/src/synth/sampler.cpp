#include "abeam/synth/sampler.hpp"

#include <cmath>
#include <numeric>

namespace abeam {

UniqueSampler::UniqueSampler(int positions, Provider provider, std::uint64_t seed)
    : positions_(positions), provider_(std::move(provider)), rng_(seed) {
  nodes_.push_back(Node{});
}

UniqueSampler UniqueSampler::independent(std::vector<std::vector<double>> dists, std::uint64_t seed) {
  const int n = static_cast<int>(dists.size());
  return UniqueSampler(
      n,
      [d = std::move(dists)](std::span<const int> prefix, std::vector<double>& probs) { probs = d[prefix.size()]; },
      seed);
}

void UniqueSampler::expand(int node, std::span<const int> prefix) {
  std::vector<double> p;
  provider_(prefix, p);
  double total = 0;
  for (double& x : p) {
    if (!(x > 0) || !std::isfinite(x)) x = 0;
    total += x;
  }
  Node& n = nodes_[node];
  n.expanded = true;
  n.prob.assign(p.size(), 0.0);
  if (total > 0)
    for (std::size_t i = 0; i < p.size(); ++i) n.prob[i] = p[i] / total;
  n.child.assign(p.size(), -1);
  if (total <= 0) n.done = true;
}

bool UniqueSampler::child_done(const Node& n, std::size_t i) const {
  return n.prob[i] <= 0 || (n.child[i] >= 0 && nodes_[n.child[i]].done);
}

std::vector<std::vector<int>> UniqueSampler::sample(std::size_t budget) {
  std::vector<std::vector<int>> out;
  std::vector<int> path, prefix;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (out.size() < budget && !nodes_[0].done) {
    path.assign(1, 0);
    prefix.clear();
    int cur = 0;
    bool dead_end = false;
    while (static_cast<int>(prefix.size()) < positions_) {
      if (!nodes_[cur].expanded) expand(cur, prefix);
      if (nodes_[cur].done) {
        dead_end = true;
        break;
      }
      const Node& n = nodes_[cur];
      double total = 0;
      std::size_t open = 0;
      for (std::size_t i = 0; i < n.prob.size(); ++i) {
        if (child_done(n, i)) continue;
        ++open;
        total += n.child[i] >= 0 ? nodes_[n.child[i]].remaining : n.mass * n.prob[i];
      }
      std::size_t pick = n.prob.size();
      if (total > 0) {
        double r = unit(rng_) * total;
        for (std::size_t i = 0; i < n.prob.size(); ++i) {
          if (child_done(n, i)) continue;
          pick = i;
          r -= n.child[i] >= 0 ? nodes_[n.child[i]].remaining : n.mass * n.prob[i];
          if (r < 0) break;
        }
      } else {
        // Remaining mass lost to rounding; fall back to uniform over what is left.
        std::size_t k = std::uniform_int_distribution<std::size_t>(0, open - 1)(rng_);
        for (std::size_t i = 0; i < n.prob.size(); ++i)
          if (!child_done(n, i) && k-- == 0) {
            pick = i;
            break;
          }
      }
      if (nodes_[cur].child[pick] < 0) {
        Node c;
        c.mass = nodes_[cur].mass * nodes_[cur].prob[pick];
        c.remaining = c.mass;
        nodes_.push_back(std::move(c));
        nodes_[cur].child[pick] = static_cast<int>(nodes_.size()) - 1;
      }
      cur = nodes_[cur].child[pick];
      path.push_back(cur);
      prefix.push_back(static_cast<int>(pick));
    }

    const double leaf_mass = dead_end ? nodes_[cur].remaining : nodes_[cur].mass;
    nodes_[cur].done = true;
    // Propagate mass and exhaustion upward.
    for (std::size_t k = path.size(); k-- > 0;) {
      Node& n = nodes_[path[k]];
      n.remaining = std::max(0.0, n.remaining - leaf_mass);
      if (k + 1 < path.size() && !n.done) {
        bool all = true;
        for (std::size_t i = 0; i < n.prob.size() && all; ++i) all = child_done(n, i);
        n.done = all;
      }
    }
    if (!dead_end) {
      out.push_back(prefix);
      ++drawn_;
    }
  }
  return out;
}

}  // namespace abeam
