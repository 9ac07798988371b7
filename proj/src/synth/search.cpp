#include "abeam/synth/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "abeam/synth/sampler.hpp"

namespace abeam {

namespace {

constexpr std::int64_t kUnitsPerPoint = 4;  // per executed evaluation point

struct TupleKey {
  int op, context;
  std::vector<int> args;
  friend bool operator==(const TupleKey&, const TupleKey&) = default;
};

struct TupleKeyHash {
  std::size_t operator()(const TupleKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.op) * 1000003u + static_cast<std::size_t>(k.context);
    for (int a : k.args) h = h * 1000003u ^ static_cast<std::size_t>(a);
    return h;
  }
};

std::vector<int> merge_ids(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void log_softmax(std::vector<double>& s) {
  if (s.empty()) return;
  const double m = *std::max_element(s.begin(), s.end());
  if (std::all_of(s.begin(), s.end(), [m](double x) { return x == m; })) {
    std::fill(s.begin(), s.end(), -std::log(static_cast<double>(s.size())));
    return;
  }
  double z = 0;
  for (double x : s) z += std::exp(x - m);
  const double lse = m + std::log(z);
  for (double& x : s) x -= lse;
}

int tuple_weight(const ValueStore& store, std::span<const int> t) {
  int w = 0;
  for (int id : t) w += store.entry(id).weight;
  return w;
}

// Smallest total weight the positions from `pos` onward can contribute.
std::vector<int> min_rest(const ValueStore& store, const std::vector<std::vector<int>>& cands) {
  std::vector<int> rest(cands.size() + 1, 0);
  for (std::size_t p = cands.size(); p-- > 0;) {
    int m = INT32_MAX;
    for (int id : cands[p]) m = std::min(m, store.entry(id).weight);
    rest[p] = rest[p + 1] + m;
  }
  return rest;
}

}  // namespace

std::vector<std::string> SearchConfig::validate() const {
  std::vector<std::string> errs;
  if (!(per_task_timeout > 0)) errs.push_back("per_task_timeout must be positive");
  if (restart_interval > 0 && restart_interval > per_task_timeout)
    errs.push_back("restart_interval must not exceed per_task_timeout");
  if (beam_size < 0) errs.push_back("beam_size must be positive (0 for unbounded)");
  if (max_weight < 1) errs.push_back("max_weight must be at least 1");
  if (!(seconds_per_unit > 0)) errs.push_back("seconds_per_unit must be positive");
  return errs;
}

std::vector<std::vector<int>> argument_candidates(const ValueStore& store, int op_index, int context) {
  const Operation& op = *store.library().operations()[op_index];
  std::vector<std::vector<int>> cands;
  bool any_open = false;
  for (const Ty& p : op.signature.params()) {
    if (p.kind() == TyKind::Arrow || context == 0) {
      cands.push_back(store.typed(0, p));
    } else {
      const auto& open = store.typed(context, p);
      any_open = any_open || !open.empty();
      cands.push_back(merge_ids(store.typed(0, p), open));
    }
    if (cands.back().empty()) return {};
  }
  if (context > 0 && !any_open) return {};
  return cands;
}

std::vector<std::vector<int>> beam_select_args(const ValueStore& store, int op_index, int context,
                                               const Scorer& scorer, int beam_size, int max_weight,
                                               std::int64_t* scored) {
  const auto cands = argument_candidates(store, op_index, context);
  if (cands.empty()) return {};
  const Operation& op = *store.library().operations()[op_index];
  const auto rest = min_rest(store, cands);
  const int budget = max_weight - 1;

  struct Partial {
    std::vector<int> ids;
    double logp = 0;
    int weight = 0;
    bool open = false;
  };
  struct Step {
    int parent;
    int cand;
    double logp;
    int weight;
    bool open;
  };
  std::vector<Partial> beam(1);
  std::vector<double> scores;
  std::vector<const ValueEntry*> prefix;
  std::vector<Step> next;
  ScoreContext sctx{&store.task(), &store, op_index, 0, context};

  for (std::size_t pos = 0; pos < cands.size(); ++pos) {
    sctx.position = static_cast<int>(pos);
    const bool last = pos + 1 == cands.size();
    next.clear();
    for (std::size_t b = 0; b < beam.size(); ++b) {
      const Partial& part = beam[b];
      prefix.clear();
      for (int id : part.ids) prefix.push_back(&store.entry(id));
      scorer.score_all(op, prefix, cands[pos], sctx, scores);
      if (scored) *scored += static_cast<std::int64_t>(scores.size());
      log_softmax(scores);
      for (std::size_t j = 0; j < cands[pos].size(); ++j) {
        const ValueEntry& c = store.entry(cands[pos][j]);
        const int w = part.weight + c.weight;
        if (w + rest[pos + 1] > budget) continue;
        if (last && context > 0 && !part.open && !c.open()) continue;
        next.push_back({static_cast<int>(b), c.id, part.logp + scores[j], w, part.open || c.open()});
      }
    }
    auto better = [&](const Step& a, const Step& b) {
      if (a.logp != b.logp) return a.logp > b.logp;
      if (a.weight != b.weight) return a.weight < b.weight;
      if (a.parent != b.parent) return beam[a.parent].ids < beam[b.parent].ids;
      return a.cand < b.cand;
    };
    if (beam_size > 0 && next.size() > static_cast<std::size_t>(beam_size)) {
      std::nth_element(next.begin(), next.begin() + beam_size, next.end(), better);
      next.resize(beam_size);
    }
    std::sort(next.begin(), next.end(), better);
    std::vector<Partial> grown;
    grown.reserve(next.size());
    for (const Step& st : next) {
      Partial np{beam[st.parent].ids, st.logp, st.weight, st.open};
      np.ids.push_back(st.cand);
      grown.push_back(std::move(np));
    }
    beam = std::move(grown);
    if (beam.empty()) return {};
  }
  std::vector<std::vector<int>> out;
  out.reserve(beam.size());
  for (Partial& p : beam) out.push_back(std::move(p.ids));
  return out;
}

SolveResult search(const Task& task, const Library& lib, const Scorer& scorer, const SearchConfig& cfg,
                   std::optional<ValueStore>* final_store) {
  SearchClock clock(cfg.clock, cfg.seconds_per_unit);
  SolveResult res;
  const std::size_t budget = cfg.beam_size > 0 ? static_cast<std::size_t>(cfg.beam_size) : SIZE_MAX;
  const int num_ops = static_cast<int>(lib.operations().size());

  for (int r = 0;; ++r) {
    res.restarts = r;
    ValueStore store = init_store(task, lib, cfg.eval_limits);
    if (cfg.on_restart) cfg.on_restart(store, r);
    const int num_ctx = static_cast<int>(store.contexts().size());
    const double restart_at = cfg.restart_interval > 0 ? (r + 1) * cfg.restart_interval
                                                       : std::numeric_limits<double>::infinity();
    std::unordered_map<TupleKey, int, TupleKeyHash> executed;
    struct SamplerSlot {
      std::uint64_t generation;
      std::vector<std::vector<int>> cands;
      UniqueSampler sampler;
    };
    std::map<std::pair<int, int>, SamplerSlot> samplers;
    bool sampling = false;
    bool restart = false;
    int verified = -1;

    auto finish = [&](bool exhausted) {
      res.exhausted = exhausted;
      res.elapsed = clock.elapsed();
      const int sol = store.solution();
      if (sol >= 0 && solves(store.entry(sol).term, task, lib, cfg.eval_limits)) {
        res.solved = true;
        res.program = store.entry(sol).term;
        res.weight = store.entry(sol).weight;
      }
      if (final_store) final_store->emplace(std::move(store));
      return res;
    };
    auto found = [&]() {
      const int sol = store.solution();
      if (sol < 0 || sol == verified) return false;
      verified = sol;
      return cfg.stop_on_solution && solves(store.entry(sol).term, task, lib, cfg.eval_limits);
    };
    if (found()) return finish(false);

    while (!restart) {
      const std::uint64_t gen_before = store.generation();
      bool sampler_live = false;
      for (int op = 0; op < num_ops && !restart; ++op) {
        for (int ctx = 0; ctx < num_ctx && !restart; ++ctx) {
          if (clock.elapsed() >= cfg.per_task_timeout) return finish(false);
          if (clock.elapsed() >= restart_at) {
            restart = true;
            break;
          }
          std::vector<std::vector<int>> tuples;
          if (!sampling) {
            std::int64_t scored = 0;
            tuples = beam_select_args(store, op, ctx, scorer, cfg.beam_size, cfg.max_weight, &scored);
            clock.charge(scored * scorer.units_per_score(*lib.operations()[op]));
          } else {
            auto it = samplers.find({op, ctx});
            if (it == samplers.end() || it->second.generation != store.generation()) {
              auto cands = argument_candidates(store, op, ctx);
              if (cands.empty()) continue;
              auto rest = min_rest(store, cands);
              const Operation* opp = lib.operations()[op].get();
              auto provider = [&store, &scorer, &clock, &cfg, opp, op, ctx, cands, rest](
                                  std::span<const int> prefix, std::vector<double>& probs) {
                const std::size_t pos = prefix.size();
                std::vector<const ValueEntry*> pre;
                int w = 0;
                bool open = false;
                for (std::size_t i = 0; i < pos; ++i) {
                  pre.push_back(&store.entry(cands[i][prefix[i]]));
                  w += pre.back()->weight;
                  open = open || pre.back()->open();
                }
                ScoreContext sctx{&store.task(), &store, op, static_cast<int>(pos), ctx};
                scorer.score_all(*opp, pre, cands[pos], sctx, probs);
                clock.charge(static_cast<std::int64_t>(cands[pos].size()) * scorer.units_per_score(*opp));
                log_softmax(probs);
                const bool last = pos + 1 == cands.size();
                for (std::size_t j = 0; j < probs.size(); ++j) {
                  const ValueEntry& c = store.entry(cands[pos][j]);
                  const bool ok = w + c.weight + rest[pos + 1] <= cfg.max_weight - 1 &&
                                  !(last && ctx > 0 && !open && !c.open());
                  probs[j] = ok ? std::exp(probs[j]) : 0.0;
                }
              };
              const std::uint64_t seed = (cfg.random_seed + static_cast<std::uint64_t>(r)) * 0x9e3779b97f4a7c15ULL ^
                                         (static_cast<std::uint64_t>(op) << 32) ^ static_cast<std::uint64_t>(ctx) ^
                                         (store.generation() << 16);
              const int positions = static_cast<int>(cands.size());
              SamplerSlot slot{store.generation(), cands, UniqueSampler(positions, std::move(provider), seed)};
              it = samplers.insert_or_assign({op, ctx}, std::move(slot)).first;
            }
            // Sampled choices index into the snapshot taken with the sampler.
            const auto& cands = it->second.cands;
            for (auto& t : it->second.sampler.sample(budget)) {
              for (std::size_t i = 0; i < t.size(); ++i) t[i] = cands[i][t[i]];
              tuples.push_back(std::move(t));
            }
            sampler_live = sampler_live || !it->second.sampler.exhausted();
          }

          for (const auto& t : tuples) {
            const int w = tuple_weight(store, t);
            TupleKey key{op, ctx, t};
            auto ex = executed.find(key);
            if (ex != executed.end() && ex->second <= w) continue;
            if (clock.elapsed() >= cfg.per_task_timeout) return finish(false);
            executed[key] = w;
            std::int64_t steps = 0;
            store.apply(op, t, ctx, &steps);
            ++res.candidates_evaluated;
            clock.charge(steps + kUnitsPerPoint * static_cast<std::int64_t>(store.points(ctx)));
            if (found()) return finish(false);
          }
        }
      }
      if (restart) break;
      if (store.generation() == gen_before) {
        if (!cfg.unique_sampling || (sampling && !sampler_live)) return finish(true);
        sampling = true;
      } else {
        sampling = false;
      }
    }
  }
}

ExhaustiveResult exhaustive_search(const Task& task, const Library& lib, int max_weight, double timeout,
                                   const EvalLimits& limits, ClockMode clock_mode, double seconds_per_unit) {
  SearchClock clock(clock_mode, seconds_per_unit);
  ExhaustiveResult res{init_store(task, lib, limits), nullptr, false, 0, 0};
  ValueStore& store = res.store;
  const int num_ops = static_cast<int>(lib.operations().size());
  const int num_ctx = static_cast<int>(store.contexts().size());

  for (int w = 1; w <= max_weight && !res.timed_out; ++w) {
    const int snapshot = static_cast<int>(store.size());
    for (int op = 0; op < num_ops && !res.timed_out; ++op) {
      for (int ctx = 0; ctx < num_ctx && !res.timed_out; ++ctx) {
        auto cands = argument_candidates(store, op, ctx);
        if (cands.empty()) continue;
        // Bucket each position's candidates by weight.
        const std::size_t n = cands.size();
        std::vector<std::map<int, std::vector<int>>> buckets(n);
        bool empty = false;
        for (std::size_t p = 0; p < n; ++p) {
          for (int id : cands[p])
            if (id < snapshot) buckets[p][store.entry(id).weight].push_back(id);
          empty = empty || buckets[p].empty();
        }
        if (empty) continue;
        std::vector<int> tuple(n);
        std::vector<const std::vector<int>*> chosen(n);

        // Cross product of the chosen buckets.
        auto run_product = [&](auto&& self, std::size_t p, bool open) -> void {
          if (res.timed_out) return;
          if (p == n) {
            if (ctx > 0 && !open) return;
            if (clock.elapsed() >= timeout) {
              res.timed_out = true;
              return;
            }
            std::int64_t steps = 0;
            store.apply(op, tuple, ctx, &steps);
            ++res.candidates_evaluated;
            clock.charge(steps + kUnitsPerPoint * static_cast<std::int64_t>(store.points(ctx)));
            return;
          }
          for (int id : *chosen[p]) {
            tuple[p] = id;
            self(self, p + 1, open || store.entry(id).open());
          }
        };
        // Weight compositions summing to w - 1.
        auto compose = [&](auto&& self, std::size_t p, int remaining) -> void {
          if (res.timed_out) return;
          if (p == n) {
            if (remaining == 0) run_product(run_product, 0, false);
            return;
          }
          for (auto& [bw, ids] : buckets[p]) {
            if (bw > remaining) break;
            chosen[p] = &ids;
            self(self, p + 1, remaining - bw);
          }
        };
        compose(compose, 0, w - 1);
      }
    }
  }
  res.elapsed = clock.elapsed();
  if (store.solution() >= 0) res.solution = store.entry(store.solution()).term;
  return res;
}

std::uint64_t syntactic_combinations(const Library& lib, int length) {
  const std::uint64_t n = lib.operations().size() + lib.constants().size();
  std::uint64_t total = 1;
  for (int i = 0; i < length; ++i) {
    if (n != 0 && total > UINT64_MAX / n) return UINT64_MAX;
    total *= n;
  }
  return total;
}

}  // namespace abeam
