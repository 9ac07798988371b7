#include "abeam/librarian/mine.hpp"

#include <fstream>
#include <map>
#include <queue>
#include <sstream>

namespace abeam {
namespace {

struct PMatch {
  int program;
  int root;
  std::vector<int> bind;  // node per hole id
};

struct State {
  TermPtr pattern;
  std::vector<int> open;    // undecided holes, preorder
  std::vector<int> params;  // committed holes
  std::vector<int> depth;   // pattern binders above each hole
  std::vector<PMatch> matches;
  int bound = 0;
  std::size_t seq = 0;
};
using StatePtr = std::shared_ptr<const State>;

struct QueueOrder {
  bool operator()(const StatePtr& a, const StatePtr& b) const {
    if (a->bound != b->bound) return a->bound < b->bound;
    return a->seq > b->seq;
  }
};

TermPtr replace_hole(const TermPtr& t, int h, const TermPtr& repl) {
  switch (t->kind()) {
    case TermKind::Hole: return t->index() == h ? repl : t;
    case TermKind::Lam: return Term::lam(t->arity(), replace_hole(t->body(), h, repl));
    case TermKind::Apply: {
      std::vector<TermPtr> args;
      for (const auto& a : t->args()) args.push_back(replace_hole(a, h, repl));
      return Term::apply(t->fn(), std::move(args));
    }
    default: return t;
  }
}

bool liftable(const Term& t, int depth) {
  auto mf = min_free_index(t);
  return !mf || *mf >= depth;
}

class Miner {
 public:
  Miner(const IndexedCorpus& c, const MiningConfig& cfg, const std::function<void(const PatternEvent&)>& obs)
      : c_(c), cfg_(cfg), obs_(obs) {}

  PatternSearchResult run() {
    auto root = std::make_shared<State>();
    root->pattern = Term::hole(0);
    root->open = {0};
    root->depth = {0};
    for (std::size_t p = 0; p < c_.programs(); ++p) {
      const auto& nodes = c_.nodes(p);
      for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].term->is_prim_call())
          root->matches.push_back({static_cast<int>(p), static_cast<int>(i), {static_cast<int>(i)}});
    }
    if (!finish(*root)) return res_;
    push(root, -1);

    while (!queue_.empty()) {
      StatePtr s = queue_.top();
      queue_.pop();
      if (cfg_.prune && s->bound < threshold()) {
        res_.pruned += queue_.size() + 1;
        break;
      }
      if (res_.expanded >= cfg_.node_budget) {
        res_.budget_exhausted = true;
        break;
      }
      ++res_.expanded;
      if (s->open.empty()) {
        complete(*s);
        continue;
      }
      expand(s);
    }
    return res_;
  }

 private:
  int threshold() const { return std::max(res_.best ? res_.best->selection.utility.value : 0, 1); }

  // Fills in the bound; false when no refinement can be accepted.
  bool finish(State& s) {
    std::map<std::string, int> tasks;
    int bound = 0;
    for (const auto& m : s.matches) {
      int b = c_.node(m.program, m.root).size - 1;
      for (int p : s.params) b -= c_.node(m.program, m.bind[p]).size;
      bound += b;
      tasks[c_.corpus()[m.program].task];
    }
    s.bound = bound;
    if (s.matches.empty()) return false;
    if (static_cast<int>(tasks.size()) < cfg_.min_distinct_tasks) return false;
    if (static_cast<int>(s.params.size()) > cfg_.max_arity) return false;
    return true;
  }

  void push(std::shared_ptr<State> s, int parent_bound) {
    if (obs_) obs_({s->pattern, s->bound, parent_bound, false, -1, false});
    if (cfg_.prune && s->bound < threshold()) {
      ++res_.pruned;
      return;
    }
    if (queue_.size() >= cfg_.frontier_limit) {
      res_.frontier_capped = true;
      return;
    }
    s->seq = seq_++;
    queue_.push(std::move(s));
  }

  void complete(const State& s) {
    ++res_.completed;
    Candidate cand = evaluate_candidate(s.pattern, c_, cfg_);
    if (obs_)
      obs_({s.pattern, s.bound, s.bound, true, cand.selection.utility.value, cand.accepted()});
    if (cand.accepted() && (!res_.best || better_candidate(cand, *res_.best))) res_.best = std::move(cand);
  }

  std::shared_ptr<State> child(const State& s, TermPtr pattern) {
    auto n = std::make_shared<State>();
    n->pattern = std::move(pattern);
    n->open.assign(s.open.begin() + 1, s.open.end());
    n->params = s.params;
    n->depth = s.depth;
    return n;
  }

  void expand(const StatePtr& sp) {
    const State& s = *sp;
    int h = s.open.front();
    int d = s.depth[h];

    // Head symbols present among the bindings.
    std::map<std::string, std::vector<int>> groups;
    for (std::size_t i = 0; i < s.matches.size(); ++i) {
      const auto& m = s.matches[i];
      const Term& t = *c_.node(m.program, m.bind[h]).term;
      std::string key;
      switch (t.kind()) {
        case TermKind::Apply:
          if (t.is_prim_call()) key = "A " + t.fn()->name() + " " + std::to_string(t.args().size());
          break;
        case TermKind::Lam: key = "L " + std::to_string(t.arity()); break;
        case TermKind::BoundVar:
          if (t.index() < d) key = "B " + std::to_string(t.index());
          break;
        case TermKind::InputVar:
        case TermKind::Hole: break;
        default: key = "C " + print_term(t); break;
      }
      if (!key.empty()) groups[key].push_back(static_cast<int>(i));
    }
    for (const auto& [key, idx] : groups) {
      const auto& m0 = s.matches[idx.front()];
      const auto& n0 = c_.node(m0.program, m0.bind[h]);
      const Term& t0 = *n0.term;
      int next = static_cast<int>(s.depth.size());
      std::vector<int> fresh;
      TermPtr repl;
      int new_depth = d;
      if (t0.kind() == TermKind::Apply) {
        std::vector<TermPtr> args;
        for (std::size_t k = 0; k < t0.args().size(); ++k) {
          fresh.push_back(next + static_cast<int>(k));
          args.push_back(Term::hole(fresh.back()));
        }
        repl = Term::apply(t0.fn(), std::move(args));
      } else if (t0.kind() == TermKind::Lam) {
        fresh.push_back(next);
        new_depth = d + t0.arity();
        repl = Term::lam(t0.arity(), Term::hole(next));
      } else {
        repl = n0.term;
      }
      auto n = child(s, replace_hole(s.pattern, h, repl));
      n->open.insert(n->open.begin(), fresh.begin(), fresh.end());
      for (std::size_t k = 0; k < fresh.size(); ++k) n->depth.push_back(new_depth);
      n->matches.reserve(idx.size());
      for (int i : idx) {
        PMatch pm = s.matches[i];
        const auto& node = c_.node(pm.program, pm.bind[h]);
        for (int ch : node.children) pm.bind.push_back(ch);
        n->matches.push_back(std::move(pm));
      }
      if (finish(*n)) push(std::move(n), s.bound);
    }

    // Keep the hole as a new parameter.
    {
      auto n = child(s, s.pattern);
      n->params.push_back(h);
      for (const auto& m : s.matches)
        if (liftable(*c_.node(m.program, m.bind[h]).term, d)) n->matches.push_back(m);
      if (finish(*n)) push(std::move(n), s.bound);
    }

    // Or make it another occurrence of an existing parameter.
    for (int j : s.params) {
      auto n = child(s, replace_hole(s.pattern, h, Term::hole(j)));
      for (const auto& m : s.matches) {
        const Term& bt = *c_.node(m.program, m.bind[h]).term;
        if (!liftable(bt, d)) continue;
        TermPtr a = shift(c_.node(m.program, m.bind[h]).term, -d);
        TermPtr b = shift(c_.node(m.program, m.bind[j]).term, -s.depth[j]);
        if (structurally_equal(a, b)) n->matches.push_back(m);
      }
      if (finish(*n)) push(std::move(n), s.bound);
    }
  }

  const IndexedCorpus& c_;
  const MiningConfig& cfg_;
  const std::function<void(const PatternEvent&)>& obs_;
  std::priority_queue<StatePtr, std::vector<StatePtr>, QueueOrder> queue_;
  std::size_t seq_ = 0;
  PatternSearchResult res_;
};

}  // namespace

bool better_candidate(const Candidate& a, const Candidate& b) {
  const auto& ua = a.selection.utility;
  const auto& ub = b.selection.utility;
  if (ua.value != ub.value) return ua.value > ub.value;
  if (ua.body_size != ub.body_size) return ua.body_size > ub.body_size;
  if (ua.arity != ub.arity) return ua.arity < ub.arity;
  return print_term(a.pattern) < print_term(b.pattern);
}

PatternSearchResult best_pattern(const IndexedCorpus& corpus, const MiningConfig& cfg,
                                 const std::function<void(const PatternEvent&)>& observer) {
  Miner m(corpus, cfg, observer);
  return m.run();
}

MineResult mine(const Corpus& corpus, const Library& lib, const MiningConfig& cfg, int iteration) {
  if (auto errs = cfg.validate(); !errs.empty()) throw std::invalid_argument("mining config: " + errs.front());
  MineResult r;
  r.library = lib;
  r.corpus = corpus;
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    MiningRound mr;
    mr.round = round;
    mr.corpus_size_before = corpus_size(r.corpus);
    IndexedCorpus ic(r.corpus, r.library);
    PatternSearchResult ps = best_pattern(ic, cfg);
    mr.expanded = ps.expanded;
    mr.pruned = ps.pruned;
    mr.budget_exhausted = ps.budget_exhausted;
    mr.frontier_capped = ps.frontier_capped;
    mr.corpus_size_after = mr.corpus_size_before;
    if (ps.best) {
      FinalizeResult fin =
          finalize(ps.best->pattern, ic, cfg, "fn_" + std::to_string(r.library.next_abstraction_id()));
      if (fin.abstraction) {
        Abstraction a = *fin.abstraction;
        a.round = round;
        a.iteration = iteration;
        Corpus next = rewrite(r.corpus, a, r.library);
        r.library = extend_with_abstraction(r.library, a);
        r.corpus = std::move(next);
        mr.corpus_size_after = corpus_size(r.corpus);
        mr.abstraction = a;
        r.abstractions.push_back(std::move(a));
      }
    }
    bool stop = !mr.abstraction;
    r.rounds.push_back(std::move(mr));
    if (stop) break;
  }
  return r;
}

std::string format_mining_report(const MineResult& r, int iteration) {
  std::ostringstream os;
  os << "abeam-mining-report 1\n";
  os << "iteration " << iteration << "\n";
  os << "library " << r.library.name() << " version " << r.library.version() << "\n";
  for (const auto& mr : r.rounds) {
    os << "round " << mr.round << " expanded " << mr.expanded << " pruned " << mr.pruned << " budget_exhausted "
       << mr.budget_exhausted << " frontier_capped " << mr.frontier_capped << " corpus_size " << mr.corpus_size_before
       << " -> " << mr.corpus_size_after << "\n";
    if (!mr.abstraction) {
      os << "  none accepted\n";
      continue;
    }
    const auto& a = *mr.abstraction;
    os << "  abstraction " << a.name << " arity " << a.arity << " type " << a.signature.str() << "\n";
    os << "  body " << print_term(a.body) << "\n";
    os << "  utility matches " << a.utility.matches << " body_size " << a.utility.body_size << " value "
       << a.utility.value << "\n";
    os << "  tasks";
    for (const auto& t : a.found_in_tasks) os << ' ' << t;
    os << "\n";
  }
  return os.str();
}

void write_mining_report(const MineResult& r, int iteration, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << format_mining_report(r, iteration);
}

}  // namespace abeam
