#include "abeam/librarian/corpus.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace abeam {

int corpus_size(const Corpus& c) {
  int s = 0;
  for (const auto& p : c) s += term_size(p.program);
  return s;
}

namespace {

int flatten(const TermPtr& t, int depth, const std::vector<Ty>& types, std::size_t& k,
            std::vector<IndexedCorpus::Node>& out) {
  int idx = static_cast<int>(out.size());
  out.push_back({t, types.at(k++), depth, term_size(t), 0, {}});
  std::vector<int> kids;
  if (t->kind() == TermKind::Apply) {
    if (t->is_prim_call()) {
      ++k;  // the operation symbol
    } else {
      kids.push_back(flatten(t->fn(), depth, types, k, out));
    }
    for (const auto& a : t->args()) kids.push_back(flatten(a, depth, types, k, out));
  } else if (t->kind() == TermKind::Lam) {
    kids.push_back(flatten(t->body(), depth + t->arity(), types, k, out));
  }
  out[idx].children = std::move(kids);
  out[idx].end = static_cast<int>(out.size());
  return idx;
}

bool liftable(const Term& t, int depth) {
  auto mf = min_free_index(t);
  return !mf || *mf >= depth;
}

bool match_at(const Term& p, const IndexedCorpus& c, int prog, int node, int pdepth, Match& m) {
  const auto& n = c.node(prog, node);
  const Term& t = *n.term;
  switch (p.kind()) {
    case TermKind::Hole: {
      int h = p.index();
      if (!liftable(t, pdepth)) return false;
      if (m.bindings[h] >= 0) {
        TermPtr a = shift(n.term, -pdepth);
        return structurally_equal(a, m.lifted(c, h));
      }
      m.bindings[h] = node;
      m.hole_depth[h] = pdepth;
      return true;
    }
    case TermKind::Apply: {
      if (!p.is_prim_call() || !t.is_prim_call()) return false;
      if (p.fn()->name() != t.fn()->name() || p.args().size() != t.args().size()) return false;
      for (std::size_t i = 0; i < p.args().size(); ++i)
        if (!match_at(*p.args()[i], c, prog, n.children[i], pdepth, m)) return false;
      return true;
    }
    case TermKind::Lam:
      if (t.kind() != TermKind::Lam || t.arity() != p.arity()) return false;
      return match_at(*p.body(), c, prog, n.children[0], pdepth + p.arity(), m);
    case TermKind::BoundVar:
      return p.index() < pdepth && t.kind() == TermKind::BoundVar && t.index() == p.index();
    case TermKind::InputVar:
      return false;
    default:
      return structurally_equal(p, t);
  }
}

void hole_occurrences(const Term& t, std::vector<int>& occ) {
  if (t.kind() == TermKind::Hole) {
    if (static_cast<int>(occ.size()) <= t.index()) occ.resize(t.index() + 1, 0);
    ++occ[t.index()];
    return;
  }
  for (const auto& ch : t.children()) hole_occurrences(*ch, occ);
}

// Marks the nodes a rewrite at `node` removes: the non-hole part and every
// copy of a repeated hole's binding after the first.
void block(const Term& p, const IndexedCorpus& c, int prog, int node, std::vector<char>& seen,
           std::vector<char>& blocked) {
  const auto& n = c.node(prog, node);
  if (p.kind() == TermKind::Hole) {
    int h = p.index();
    if (!seen[h]) {
      seen[h] = 1;
    } else {
      std::fill(blocked.begin() + node, blocked.begin() + n.end, 1);
    }
    return;
  }
  blocked[node] = 1;
  if (p.kind() == TermKind::Apply) {
    for (std::size_t i = 0; i < p.args().size(); ++i) block(*p.args()[i], c, prog, n.children[i], seen, blocked);
  } else if (p.kind() == TermKind::Lam) {
    block(*p.body(), c, prog, n.children[0], seen, blocked);
  }
}

TermPtr holes_to_params(const TermPtr& t, int depth, int arity) {
  switch (t->kind()) {
    case TermKind::Hole: return Term::bound_var(depth + arity - 1 - t->index());
    case TermKind::Lam: return Term::lam(t->arity(), holes_to_params(t->body(), depth + t->arity(), arity));
    case TermKind::Apply: {
      std::vector<TermPtr> args;
      for (const auto& a : t->args()) args.push_back(holes_to_params(a, depth, arity));
      return Term::apply(holes_to_params(t->fn(), depth, arity), std::move(args));
    }
    default: return t;
  }
}

TermPtr params_to_holes(const TermPtr& t, int depth, int arity) {
  switch (t->kind()) {
    case TermKind::BoundVar:
      return t->index() >= depth ? Term::hole(arity - 1 - (t->index() - depth)) : t;
    case TermKind::Lam: return Term::lam(t->arity(), params_to_holes(t->body(), depth + t->arity(), arity));
    case TermKind::Apply: {
      std::vector<TermPtr> args;
      for (const auto& a : t->args()) args.push_back(params_to_holes(a, depth, arity));
      return Term::apply(params_to_holes(t->fn(), depth, arity), std::move(args));
    }
    default: return t;
  }
}

}  // namespace

IndexedCorpus::IndexedCorpus(const Corpus& corpus, const Library& lib) : corpus_(&corpus) {
  nodes_.resize(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::vector<Ty> types;
    TypeContext ctx;
    ctx.inputs = &corpus[i].inputs;
    ctx.symbols = &lib.symbol_types();
    ctx.node_types = &types;
    try {
      infer_type(*corpus[i].program, ctx);
    } catch (const TypeError& e) {
      throw std::invalid_argument("corpus program for task '" + corpus[i].task + "' does not typecheck: " +
                                  e.what());
    }
    std::size_t k = 0;
    flatten(corpus[i].program, 0, types, k, nodes_[i]);
  }
}

TermPtr Match::lifted(const IndexedCorpus& c, int h) const {
  return shift(c.node(program, bindings[h]).term, -hole_depth[h]);
}

int hole_count(const TermPtr& pattern) {
  std::vector<int> occ;
  hole_occurrences(*pattern, occ);
  return static_cast<int>(occ.size());
}

int non_hole_size(const TermPtr& pattern) { return term_size(pattern); }

int non_variable_count(const TermPtr& pattern) {
  const Term& t = *pattern;
  switch (t.kind()) {
    case TermKind::Hole:
    case TermKind::BoundVar:
    case TermKind::InputVar: return 0;
    case TermKind::Lam: return non_variable_count(t.body());
    case TermKind::Apply: {
      int n = 1;
      if (!t.is_prim_call()) n = non_variable_count(t.fn());
      for (const auto& a : t.args()) n += non_variable_count(a);
      return n;
    }
    default: return 1;
  }
}

TermPtr normalize_holes(const TermPtr& pattern) {
  std::map<int, int> ids;
  std::function<TermPtr(const TermPtr&)> go = [&](const TermPtr& t) -> TermPtr {
    switch (t->kind()) {
      case TermKind::Hole: {
        auto [it, fresh] = ids.emplace(t->index(), static_cast<int>(ids.size()));
        return Term::hole(it->second);
      }
      case TermKind::Lam: return Term::lam(t->arity(), go(t->body()));
      case TermKind::Apply: {
        TermPtr fn = go(t->fn());
        std::vector<TermPtr> args;
        for (const auto& a : t->args()) args.push_back(go(a));
        return Term::apply(std::move(fn), std::move(args));
      }
      default: return t;
    }
  };
  return go(pattern);
}

std::vector<Match> count_matches(const TermPtr& pattern, const IndexedCorpus& corpus) {
  std::vector<Match> out;
  int holes = hole_count(pattern);
  for (std::size_t p = 0; p < corpus.programs(); ++p) {
    const auto& nodes = corpus.nodes(p);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      Match m;
      m.program = static_cast<int>(p);
      m.root = static_cast<int>(i);
      m.bindings.assign(holes, -1);
      m.hole_depth.assign(holes, 0);
      if (match_at(*pattern, corpus, m.program, m.root, 0, m)) out.push_back(std::move(m));
    }
  }
  return out;
}

int match_saving(const TermPtr& pattern, const Match& m, const IndexedCorpus& corpus) {
  std::vector<int> occ;
  hole_occurrences(*pattern, occ);
  int s = term_size(pattern) - 1;
  for (std::size_t h = 0; h < occ.size(); ++h)
    if (occ[h] > 1) s += (occ[h] - 1) * corpus.node(m.program, m.bindings[h]).size;
  return s;
}

Selection select_matches(const TermPtr& pattern, const std::vector<Match>& matches, const IndexedCorpus& corpus) {
  Selection s;
  s.utility.body_size = term_size(pattern);
  s.utility.arity = hole_count(pattern);
  std::vector<int> order(matches.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::pair(matches[a].program, matches[a].root) < std::pair(matches[b].program, matches[b].root);
  });
  std::vector<char> blocked;
  int cur = -1;
  for (int i : order) {
    const Match& m = matches[i];
    if (m.program != cur) {
      cur = m.program;
      blocked.assign(corpus.nodes(cur).size(), 0);
    }
    if (blocked[m.root]) continue;
    s.applied.push_back(i);
    s.tasks.insert(corpus.corpus()[m.program].task);
    s.utility.value += match_saving(pattern, m, corpus);
    std::vector<char> seen(s.utility.arity, 0);
    block(*pattern, corpus, m.program, m.root, seen, blocked);
  }
  s.utility.matches = static_cast<int>(s.applied.size());
  return s;
}

std::vector<std::string> MiningConfig::validate() const {
  std::vector<std::string> errs;
  if (max_arity < 0) errs.push_back("max_arity must be >= 0");
  if (max_rounds < 0) errs.push_back("max_rounds must be >= 0");
  if (min_distinct_tasks < 1) errs.push_back("min_distinct_tasks must be >= 1");
  if (min_non_variable < 1) errs.push_back("min_non_variable must be >= 1");
  if (frontier_limit == 0) errs.push_back("frontier_limit must be positive");
  if (node_budget == 0) errs.push_back("node_budget must be positive");
  return errs;
}

Candidate evaluate_candidate(const TermPtr& pattern, const IndexedCorpus& corpus, const MiningConfig& cfg) {
  Candidate c;
  c.pattern = normalize_holes(pattern);
  if (!c.pattern->is_prim_call()) {
    c.rejection = "root is not an operation application";
    return c;
  }
  int arity = hole_count(c.pattern);
  int nonvar = non_variable_count(c.pattern);
  if (nonvar < cfg.min_non_variable) {
    c.rejection = "trivial: " + std::to_string(nonvar) + " non-variable node(s)";
    return c;
  }
  if (arity > cfg.max_arity) {
    c.rejection = "arity " + std::to_string(arity) + " exceeds " + std::to_string(cfg.max_arity);
    return c;
  }
  c.matches = count_matches(c.pattern, corpus);
  c.selection = select_matches(c.pattern, c.matches, corpus);
  if (c.selection.applied.empty()) {
    c.rejection = "no matches";
    return c;
  }
  c.param_types.assign(arity, Ty());
  for (std::size_t k = 0; k < c.selection.applied.size(); ++k) {
    const Match& m = c.matches[c.selection.applied[k]];
    const Ty& rt = corpus.node(m.program, m.root).type;
    if (k == 0) c.result_type = rt;
    else if (!(rt == c.result_type)) c.rejection = "inconsistent result types";
    for (int h = 0; h < arity; ++h) {
      const Ty& t = corpus.node(m.program, m.bindings[h]).type;
      if (k == 0) c.param_types[h] = t;
      else if (!(t == c.param_types[h])) c.rejection = "inconsistent types for parameter " + std::to_string(h);
    }
    if (!c.rejection.empty()) return c;
  }
  if (static_cast<int>(c.selection.tasks.size()) < cfg.min_distinct_tasks) {
    c.rejection = "found in " + std::to_string(c.selection.tasks.size()) + " task(s)";
    return c;
  }
  if (c.selection.utility.value <= 0) c.rejection = "no compression";
  return c;
}

FinalizeResult finalize(const TermPtr& pattern, const IndexedCorpus& corpus, const MiningConfig& cfg,
                        const std::string& name) {
  FinalizeResult r;
  Candidate c = evaluate_candidate(pattern, corpus, cfg);
  if (!c.accepted()) {
    r.rejection = c.rejection;
    return r;
  }
  Abstraction a;
  a.name = name;
  a.arity = static_cast<int>(c.param_types.size());
  if (a.arity == 0) {
    a.body = c.pattern;
    a.signature = c.result_type;
  } else {
    a.body = Term::lam(a.arity, holes_to_params(c.pattern, 0, a.arity));
    a.signature = Ty::arrow(c.param_types, c.result_type);
  }
  a.found_in_tasks = c.selection.tasks;
  a.utility = c.selection.utility;
  r.abstraction = std::move(a);
  return r;
}

TermPtr abstraction_pattern(const Abstraction& a) {
  if (a.arity == 0) return a.body;
  return params_to_holes(a.body->body(), 0, a.arity);
}

Corpus rewrite(const Corpus& corpus, const Abstraction& a, const Library& lib) {
  IndexedCorpus ic(corpus, lib);
  TermPtr pattern = abstraction_pattern(a);
  std::vector<Match> matches = count_matches(pattern, ic);
  Selection sel = select_matches(pattern, matches, ic);
  std::vector<std::map<int, const Match*>> at(corpus.size());
  for (int i : sel.applied) at[matches[i].program][matches[i].root] = &matches[i];

  Corpus out = corpus;
  for (std::size_t p = 0; p < corpus.size(); ++p) {
    if (at[p].empty()) continue;
    int prog = static_cast<int>(p);
    std::function<TermPtr(int)> rw = [&](int node) -> TermPtr {
      const auto& n = ic.node(prog, node);
      if (auto it = at[p].find(node); it != at[p].end()) {
        const Match& m = *it->second;
        if (a.arity == 0) return Term::prim(a.name);
        std::vector<TermPtr> args;
        for (int h = 0; h < a.arity; ++h) args.push_back(shift(rw(m.bindings[h]), -m.hole_depth[h]));
        return Term::call(a.name, std::move(args));
      }
      const Term& t = *n.term;
      if (t.kind() == TermKind::Lam) return Term::lam(t.arity(), rw(n.children[0]));
      if (t.kind() != TermKind::Apply) return n.term;
      std::vector<TermPtr> kids;
      for (int ch : n.children) kids.push_back(rw(ch));
      if (t.is_prim_call()) return Term::apply(t.fn(), std::move(kids));
      TermPtr fn = kids.front();
      kids.erase(kids.begin());
      return Term::apply(std::move(fn), std::move(kids));
    };
    out[p].program = rw(0);
  }
  return out;
}

}  // namespace abeam
