#include "abeam/guidance/linear_scorer.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "abeam/synth/store.hpp"

namespace abeam {

std::vector<float> choice_features(std::span<const float> vf, const ValueEntry& c,
                                   std::span<const ValueEntry* const> prefix, int position, int context) {
  std::vector<float> phi(kChoiceDims, 0.0f);
  const int block = std::min(position, kPositionBlocks - 1) * kValueFeatureCount;
  std::copy(vf.begin(), vf.begin() + std::min<std::size_t>(vf.size(), kValueFeatureCount), phi.begin() + block);
  float* pair = phi.data() + kPositionBlocks * kValueFeatureCount;
  bool heavier = !prefix.empty();
  for (const ValueEntry* p : prefix) {
    if (p->id == c.id) pair[kRepeatsPrefix] = 1.0f;
    heavier = heavier && c.weight > p->weight;
  }
  pair[kHeavierPrefix] = heavier ? 1.0f : 0.0f;
  if (context > 0) {
    pair[kOpenInBody] = c.open() ? 1.0f : 0.0f;
    pair[kParamInBody] = c.kind == EntryKind::Param ? 1.0f : 0.0f;
  }
  return phi;
}

const std::vector<double>* LinearScorer::find(const std::string& op) const {
  auto it = params_.find(op);
  return it == params_.end() ? nullptr : &it->second;
}

double LinearScorer::score_features(const std::string& op, std::span<const float> phi) const {
  const auto* w = find(op);
  if (!w) return 0.0;
  double s = 0;
  for (std::size_t i = 0; i < phi.size() && i < w->size(); ++i) s += (*w)[i] * phi[i];
  return s;
}

double LinearScorer::score(const Operation& op, std::span<const ValueEntry* const> prefix, const ValueEntry& c,
                           const ScoreContext& ctx) const {
  if (!find(op.name)) return 0.0;
  return score_features(op.name, choice_features(c.features, c, prefix, ctx.position, ctx.context));
}

void LinearScorer::score_all(const Operation& op, std::span<const ValueEntry* const> prefix,
                             std::span<const int> candidates, const ScoreContext& ctx,
                             std::vector<double>& out) const {
  const auto* w = find(op.name);
  if (!w || w->size() < static_cast<std::size_t>(kChoiceDims)) {
    if (!w) {
      out.assign(candidates.size(), 0.0);
      return;
    }
    out.resize(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) out[i] = score(op, prefix, ctx.store->entry(candidates[i]), ctx);
    return;
  }
  // Same sum as score_features over choice_features, skipping the zero
  // entries; adding zeros never changes a double sum, so results are
  // bit-identical.
  const int block = std::min(ctx.position, kPositionBlocks - 1) * kValueFeatureCount;
  const double* wb = w->data() + block;
  const double* wp = w->data() + kPositionBlocks * kValueFeatureCount;
  out.resize(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const ValueEntry& c = ctx.store->entry(candidates[i]);
    const std::size_t n = std::min<std::size_t>(c.features.size(), kValueFeatureCount);
    double s = 0;
    for (std::size_t k = 0; k < n; ++k) s += wb[k] * c.features[k];
    bool repeats = false, heavier = !prefix.empty();
    for (const ValueEntry* p : prefix) {
      repeats = repeats || p->id == c.id;
      heavier = heavier && c.weight > p->weight;
    }
    if (repeats) s += wp[kRepeatsPrefix];
    if (heavier) s += wp[kHeavierPrefix];
    if (ctx.context > 0) {
      if (c.open()) s += wp[kOpenInBody];
      if (c.kind == EntryKind::Param) s += wp[kParamInBody];
    }
    out[i] = s;
  }
}

std::string save_scorer(const LinearScorer& s) {
  std::ostringstream out;
  out << "abeam-scorer 1\ndims " << kChoiceDims << "\n";
  char buf[32];
  for (const auto& [op, w] : s.params()) {
    out << "op " << op;
    for (double x : w) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
      out << ' ' << std::string_view(buf, p - buf);
    }
    out << "\n";
  }
  return out.str();
}

void save_scorer(const LinearScorer& s, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << save_scorer(s);
}

LinearScorer load_scorer(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "abeam-scorer 1") throw std::runtime_error("not a scorer file");
  LinearScorer::Params params;
  std::size_t dims = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "dims") {
      ls >> dims;
    } else if (key == "op") {
      std::string name, tok;
      ls >> name;
      std::vector<double> w;
      while (ls >> tok) {
        double x = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (ec != std::errc()) throw std::runtime_error("bad number '" + tok + "' for op " + name);
        w.push_back(x);
      }
      if (w.size() != dims) throw std::runtime_error("op " + name + " has " + std::to_string(w.size()) + " weights");
      params[name] = std::move(w);
    } else {
      throw std::runtime_error("unknown scorer line '" + line + "'");
    }
  }
  if (dims != static_cast<std::size_t>(kChoiceDims))
    throw std::runtime_error("scorer has " + std::to_string(dims) + " dims, expected " + std::to_string(kChoiceDims));
  return LinearScorer(std::move(params));
}

LinearScorer load_scorer_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scorer(ss.str());
}

WarmStartResult warm_start_new_op(const LinearScorer& scorer, const Abstraction& a) {
  WarmStartResult r{scorer, false, ""};
  if (a.arity == 0) {
    r.note = a.name + " is a constant; no parameters needed";
    return r;
  }
  const TermPtr body = a.body->kind() == TermKind::Lam ? a.body->body() : a.body;
  const std::string outer = body->is_prim_call() ? body->fn()->name() : "";
  if (const auto* w = scorer.find(outer)) {
    r.scorer.params()[a.name] = *w;
    r.note = a.name + " initialized from " + outer;
  } else {
    r.scorer.params()[a.name] = std::vector<double>(kChoiceDims, 0.0);
    r.neutral = true;
    r.note = a.name + " initialized neutral: " + (outer.empty() ? "no outermost operation" : outer + " has no parameters");
  }
  return r;
}

}  // namespace abeam
