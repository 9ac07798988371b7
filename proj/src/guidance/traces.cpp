#include "abeam/guidance/traces.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "abeam/util/parallel.hpp"

namespace abeam {

namespace {

Task random_inputs_task(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> elem(-5, 9), len(3, 8), nex(3, 5), shape(0, 2);
  std::vector<std::pair<std::string, Ty>> decl;
  switch (shape(rng)) {
    case 0: decl = {{"l", Ty::int_list()}}; break;
    case 1: decl = {{"l", Ty::int_list()}, {"k", Ty::integer()}}; break;
    default: decl = {{"a", Ty::int_list()}, {"b", Ty::int_list()}}; break;
  }
  std::vector<std::pair<std::vector<Value>, Value>> ex;
  const int n = nex(rng);
  for (int e = 0; e < n; ++e) {
    std::vector<Value> ins;
    for (const auto& [name, ty] : decl) {
      if (ty.kind() == TyKind::Int) {
        ins.push_back(Value::integer(elem(rng)));
      } else {
        IntList l(len(rng));
        for (auto& x : l) x = elem(rng);
        ins.push_back(Value::list(std::move(l)));
      }
    }
    ex.push_back({std::move(ins), Value::integer(0)});
  }
  return make_task("episode_" + std::to_string(seed), decl, ex);
}

struct EpisodeOut {
  TraceEpisode episode;
  std::vector<TraceTarget> targets;
  std::vector<TraceStep> steps;
};

EpisodeOut run_episode(const Library& lib, const TraceGenConfig& cfg, double timeout, int index) {
  EpisodeOut out;
  const std::uint64_t seed = cfg.random_seed * 1'000'003ULL + static_cast<std::uint64_t>(index);
  out.episode.seed = seed;
  out.episode.task = random_inputs_task(seed);
  const Task& task = out.episode.task;
  ExhaustiveResult ex =
      exhaustive_search(task, lib, cfg.max_weight, timeout, cfg.eval_limits, cfg.clock, cfg.seconds_per_unit);
  out.episode.values = static_cast<std::int64_t>(ex.store.size());
  out.episode.timed_out = ex.timed_out;
  const ValueStore& store = ex.store;

  std::vector<int> pool;
  for (const ValueEntry& e : store.entries())
    if (e.kind == EntryKind::Apply && !e.open() && e.type.kind() != TyKind::Arrow) pool.push_back(e.id);
  std::mt19937_64 rng(seed ^ 0x7a26e7);
  std::shuffle(pool.begin(), pool.end(), rng);
  if (pool.size() > static_cast<std::size_t>(cfg.targets_per_episode)) pool.resize(cfg.targets_per_episode);
  std::sort(pool.begin(), pool.end());

  for (int tid : pool) {
    const ValueEntry& target = store.entry(tid);
    TraceTarget tt{index, target.term, target.values};
    const int target_index = static_cast<int>(out.targets.size());
    out.targets.push_back(tt);

    Task ttask = task;
    for (std::size_t e = 0; e < ttask.examples.size(); ++e) ttask.examples[e].output = target.values[e];
    ttask.output_type = target.type;

    // Walk the provenance tree; each application contributes one step per argument.
    std::vector<int> stack{tid};
    while (!stack.empty()) {
      const ValueEntry& node = store.entry(stack.back());
      stack.pop_back();
      if (node.is_lambda()) {
        stack.push_back(node.link);
        continue;
      }
      if (node.kind != EntryKind::Apply) continue;
      const Operation& op = *lib.operations()[node.op];
      const auto cands = argument_candidates(store, node.op, node.context);
      std::vector<const ValueEntry*> prefix;
      for (std::size_t pos = 0; pos < node.args.size(); ++pos) {
        const ValueEntry& chosen = store.entry(node.args[pos]);
        TraceStep st;
        st.target = target_index;
        st.op = op.name;
        st.position = static_cast<int>(pos);
        st.context = node.context;
        st.node = node.term;
        st.arg = chosen.term;
        st.chosen = choice_features(value_features(chosen, ttask), chosen, prefix, st.position, node.context);
        std::vector<int> negs;
        if (pos < cands.size())
          for (int c : cands[pos])
            if (c != chosen.id) negs.push_back(c);
        std::shuffle(negs.begin(), negs.end(), rng);
        if (negs.size() > static_cast<std::size_t>(cfg.max_negatives)) negs.resize(cfg.max_negatives);
        for (int n : negs) {
          const ValueEntry& ne = store.entry(n);
          st.negatives.push_back(choice_features(value_features(ne, ttask), ne, prefix, st.position, node.context));
        }
        out.steps.push_back(std::move(st));
        prefix.push_back(&chosen);
        stack.push_back(chosen.id);
      }
    }
  }
  return out;
}

void write_floats(std::ostream& out, const std::vector<float>& v) {
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v[i]);
    out << (i ? "," : "") << std::string_view(buf, p - buf);
  }
}

std::vector<float> read_floats(std::string_view s) {
  std::vector<float> v;
  while (!s.empty()) {
    const auto comma = s.find(',');
    std::string_view tok = s.substr(0, comma);
    float x = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc()) throw std::runtime_error("bad feature value '" + std::string(tok) + "'");
    v.push_back(x);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return v;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i)
    if (i == line.size() || line[i] == '\t') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

}  // namespace

std::vector<std::string> TraceGenConfig::validate() const {
  std::vector<std::string> errs;
  if (!(episode_timeout > 0)) errs.push_back("episode_timeout must be positive");
  if (per_abstraction_bonus < 0) errs.push_back("per_abstraction_bonus must not be negative");
  if (max_weight < 1) errs.push_back("trace max_weight must be at least 1");
  if (parallel_searches < 1) errs.push_back("parallel_searches must be positive");
  if (episodes < 0 || targets_per_episode < 1 || max_negatives < 1) errs.push_back("trace counts must be positive");
  return errs;
}

double effective_timeout(const TraceGenConfig& cfg, const Library& lib) {
  return cfg.episode_timeout + cfg.per_abstraction_bonus * lib.abstraction_count();
}

TraceDataset generate_traces(const Library& lib, const TraceGenConfig& cfg) {
  TraceDataset d;
  d.library_name = lib.name();
  d.library_version = lib.version();
  d.config = cfg;
  d.effective_timeout = effective_timeout(cfg, lib);
  std::vector<EpisodeOut> outs(cfg.episodes);
  parallel_for(outs.size(), cfg.parallel_searches,
               [&](std::size_t i) { outs[i] = run_episode(lib, cfg, d.effective_timeout, static_cast<int>(i)); });
  for (auto& o : outs) {
    const int offset = static_cast<int>(d.targets.size());
    d.episodes.push_back(std::move(o.episode));
    for (auto& t : o.targets) d.targets.push_back(std::move(t));
    for (auto& s : o.steps) {
      s.target += offset;
      d.steps.push_back(std::move(s));
    }
  }
  return d;
}

Task target_task(const TraceDataset& d, const TraceTarget& t) {
  Task task = d.episodes[t.episode].task;
  task.name = "target_" + std::to_string(&t - d.targets.data());
  for (std::size_t e = 0; e < task.examples.size(); ++e) task.examples[e].output = t.outputs[e];
  if (!t.outputs.empty()) task.output_type = value_type(t.outputs[0]);
  return task;
}

std::string save_traces(const TraceDataset& d) {
  std::ostringstream out;
  const TraceGenConfig& c = d.config;
  out << "abeam-traces 1\n";
  out << "library\t" << d.library_name << "\t" << d.library_version << "\n";
  out << "config\tepisode_timeout=" << c.episode_timeout << "\tper_abstraction_bonus=" << c.per_abstraction_bonus
      << "\tmax_weight=" << c.max_weight << "\tepisodes=" << c.episodes
      << "\ttargets_per_episode=" << c.targets_per_episode << "\tmax_negatives=" << c.max_negatives
      << "\tseed=" << c.random_seed << "\n";
  out << "effective_timeout\t" << d.effective_timeout << "\n";
  out << "dims\t" << kChoiceDims << "\n";
  for (const TraceEpisode& e : d.episodes) {
    out << "episode\t" << e.seed << "\t" << e.values << "\t" << (e.timed_out ? 1 : 0) << "\n";
    std::string task = format_tasks({e.task});
    std::istringstream ts(task);
    for (std::string line; std::getline(ts, line);) out << "| " << line << "\n";
  }
  for (const TraceTarget& t : d.targets) {
    out << "target\t" << t.episode << "\t" << print_term(t.term) << "\t";
    for (std::size_t i = 0; i < t.outputs.size(); ++i) out << (i ? " " : "") << t.outputs[i].str();
    out << "\n";
  }
  out << "# step\ttarget\top\tposition\tcontext\tnode\targ\tchosen\tnegatives(;-separated)\n";
  for (const TraceStep& s : d.steps) {
    out << "step\t" << s.target << "\t" << s.op << "\t" << s.position << "\t" << s.context << "\t"
        << print_term(s.node) << "\t" << print_term(s.arg) << "\t";
    write_floats(out, s.chosen);
    out << "\t";
    for (std::size_t i = 0; i < s.negatives.size(); ++i) {
      if (i) out << ";";
      write_floats(out, s.negatives[i]);
    }
    out << "\n";
  }
  return out.str();
}

void save_traces(const TraceDataset& d, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << save_traces(d);
}

TraceDataset load_traces(const std::string& text, const Library& lib) {
  TraceDataset d;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "abeam-traces 1") throw std::runtime_error("not a trace file");
  std::string pending_task;
  auto flush_task = [&]() {
    if (pending_task.empty()) return;
    d.episodes.back().task = parse_tasks(pending_task).at(0);
    pending_task.clear();
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("| ", 0) == 0) {
      pending_task += line.substr(2) + "\n";
      continue;
    }
    flush_task();
    auto f = split_tabs(line);
    const std::string& key = f[0];
    if (key == "library" && f.size() == 3) {
      d.library_name = f[1];
      d.library_version = std::stoi(f[2]);
    } else if (key == "config") {
      for (std::size_t i = 1; i < f.size(); ++i) {
        const auto eq = f[i].find('=');
        const std::string k = f[i].substr(0, eq), v = f[i].substr(eq + 1);
        TraceGenConfig& c = d.config;
        if (k == "episode_timeout") c.episode_timeout = std::stod(v);
        else if (k == "per_abstraction_bonus") c.per_abstraction_bonus = std::stod(v);
        else if (k == "max_weight") c.max_weight = std::stoi(v);
        else if (k == "episodes") c.episodes = std::stoi(v);
        else if (k == "targets_per_episode") c.targets_per_episode = std::stoi(v);
        else if (k == "max_negatives") c.max_negatives = std::stoi(v);
        else if (k == "seed") c.random_seed = std::stoull(v);
      }
    } else if (key == "effective_timeout") {
      d.effective_timeout = std::stod(f.at(1));
    } else if (key == "dims") {
      if (std::stoi(f.at(1)) != kChoiceDims) throw std::runtime_error("trace feature dims do not match this build");
    } else if (key == "episode" && f.size() == 4) {
      TraceEpisode e;
      e.seed = std::stoull(f[1]);
      e.values = std::stoll(f[2]);
      e.timed_out = f[3] == "1";
      d.episodes.push_back(std::move(e));
    } else if (key == "target" && f.size() == 4) {
      TraceTarget t;
      t.episode = std::stoi(f[1]);
      const Task& task = d.episodes.at(t.episode).task;
      t.term = parse_term(f[2], lib.symbols(task.input_names));
      std::istringstream vs(f[3]);
      for (std::string v; vs >> v;) t.outputs.push_back(parse_value(v));
      d.targets.push_back(std::move(t));
    } else if (key == "step" && f.size() == 9) {
      TraceStep s;
      s.target = std::stoi(f[1]);
      s.op = f[2];
      s.position = std::stoi(f[3]);
      s.context = std::stoi(f[4]);
      const Task& task = d.episodes.at(d.targets.at(s.target).episode).task;
      SymbolTable syms = lib.symbols(task.input_names);
      // Arguments inside lambda bodies mention the body's parameters.
      syms.outer_binders = 8;
      s.node = parse_term(f[5], syms);
      s.arg = parse_term(f[6], syms);
      s.chosen = read_floats(f[7]);
      std::string_view negs = f[8];
      while (!negs.empty()) {
        const auto semi = negs.find(';');
        s.negatives.push_back(read_floats(negs.substr(0, semi)));
        if (semi == std::string_view::npos) break;
        negs.remove_prefix(semi + 1);
      }
      d.steps.push_back(std::move(s));
    } else {
      throw std::runtime_error("bad trace line: " + line.substr(0, 60));
    }
  }
  flush_task();
  return d;
}

TraceDataset load_traces_file(const std::filesystem::path& file, const Library& lib) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_traces(ss.str(), lib);
}

TrainResult train_scorer(const TraceDataset& data, const LinearScorer* init, const TrainConfig& cfg) {
  TrainResult r;
  if (init) r.scorer = *init;
  std::map<std::string, std::vector<const TraceStep*>> by_op;
  for (const TraceStep& s : data.steps)
    if (!s.negatives.empty()) by_op[s.op].push_back(&s);
  for (const TraceStep& s : data.steps) r.op_records[s.op] += 1;

  std::vector<std::pair<std::vector<double>*, const std::vector<const TraceStep*>*>> trainable;
  for (auto& [op, recs] : by_op) {
    if (static_cast<int>(recs.size()) < cfg.min_op_steps) continue;
    auto& w = r.scorer.params()[op];
    if (w.size() != static_cast<std::size_t>(kChoiceDims)) w.assign(kChoiceDims, 0.0);
    trainable.push_back({&w, &recs});
  }
  for (const auto& [op, n] : r.op_records) {
    auto it = by_op.find(op);
    if (it == by_op.end() || static_cast<int>(it->second.size()) < cfg.min_op_steps) r.underfit_ops.push_back(op);
  }

  std::mt19937_64 rng(cfg.random_seed);
  auto margin = [](const std::vector<double>& w, const std::vector<float>& a, const std::vector<float>& b) {
    double m = 0;
    for (std::size_t i = 0; i < w.size(); ++i) m += w[i] * (static_cast<double>(a[i]) - b[i]);
    return m;
  };
  if (!trainable.empty()) {
    for (int step = 0; step < cfg.max_steps; ++step) {
      const double lr = cfg.learning_rate / std::sqrt(1.0 + step / 100.0);
      for (auto& [w, recs] : trainable) {
        const TraceStep& s = *(*recs)[rng() % recs->size()];
        const auto& neg = s.negatives[rng() % s.negatives.size()];
        const double m = margin(*w, s.chosen, neg);
        const double g = 1.0 / (1.0 + std::exp(m));  // -dloss/dmargin
        for (std::size_t i = 0; i < w->size(); ++i)
          (*w)[i] += lr * (g * (static_cast<double>(s.chosen[i]) - neg[i]) - cfg.l2 * (*w)[i]);
      }
      r.steps = step + 1;
    }
  }
  double loss = 0;
  std::size_t pairs = 0;
  for (const TraceStep& s : data.steps) {
    const auto* w = r.scorer.find(s.op);
    for (const auto& neg : s.negatives) {
      const double m = w ? margin(*w, s.chosen, neg) : 0.0;
      loss += std::log1p(std::exp(-m));
      ++pairs;
    }
  }
  r.final_loss = pairs ? loss / static_cast<double>(pairs) : 0.0;
  return r;
}

}  // namespace abeam
