#include "abeam/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace abeam {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("bad value for '" + key + "': '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  return parse_number<double>(key, v);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad value for '" + key + "': '" + v + "' (expected true/false)");
}

std::string fmt(double d) {
  if (std::isinf(d)) return "inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, p);
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field int_field(T RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = parse_number<T>(k, v); },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

#define SUB_INT(sub, name)                                                                                    \
  Field {                                                                                                     \
    [](RunConfig& c, const std::string& k, const std::string& v) {                                           \
      c.sub.name = parse_number<decltype(c.sub.name)>(k, v);                                                  \
    },                                                                                                        \
        [](const RunConfig& c) { return std::to_string(c.sub.name); }                                        \
  }
#define SUB_DOUBLE(sub, name)                                                                                 \
  Field {                                                                                                     \
    [](RunConfig& c, const std::string& k, const std::string& v) { c.sub.name = parse_double(k, v); },       \
        [](const RunConfig& c) { return fmt(c.sub.name); }                                                    \
  }

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"iterations", int_field(&RunConfig::iterations)},
      {"trials", int_field(&RunConfig::trials)},
      {"folds", int_field(&RunConfig::folds)},
      {"fold", int_field(&RunConfig::fold)},
      {"workers", int_field(&RunConfig::workers)},
      {"output_dir", {[](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; },
                      [](const RunConfig& c) { return c.output_dir; }}},
      {"seed", int_field(&RunConfig::random_seed)},
      {"mode",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "abstraction") c.mode = RunMode::Abstraction;
          else if (v == "baseline") c.mode = RunMode::Baseline;
          else throw ConfigError("bad value for '" + k + "': '" + v + "' (expected abstraction/baseline)");
        },
        [](const RunConfig& c) { return std::string(c.mode == RunMode::Abstraction ? "abstraction" : "baseline"); }}},
      {"scorer",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "linear") c.scorer = ScorerMode::Linear;
          else if (v == "uniform") c.scorer = ScorerMode::Uniform;
          else throw ConfigError("bad value for '" + k + "': '" + v + "' (expected linear/uniform)");
        },
        [](const RunConfig& c) { return std::string(c.scorer == ScorerMode::Linear ? "linear" : "uniform"); }}},
      {"library", {[](RunConfig& c, const std::string&, const std::string& v) { c.library = v; },
                   [](const RunConfig& c) { return c.library; }}},
      {"search.timeout", SUB_DOUBLE(search, per_task_timeout)},
      {"search.restart_interval", SUB_DOUBLE(search, restart_interval)},
      {"search.beam_size", SUB_INT(search, beam_size)},
      {"search.max_weight", SUB_INT(search, max_weight)},
      {"search.unique_sampling",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.search.unique_sampling = parse_bool(k, v); },
        [](const RunConfig& c) { return std::string(c.search.unique_sampling ? "true" : "false"); }}},
      {"search.clock",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "virtual") c.search.clock = c.traces.clock = ClockMode::Virtual;
          else if (v == "wall") c.search.clock = c.traces.clock = ClockMode::Wall;
          else throw ConfigError("bad value for '" + k + "': '" + v + "' (expected virtual/wall)");
        },
        [](const RunConfig& c) { return std::string(c.search.clock == ClockMode::Virtual ? "virtual" : "wall"); }}},
      {"search.seconds_per_unit",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.search.seconds_per_unit = c.traces.seconds_per_unit = parse_double(k, v);
        },
        [](const RunConfig& c) { return fmt(c.search.seconds_per_unit); }}},
      {"eval.max_steps",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.search.eval_limits.max_steps = c.traces.eval_limits.max_steps = parse_number<std::int64_t>(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.search.eval_limits.max_steps); }}},
      {"traces.episode_timeout", SUB_DOUBLE(traces, episode_timeout)},
      {"traces.per_abstraction_bonus", SUB_DOUBLE(traces, per_abstraction_bonus)},
      {"traces.max_weight", SUB_INT(traces, max_weight)},
      {"traces.parallel_searches", SUB_INT(traces, parallel_searches)},
      {"traces.episodes", SUB_INT(traces, episodes)},
      {"traces.targets_per_episode", SUB_INT(traces, targets_per_episode)},
      {"traces.max_negatives", SUB_INT(traces, max_negatives)},
      {"train.max_steps", SUB_INT(train, max_steps)},
      {"train.learning_rate", SUB_DOUBLE(train, learning_rate)},
      {"train.l2", SUB_DOUBLE(train, l2)},
      {"train.min_op_steps", SUB_INT(train, min_op_steps)},
      {"mining.max_arity", SUB_INT(mining, max_arity)},
      {"mining.max_rounds", SUB_INT(mining, max_rounds)},
      {"mining.frontier_limit", SUB_INT(mining, frontier_limit)},
      {"mining.node_budget", SUB_INT(mining, node_budget)},
  };
  return f;
}

const Field& field(const std::string& key) {
  for (const auto& [k, f] : fields())
    if (k == key) return f;
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> errs;
  if (iterations < 1) errs.push_back("iterations must be >= 1");
  if (trials < 1) errs.push_back("trials must be >= 1");
  if (folds != 1 && folds != 2) errs.push_back("folds must be 1 or 2");
  if (fold < 0 || fold > folds) errs.push_back("fold must be in 0..folds");
  if (workers < 1) errs.push_back("workers must be >= 1");
  if (output_dir.empty()) errs.push_back("output_dir must be set");
  for (auto& e : search.validate()) errs.push_back("search: " + e);
  for (auto& e : traces.validate()) errs.push_back("traces: " + e);
  for (auto& e : mining.validate()) errs.push_back("mining: " + e);
  if (train.max_steps < 0) errs.push_back("train: max_steps must be >= 0");
  if (!(train.learning_rate > 0)) errs.push_back("train: learning_rate must be positive");
  if (train.l2 < 0) errs.push_back("train: l2 must be >= 0");
  return errs;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, f] : fields()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  field(key).set(cfg, key, value);
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) { return field(key).get(cfg); }

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(n) + ": " + e.what());
    }
  }
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  apply_config_text(cfg, text);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string format_run_config(const RunConfig& cfg) {
  std::ostringstream os;
  for (const auto& [k, f] : fields()) os << k << " = " << f.get(cfg) << "\n";
  return os.str();
}

Library resolve_library(const std::string& spec) {
  if (spec == "list") return default_list_dsl();
  if (spec == "toy") return toy_loop_dsl();
  if (!std::filesystem::exists(spec)) throw ConfigError("unknown library '" + spec + "'");
  return load_library_file(spec);
}

}  // namespace abeam
