#include "dbf/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dbf/csv.hpp"
#include "dbf/errors.hpp"
#include "dbf/heuristics.hpp"

namespace dbf {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T v;
  if (!(in >> v) || !(in >> std::ws).eof())
    throw ConfigError(key, "cannot parse '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key, "expected true/false, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number<int>(key, item));
  }
  if (out.empty()) throw ConfigError(key, "expected a comma-separated integer list");
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

EnvConfig RunConfig::env_config() const {
  EnvConfig e;
  e.cluster_cores = cluster_cores;
  e.window = WindowConfig{window_head, window_tail};
  e.weights = RewardWeights{reward_w1, reward_w2, reward_w3};
  e.episode_placements = episode_placements;
  e.episode_jobs = episode_jobs;
  return e;
}

std::map<std::string, std::string> config_to_map(const RunConfig& c) {
  std::map<std::string, std::string> m;
  m["cluster.cores"] = std::to_string(c.cluster_cores);
  m["window.head"] = std::to_string(c.window_head);
  m["window.tail"] = std::to_string(c.window_tail);
  m["reward.w1"] = format_double(c.reward_w1);
  m["reward.w2"] = format_double(c.reward_w2);
  m["reward.w3"] = format_double(c.reward_w3);
  m["episode.placements"] = std::to_string(c.episode_placements);
  m["episode.jobs"] = std::to_string(c.episode_jobs);
  m["workload.source"] = c.workload_source;
  m["workload.synthetic.cores"] = std::to_string(c.synthetic.cores);
  m["workload.synthetic.runtime_log_mean"] = format_double(c.synthetic.runtime_log_mean);
  m["workload.synthetic.runtime_log_sigma"] = format_double(c.synthetic.runtime_log_sigma);
  m["workload.synthetic.runtime_cap"] = format_double(c.synthetic.runtime_cap);
  m["workload.synthetic.pow2_bias"] = format_double(c.synthetic.pow2_bias);
  m["workload.synthetic.arrival_rate"] = format_double(c.synthetic.arrival_rate);
  m["workload.synthetic.seed"] = std::to_string(c.synthetic.seed);
  m["workload.synthetic.count"] = std::to_string(c.synthetic_count);
  m["scheduler"] = c.scheduler;
  m["ppo.hidden"] = join_ints(c.hidden);
  m["ppo.learning_rate"] = format_double(c.ppo.learning_rate);
  m["ppo.clip"] = format_double(c.ppo.clip);
  m["ppo.gamma"] = format_double(c.ppo.gamma);
  m["ppo.minibatch"] = std::to_string(c.ppo.minibatch);
  m["ppo.epochs"] = std::to_string(c.ppo.epochs);
  m["ppo.entropy_coef"] = format_double(c.ppo.entropy_coef);
  m["ppo.value_coef"] = format_double(c.ppo.value_coef);
  m["ppo.use_gae"] = c.ppo.use_gae ? "true" : "false";
  m["ppo.gae_lambda"] = format_double(c.ppo.gae_lambda);
  m["train.episodes"] = std::to_string(c.train_episodes);
  m["train.checkpoint_every"] = std::to_string(c.checkpoint_every);
  m["eval.episodes"] = std::to_string(c.eval_episodes);
  m["eval.greedy"] = c.eval_greedy ? "true" : "false";
  m["eval.checkpoint"] = c.eval_checkpoint;
  m["seed"] = std::to_string(c.seed);
  m["out.dir"] = c.out_dir;
  return m;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : config_to_map(RunConfig{})) keys.push_back(k);
  return keys;
}

void apply_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "cluster.cores") c.cluster_cores = parse_number<int>(key, value);
  else if (key == "window.head") c.window_head = parse_number<int>(key, value);
  else if (key == "window.tail") c.window_tail = parse_number<int>(key, value);
  else if (key == "reward.w1") c.reward_w1 = parse_number<double>(key, value);
  else if (key == "reward.w2") c.reward_w2 = parse_number<double>(key, value);
  else if (key == "reward.w3") c.reward_w3 = parse_number<double>(key, value);
  else if (key == "episode.placements") c.episode_placements = parse_number<std::size_t>(key, value);
  else if (key == "episode.jobs") c.episode_jobs = parse_number<std::size_t>(key, value);
  else if (key == "workload.source") c.workload_source = value;
  else if (key == "workload.synthetic.cores") c.synthetic.cores = parse_number<int>(key, value);
  else if (key == "workload.synthetic.runtime_log_mean") c.synthetic.runtime_log_mean = parse_number<double>(key, value);
  else if (key == "workload.synthetic.runtime_log_sigma") c.synthetic.runtime_log_sigma = parse_number<double>(key, value);
  else if (key == "workload.synthetic.runtime_cap") c.synthetic.runtime_cap = parse_number<double>(key, value);
  else if (key == "workload.synthetic.pow2_bias") c.synthetic.pow2_bias = parse_number<double>(key, value);
  else if (key == "workload.synthetic.arrival_rate") c.synthetic.arrival_rate = parse_number<double>(key, value);
  else if (key == "workload.synthetic.seed") c.synthetic.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "workload.synthetic.count") c.synthetic_count = parse_number<std::size_t>(key, value);
  else if (key == "scheduler") c.scheduler = value;
  else if (key == "ppo.hidden") c.hidden = parse_int_list(key, value);
  else if (key == "ppo.learning_rate") c.ppo.learning_rate = parse_number<double>(key, value);
  else if (key == "ppo.clip") c.ppo.clip = parse_number<double>(key, value);
  else if (key == "ppo.gamma") c.ppo.gamma = parse_number<double>(key, value);
  else if (key == "ppo.minibatch") c.ppo.minibatch = parse_number<int>(key, value);
  else if (key == "ppo.epochs") c.ppo.epochs = parse_number<int>(key, value);
  else if (key == "ppo.entropy_coef") c.ppo.entropy_coef = parse_number<double>(key, value);
  else if (key == "ppo.value_coef") c.ppo.value_coef = parse_number<double>(key, value);
  else if (key == "ppo.use_gae") c.ppo.use_gae = parse_bool(key, value);
  else if (key == "ppo.gae_lambda") c.ppo.gae_lambda = parse_number<double>(key, value);
  else if (key == "train.episodes") c.train_episodes = parse_number<std::size_t>(key, value);
  else if (key == "train.checkpoint_every") c.checkpoint_every = parse_number<std::size_t>(key, value);
  else if (key == "eval.episodes") c.eval_episodes = parse_number<std::size_t>(key, value);
  else if (key == "eval.greedy") c.eval_greedy = parse_bool(key, value);
  else if (key == "eval.checkpoint") c.eval_checkpoint = value;
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "out.dir") c.out_dir = value;
  else throw ConfigError(key, "unknown configuration key");
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config", "line " + std::to_string(line_no) + ": expected key = value");
    apply_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

void validate_config(const RunConfig& c) {
  if (c.cluster_cores < 1) throw ConfigError("cluster.cores", "must be >= 1");
  if (c.window_head < 0) throw ConfigError("window.head", "must be >= 0");
  if (c.window_tail < 0) throw ConfigError("window.tail", "must be >= 0");
  if (c.window_head + c.window_tail < 1)
    throw ConfigError("window.head", "head + tail must be >= 1");
  auto check_weight = [](const char* key, double w) {
    if (w < 0.0 || w > 1.0) throw ConfigError(key, "must be in [0, 1]");
  };
  check_weight("reward.w1", c.reward_w1);
  check_weight("reward.w2", c.reward_w2);
  check_weight("reward.w3", c.reward_w3);
  if (c.reward_w1 + c.reward_w2 + c.reward_w3 > 1.0 + 1e-12)
    throw ConfigError("reward.w1", "weights must sum to at most 1");
  if (c.episode_placements < 1) throw ConfigError("episode.placements", "must be >= 1");
  if (c.scheduler != "agent" && !heuristic_from_name(c.scheduler))
    throw ConfigError("scheduler", "unknown scheduler '" + c.scheduler + "'");
  if (c.hidden.empty()) throw ConfigError("ppo.hidden", "needs at least one layer");
  for (int h : c.hidden)
    if (h < 1) throw ConfigError("ppo.hidden", "layer sizes must be >= 1");
  if (c.ppo.learning_rate < 0) throw ConfigError("ppo.learning_rate", "must be >= 0");
  if (c.ppo.clip <= 0) throw ConfigError("ppo.clip", "must be > 0");
  if (c.ppo.gamma <= 0 || c.ppo.gamma > 1) throw ConfigError("ppo.gamma", "must be in (0, 1]");
  if (c.ppo.minibatch < 1) throw ConfigError("ppo.minibatch", "must be >= 1");
  if (c.ppo.epochs < 1) throw ConfigError("ppo.epochs", "must be >= 1");
  if (c.ppo.entropy_coef < 0) throw ConfigError("ppo.entropy_coef", "must be >= 0");
  if (c.ppo.value_coef < 0) throw ConfigError("ppo.value_coef", "must be >= 0");
  if (c.ppo.gae_lambda < 0 || c.ppo.gae_lambda > 1)
    throw ConfigError("ppo.gae_lambda", "must be in [0, 1]");
  if (c.train_episodes < 1) throw ConfigError("train.episodes", "must be >= 1");
  if (c.checkpoint_every < 1) throw ConfigError("train.checkpoint_every", "must be >= 1");
  if (c.eval_episodes < 1) throw ConfigError("eval.episodes", "must be >= 1");
  if (c.workload_source != "synthetic" && c.workload_source.empty())
    throw ConfigError("workload.source", "must be 'synthetic' or an SWF path");
  if (c.workload_source == "synthetic" && c.synthetic.cores > c.cluster_cores)
    throw ConfigError("workload.synthetic.cores", "exceeds cluster.cores");
}

std::string canonical_config(const RunConfig& c) {
  std::string s;
  for (const auto& [k, v] : config_to_map(c)) {
    s += k;
    s += '=';
    s += v;
    s += '\n';
  }
  return s;
}

std::uint64_t config_hash(const RunConfig& c) { return fnv1a64(canonical_config(c)); }

Trace load_workload(const RunConfig& c) {
  if (c.workload_source == "synthetic")
    return generate_synthetic(c.synthetic, c.synthetic_count);
  return parse_swf_file(c.workload_source);
}

}  // namespace dbf
