#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dbf/agent.hpp"
#include "dbf/env.hpp"
#include "dbf/workload.hpp"

namespace dbf {

/* Everything one experiment run needs. Every field maps to a dotted
   configuration key; files use `key = value` lines and the CLI accepts the
   same keys as flags. */
struct RunConfig {
  int cluster_cores = 16;
  int window_head = 5;
  int window_tail = 1;
  double reward_w1 = 1.0 / 3.0;
  double reward_w2 = 1.0 / 3.0;
  double reward_w3 = 1.0 / 3.0;
  std::size_t episode_placements = 200;
  std::size_t episode_jobs = 0;  // 0: derived from placements

  std::string workload_source = "synthetic";  // or a .swf path
  SyntheticParams synthetic{.cores = 16,
                            .runtime_log_mean = 4.1,
                            .runtime_log_sigma = 1.0,
                            .runtime_cap = 1000.0,
                            .pow2_bias = 0.7,
                            .arrival_rate = 0.030,
                            .seed = 9001};
  std::size_t synthetic_count = 20000;

  std::string scheduler = "agent";
  std::vector<int> hidden = {64, 64};
  PpoHyperparams ppo;

  std::size_t train_episodes = 200;
  std::size_t checkpoint_every = 100;
  std::size_t eval_episodes = 20;
  bool eval_greedy = false;
  std::string eval_checkpoint;

  std::uint64_t seed = 1;
  std::string out_dir = "out";

  EnvConfig env_config() const;
};

// All recognized keys with their current values, in sorted key order.
std::map<std::string, std::string> config_to_map(const RunConfig& config);
std::vector<std::string> config_keys();

// Sets one field from its dotted key; unknown keys and unparsable values
// raise ConfigError naming the key.
void apply_config_value(RunConfig& config, const std::string& key, const std::string& value);

/* Reads `key = value` lines ('#' starts a comment, blank lines allowed).
   Later keys override earlier ones. */
RunConfig parse_config_file(const std::string& path, RunConfig base = {});

// Range and consistency checks; throws ConfigError naming the first bad field.
void validate_config(const RunConfig& config);

// Canonical `key=value` serialization of the full config, and its FNV-1a
// hash as stamped into every CSV header.
std::string canonical_config(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

// Loads the configured workload: an SWF file or the synthetic generator.
Trace load_workload(const RunConfig& config);

}  // namespace dbf
