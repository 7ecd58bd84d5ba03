#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dbf/agent.hpp"
#include "dbf/config.hpp"
#include "dbf/env.hpp"
#include "dbf/heuristics.hpp"
#include "dbf/metrics.hpp"

namespace dbf {

/* The subcommands are plain library functions so tests can run experiments
   without spawning processes; the CLI binary is a thin argument parser over
   these. Each writes its CSVs under config.out_dir and returns 0. Any
   failure surfaces as an exception, which the CLI maps to a nonzero exit. */

struct TrainEpisodeRow {
  std::size_t episode = 0;
  double total_reward = 0.0;
  MetricsReport metrics;
};

struct TrainResult {
  PolicyParams params;
  std::vector<TrainEpisodeRow> log;
};

struct EvalEpisodeRow {
  std::size_t episode = 0;
  double total_reward = 0.0;
  MetricsReport metrics;
};

struct EvalResult {
  std::vector<EvalEpisodeRow> rows;
  MetricsAccumulator merged;  // for per-type tables
  double merged_end_time = 0.0;
};

// Trains a fresh policy on the configured workload, one PPO update per
// episode. Episode workloads, action sampling and shuffles all derive from
// config.seed.
TrainResult train_policy(const RunConfig& config, const Trace& trace);

enum class EvalPolicy { model, random };

/* Rolls eval_episodes episodes and reports per-episode metrics. Episode e
   draws its workload from seed stream (seed, eval, e); the same stream is
   used for every scheduler so comparisons are paired. */
EvalResult evaluate_policy(const PolicyParams& params, const RunConfig& config,
                           const Trace& trace, EvalPolicy policy = EvalPolicy::model);

EvalResult evaluate_heuristic(HeuristicKind kind, const RunConfig& config, const Trace& trace);

/* Arithmetic mean of per-episode reports; count fields (arrivals,
   placements, steps) are summed instead. */
MetricsReport mean_report(const std::vector<EvalEpisodeRow>& rows,
                          double* mean_reward = nullptr);

// Hash of the exact episode job sequences an evaluation run uses; equal
// configs and seeds give equal hashes, which compare.csv records per row.
std::uint64_t workload_hash(const RunConfig& config, const Trace& trace);

int cmd_train(const RunConfig& config);
int cmd_evaluate(const RunConfig& config, const std::string& checkpoint_path);
int cmd_compare(const RunConfig& config, const std::vector<std::string>& schedulers);
int cmd_sweep_split(const RunConfig& config, int window_total,
                    const std::vector<std::pair<int, int>>& splits);
int cmd_gen_trace(const RunConfig& config, std::size_t count, const std::string& out_path);

}  // namespace dbf
