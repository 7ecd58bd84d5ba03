#include "dbf/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "dbf/csv.hpp"
#include "dbf/errors.hpp"
#include "dbf/heuristics.hpp"
#include "dbf/rng.hpp"

namespace dbf {

namespace {

// Sub-stream labels hung off the master seed.
enum SeedStream : std::uint64_t {
  kTrainEpisode = 0x10000,
  kEvalEpisode = 0x20000,
  kTrainActions = 1,
  kShuffle = 2,
  kPolicyInit = 3,
  kEvalActions = 4,
};

std::uint64_t episode_seed(std::uint64_t master, SeedStream stream, std::size_t episode) {
  return derive_seed(master, static_cast<std::uint64_t>(stream) + episode);
}

const std::vector<std::string> kMetricColumns = {
    "reward",        "utilization",  "queue_length",  "wait",
    "weighted_load", "plain_load",   "bounded_slowdown", "invisible",
    "partial_ratio", "invalid_rate", "fwd_rate",      "steps",
    "placements",    "arrivals",     "elapsed"};

std::vector<std::string> metric_cells(double total_reward, const MetricsReport& m) {
  return {csv_number(total_reward),
          csv_number(m.mean_utilization),
          csv_number(m.mean_queue_length),
          csv_number(m.mean_wait),
          csv_number(m.weighted_load),
          csv_number(m.plain_load),
          csv_number(m.mean_bounded_slowdown),
          csv_number(m.mean_invisible),
          csv_number(m.partial_observation_ratio),
          csv_number(m.invalid_rate),
          csv_number(m.fwd_rate),
          std::to_string(m.actions),
          std::to_string(m.placements),
          std::to_string(m.arrivals),
          csv_number(m.elapsed)};
}

std::shared_ptr<const Trace> shared(const Trace& trace) {
  // Callers keep the trace alive for the duration of the run.
  return {&trace, [](const Trace*) {}};
}

struct EpisodeRollout {
  RolloutBuffer buffer;
  double total_reward = 0.0;
};

EpisodeRollout run_episode(SchedulingEnv& env, const PolicyParams& params,
                           std::uint64_t workload_seed, std::mt19937_64& action_rng,
                           bool greedy, RolloutBuffer* buffer) {
  EpisodeRollout out;
  Observation obs = env.reset(workload_seed);
  while (!env.done()) {
    std::vector<double> probs = policy_forward(params, obs);
    int action = greedy ? greedy_action(probs)
                        : sample_categorical(action_rng, probs);
    double value = buffer ? value_forward(params, obs) : 0.0;
    StepResult res = env.step(action);
    if (buffer)
      buffer->push(std::move(obs), action, std::log(std::max(probs[static_cast<std::size_t>(action)], 1e-300)),
                   res.reward, value, res.done);
    obs = std::move(res.observation);
    out.total_reward += res.reward;
  }
  return out;
}

double run_random_episode(SchedulingEnv& env, std::uint64_t workload_seed,
                          std::mt19937_64& action_rng) {
  env.reset(workload_seed);
  double total = 0.0;
  while (!env.done()) {
    int action = static_cast<int>(uniform_below(action_rng,
                                  static_cast<std::uint64_t>(env.action_count())));
    total += env.step(action).reward;
  }
  return total;
}

void ensure_out_dir(const RunConfig& config) {
  std::filesystem::create_directories(config.out_dir);
}

std::string out_path(const RunConfig& config, const std::string& name) {
  return (std::filesystem::path(config.out_dir) / name).string();
}

struct Welford {
  std::size_t n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double stddev() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
};

}  // namespace

TrainResult train_policy(const RunConfig& config, const Trace& trace) {
  validate_config(config);

  SchedulingEnv env(config.env_config(), shared(trace));
  TrainResult result;
  result.params = make_policy(env.observation_size(), env.action_count(), config.hidden,
                              derive_seed(config.seed, kPolicyInit));

  AdamOptimizer::Config adam{.learning_rate = config.ppo.learning_rate};
  AdamOptimizer actor_opt(adam), critic_opt(adam);
  std::mt19937_64 action_rng(derive_seed(config.seed, kTrainActions));
  std::mt19937_64 shuffle_rng(derive_seed(config.seed, kShuffle));

  for (std::size_t e = 1; e <= config.train_episodes; ++e) {
    RolloutBuffer buffer;
    EpisodeRollout rollout = run_episode(
        env, result.params, episode_seed(config.seed, kTrainEpisode, e), action_rng,
        /*greedy=*/false, &buffer);
    ppo_update(result.params, actor_opt, critic_opt, buffer, config.ppo, shuffle_rng);

    TrainEpisodeRow row;
    row.episode = e;
    row.total_reward = rollout.total_reward;
    row.metrics = env.metrics().finalize(env.now());
    result.log.push_back(row);
  }
  return result;
}

EvalResult evaluate_policy(const PolicyParams& params, const RunConfig& config,
                           const Trace& trace, EvalPolicy policy) {
  validate_config(config);
  SchedulingEnv env(config.env_config(), shared(trace));
  if (policy == EvalPolicy::model)
    check_policy_shape(params, env.observation_size(), env.action_count());

  EvalResult result{.rows = {}, .merged = MetricsAccumulator(config.cluster_cores)};
  std::mt19937_64 action_rng(derive_seed(config.seed, kEvalActions));

  for (std::size_t e = 1; e <= config.eval_episodes; ++e) {
    std::uint64_t wseed = episode_seed(config.seed, kEvalEpisode, e);
    double total = policy == EvalPolicy::model
                       ? run_episode(env, params, wseed, action_rng, config.eval_greedy,
                                     nullptr)
                             .total_reward
                       : run_random_episode(env, wseed, action_rng);
    EvalEpisodeRow row;
    row.episode = e;
    row.total_reward = total;
    row.metrics = env.metrics().finalize(env.now());
    result.rows.push_back(row);
    result.merged.merge(env.metrics());
    result.merged_end_time += env.now();
  }
  return result;
}

EvalResult evaluate_heuristic(HeuristicKind kind, const RunConfig& config,
                              const Trace& trace) {
  validate_config(config);
  EnvConfig ec = config.env_config();
  EvalResult result{.rows = {}, .merged = MetricsAccumulator(config.cluster_cores)};

  for (std::size_t e = 1; e <= config.eval_episodes; ++e) {
    std::uint64_t wseed = episode_seed(config.seed, kEvalEpisode, e);
    std::vector<Job> arrivals = sample_episode(trace, wseed, ec.jobs_per_episode());
    HeuristicEpisodeResult ep = run_heuristic_episode(
        kind, config.cluster_cores, std::move(arrivals), ec.episode_placements,
        static_cast<std::size_t>(ec.window.size()));
    EvalEpisodeRow row;
    row.episode = e;
    row.total_reward = 0.0;  // heuristics take no reward signal
    row.metrics = ep.report;
    result.rows.push_back(row);
    result.merged.merge(ep.metrics);
    result.merged_end_time += ep.end_time;
  }
  return result;
}

MetricsReport mean_report(const std::vector<EvalEpisodeRow>& rows, double* mean_reward) {
  MetricsReport m;
  double reward = 0.0;
  for (const EvalEpisodeRow& row : rows) {
    reward += row.total_reward;
    m.elapsed += row.metrics.elapsed;
    m.mean_utilization += row.metrics.mean_utilization;
    m.mean_queue_length += row.metrics.mean_queue_length;
    m.mean_wait += row.metrics.mean_wait;
    m.weighted_load += row.metrics.weighted_load;
    m.plain_load += row.metrics.plain_load;
    m.mean_bounded_slowdown += row.metrics.mean_bounded_slowdown;
    m.mean_invisible += row.metrics.mean_invisible;
    m.partial_observation_ratio += row.metrics.partial_observation_ratio;
    m.invalid_rate += row.metrics.invalid_rate;
    m.fwd_rate += row.metrics.fwd_rate;
    m.arrivals += row.metrics.arrivals;      // counts stay totals
    m.placements += row.metrics.placements;
    m.actions += row.metrics.actions;
  }
  double n = static_cast<double>(rows.size());
  m.elapsed /= n;
  m.mean_utilization /= n;
  m.mean_queue_length /= n;
  m.mean_wait /= n;
  m.weighted_load /= n;
  m.plain_load /= n;
  m.mean_bounded_slowdown /= n;
  m.mean_invisible /= n;
  m.partial_observation_ratio /= n;
  m.invalid_rate /= n;
  m.fwd_rate /= n;
  if (mean_reward) *mean_reward = reward / n;
  return m;
}

std::uint64_t workload_hash(const RunConfig& config, const Trace& trace) {
  std::string blob;
  EnvConfig ec = config.env_config();
  for (std::size_t e = 1; e <= config.eval_episodes; ++e) {
    std::vector<Job> jobs = sample_episode(
        trace, episode_seed(config.seed, kEvalEpisode, e), ec.jobs_per_episode());
    for (const Job& j : jobs) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%llu|%.17g|%d|%.17g;",
                    static_cast<unsigned long long>(j.id), j.submit_time, j.cores,
                    j.runtime);
      blob += buf;
    }
  }
  return fnv1a64(blob);
}

int cmd_train(const RunConfig& config) {
  validate_config(config);
  ensure_out_dir(config);
  Trace trace = load_workload(config);

  auto t0 = std::chrono::steady_clock::now();

  SchedulingEnv env(config.env_config(), shared(trace));
  PolicyParams params = make_policy(env.observation_size(), env.action_count(),
                                    config.hidden, derive_seed(config.seed, kPolicyInit));
  AdamOptimizer::Config adam{.learning_rate = config.ppo.learning_rate};
  AdamOptimizer actor_opt(adam), critic_opt(adam);
  std::mt19937_64 action_rng(derive_seed(config.seed, kTrainActions));
  std::mt19937_64 shuffle_rng(derive_seed(config.seed, kShuffle));

  CsvWriter csv(out_path(config, "train_log.csv"), config_hash(config), trace.meta.source);
  std::vector<std::string> cols = {"episode"};
  cols.insert(cols.end(), kMetricColumns.begin(), kMetricColumns.end());
  csv.header(cols);

  std::size_t checkpoints = 0;
  for (std::size_t e = 1; e <= config.train_episodes; ++e) {
    RolloutBuffer buffer;
    EpisodeRollout rollout =
        run_episode(env, params, episode_seed(config.seed, kTrainEpisode, e), action_rng,
                    false, &buffer);
    ppo_update(params, actor_opt, critic_opt, buffer, config.ppo, shuffle_rng);

    std::vector<std::string> cells = {std::to_string(e)};
    auto metric = metric_cells(rollout.total_reward, env.metrics().finalize(env.now()));
    cells.insert(cells.end(), metric.begin(), metric.end());
    csv.row(cells);

    if (e % config.checkpoint_every == 0 || e == config.train_episodes) {
      save_checkpoint(out_path(config, "checkpoint_ep" + std::to_string(e) + ".ckpt"),
                      params);
      ++checkpoints;
    }
  }

  // Wall time lives in a trailing comment: data rows must be reproducible.
  auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  csv.comment("wall_time_s: " + csv_number(dt));
  csv.comment("checkpoints: " + std::to_string(checkpoints));
  csv.close();
  return 0;
}

namespace {

void write_eval_csv(const RunConfig& config, const std::string& file,
                    const EvalResult& result, const std::string& workload_source) {
  CsvWriter csv(out_path(config, file), config_hash(config), workload_source);
  std::vector<std::string> cols = {"episode"};
  cols.insert(cols.end(), kMetricColumns.begin(), kMetricColumns.end());
  csv.header(cols);

  std::vector<Welford> stats(kMetricColumns.size());
  for (const EvalEpisodeRow& row : result.rows) {
    std::vector<std::string> cells = {std::to_string(row.episode)};
    auto metric = metric_cells(row.total_reward, row.metrics);
    cells.insert(cells.end(), metric.begin(), metric.end());
    for (std::size_t i = 0; i < metric.size(); ++i) stats[i].add(std::stod(metric[i]));
    csv.row(cells);
  }

  std::vector<std::string> mean_cells = {"mean"};
  std::vector<std::string> std_cells = {"# stddev"};
  for (const Welford& w : stats) {
    mean_cells.push_back(csv_number(w.mean));
    std_cells.push_back(csv_number(w.stddev()));
  }
  csv.row(mean_cells);
  // Standard deviations ride along as a comment so the body keeps exactly
  // one summary row.
  csv.row(std_cells);
  csv.close();
}

void write_type_table(const RunConfig& config, const std::string& file,
                      const MetricsAccumulator& merged, const std::string& workload_source) {
  CsvWriter csv(out_path(config, file), config_hash(config), workload_source);
  csv.header({"core_bucket", "runtime_bucket", "runtime_over", "runtime_upto", "count",
              "mean_wait"});
  for (const auto& [key, stats] : merged.job_types()) {
    auto [lo, hi] = runtime_bucket_range(key.runtime_bucket);
    csv.row({std::to_string(key.core_bucket), std::to_string(key.runtime_bucket),
             csv_number(lo), csv_number(hi), std::to_string(stats.count),
             csv_number(stats.mean_wait())});
  }
  csv.close();
}

}  // namespace

int cmd_evaluate(const RunConfig& config, const std::string& checkpoint_path) {
  validate_config(config);
  ensure_out_dir(config);
  Trace trace = load_workload(config);

  EvalResult result{.rows = {}, .merged = MetricsAccumulator(config.cluster_cores)};
  if (config.scheduler == "agent") {
    PolicyParams params = load_checkpoint(checkpoint_path);
    result = evaluate_policy(params, config, trace);
  } else {
    result = evaluate_heuristic(*heuristic_from_name(config.scheduler), config, trace);
  }
  write_eval_csv(config, "eval.csv", result, trace.meta.source);
  write_type_table(config, "eval_types.csv", result.merged, trace.meta.source);
  return 0;
}

int cmd_compare(const RunConfig& config, const std::vector<std::string>& schedulers) {
  validate_config(config);
  if (schedulers.empty()) throw ConfigError("schedulers", "nothing to compare");
  ensure_out_dir(config);
  Trace trace = load_workload(config);
  std::uint64_t whash = workload_hash(config, trace);

  struct Entry {
    std::string name;
    double reward;
    MetricsReport mean;
  };
  std::vector<Entry> entries;

  for (const std::string& name : schedulers) {
    EvalResult result{.rows = {}, .merged = MetricsAccumulator(config.cluster_cores)};
    if (name == "agent") {
      if (config.eval_checkpoint.empty())
        throw ConfigError("eval.checkpoint", "comparing 'agent' needs a checkpoint");
      PolicyParams params = load_checkpoint(config.eval_checkpoint);
      result = evaluate_policy(params, config, trace);
    } else if (auto kind = heuristic_from_name(name)) {
      result = evaluate_heuristic(*kind, config, trace);
    } else {
      throw ConfigError("scheduler", "unknown scheduler '" + name + "'");
    }

    Entry entry{.name = name, .reward = 0.0, .mean = {}};
    entry.mean = mean_report(result.rows, &entry.reward);
    entries.push_back(std::move(entry));
  }

  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.mean.mean_wait < b.mean.mean_wait; });

  CsvWriter csv(out_path(config, "compare.csv"), config_hash(config), trace.meta.source);
  std::vector<std::string> cols = {"scheduler", "workload_hash"};
  cols.insert(cols.end(), kMetricColumns.begin(), kMetricColumns.end());
  csv.header(cols);
  for (const Entry& e : entries) {
    std::vector<std::string> cells = {e.name, hex64(whash)};
    auto metric = metric_cells(e.reward, e.mean);
    cells.insert(cells.end(), metric.begin(), metric.end());
    csv.row(cells);
  }
  csv.close();
  return 0;
}

int cmd_sweep_split(const RunConfig& config, int window_total,
                    const std::vector<std::pair<int, int>>& splits) {
  validate_config(config);
  if (window_total < 1) throw ConfigError("window", "total window must be >= 1");
  if (splits.empty()) throw ConfigError("splits", "nothing to sweep");
  for (const auto& [head, tail] : splits)
    if (head < 0 || tail < 0 || head + tail != window_total)
      throw ConfigError("splits", "each split must be nonnegative and sum to " +
                                      std::to_string(window_total));
  ensure_out_dir(config);
  Trace trace = load_workload(config);

  CsvWriter csv(out_path(config, "sweep.csv"), config_hash(config), trace.meta.source);
  std::vector<std::string> cols = {"head", "tail", "starvation_risk"};
  cols.insert(cols.end(), kMetricColumns.begin(), kMetricColumns.end());
  csv.header(cols);

  for (const auto& [head, tail] : splits) {
    RunConfig run = config;
    run.window_head = head;
    run.window_tail = tail;

    TrainResult trained = train_policy(run, trace);
    EvalResult result = evaluate_policy(trained.params, run, trace);

    double reward = 0.0;
    MetricsReport mean = mean_report(result.rows, &reward);
    std::vector<std::string> cells = {std::to_string(head), std::to_string(tail),
                                      head == 0 ? "true" : "false"};
    auto metric = metric_cells(reward, mean);
    cells.insert(cells.end(), metric.begin(), metric.end());
    csv.row(cells);

    write_type_table(config,
                     "sweep_types_h" + std::to_string(head) + "_t" + std::to_string(tail) +
                         ".csv",
                     result.merged, trace.meta.source);
  }
  csv.close();
  return 0;
}

int cmd_gen_trace(const RunConfig& config, std::size_t count, const std::string& out_path_arg) {
  if (count == 0) throw ConfigError("count", "must be >= 1");
  Trace trace = generate_synthetic(config.synthetic, count);
  std::ofstream out(out_path_arg);
  if (!out) throw WorkloadError("cannot write trace: " + out_path_arg);
  write_swf(out, trace);
  if (!out) throw WorkloadError("failed writing trace: " + out_path_arg);
  return 0;
}

}  // namespace dbf
