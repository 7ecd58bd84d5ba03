#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "dbf/cluster.hpp"
#include "dbf/event_clock.hpp"
#include "dbf/job_queue.hpp"
#include "dbf/metrics.hpp"
#include "dbf/window.hpp"
#include "dbf/workload.hpp"

namespace dbf {

using Observation = std::vector<double>;

struct RewardWeights {
  double w1 = 1.0 / 3.0;  // idle-capacity penalty
  double w2 = 1.0 / 3.0;  // queue-length penalty
  double w3 = 1.0 / 3.0;  // accumulated-waiting penalty
};

/* Running maxima of queue length and total waiting since episode start,
   sampled after every state change so the penalty ratios never exceed 1. */
struct EpisodeMaxima {
  double max_queue_length = 0.0;
  double max_total_waiting = 0.0;

  void observe(double queue_length, double total_waiting) {
    if (queue_length > max_queue_length) max_queue_length = queue_length;
    if (total_waiting > max_total_waiting) max_total_waiting = total_waiting;
  }
};

/* Penalty for letting time pass:
     -w1 * (1 - used/N) - w2 * L / Lmax - w3 * W / Wmax
   where L is the queue length, W the summed waiting time of queued jobs and
   Lmax/Wmax the episode maxima so far. A ratio with a zero denominator
   contributes 0. Weights summing to at most 1 keep the value in [-1, 0]. */
double reward(const ClusterState& cluster, const JobQueue& queue,
              const EpisodeMaxima& maxima, const RewardWeights& weights);

/* Flattened agent view: N per-core remaining runtimes scaled by the runtime
   cap, then 3 numbers per window slot (cores / N, runtime / cap,
   wait / max wait seen). Empty slots are zeros. */
Observation build_observation(const ClusterState& cluster, const WindowView& window,
                              double runtime_cap, double max_wait_seen);

/* Event-driven episode engine shared by the RL environment and the
   heuristic schedulers: a cluster, a wait queue and a pending arrival
   stream, advanced event by event. An event is the next completion batch or
   the next single arrival; arrivals sharing a timestamp enter one per event
   so every job gets its own decision cycle. */
class EpisodeSim {
 public:
  /* placement_target 0 means run until everything has drained. The first
     arrival is enqueued immediately and defines the start of time. */
  EpisodeSim(int total_cores, std::vector<Job> arrivals, std::size_t placement_target);

  const ClusterState& cluster() const noexcept { return cluster_; }
  const JobQueue& queue() const noexcept { return queue_; }
  double now() const noexcept { return cluster_.now(); }
  std::size_t placements() const noexcept { return placements_; }
  double max_wait_seen() const noexcept { return max_wait_seen_; }
  const EpisodeMaxima& maxima() const noexcept { return maxima_; }
  MetricsAccumulator& metrics() noexcept { return metrics_; }
  const MetricsAccumulator& metrics() const noexcept { return metrics_; }

  bool fits(std::size_t queue_index) const {
    return queue_.at(queue_index).cores <= cluster_.available_cores();
  }

  // Allocates the queued job at queue_index; it must fit.
  Job place(std::size_t queue_index);

  bool has_pending_event() const { return next_event_time(clock_, cluster_).has_value(); }

  /* Jumps to the next event: completes every allocation due by then, then
     admits one arrival if the event is an arrival. Returns the admitted
     job's id, if any. Must not be called without a pending event. */
  std::optional<std::uint64_t> advance_next_event();

  // Placement target reached, or nothing left anywhere.
  bool finished() const {
    if (placement_target_ > 0 && placements_ >= placement_target_) return true;
    return drained();
  }
  bool drained() const {
    return clock_.exhausted() && queue_.empty() && cluster_.running_count() == 0;
  }

 private:
  void observe_maxima() {
    maxima_.observe(static_cast<double>(queue_.size()), queue_.total_waiting(now()));
  }

  ClusterState cluster_;
  JobQueue queue_;
  EventClock clock_;
  MetricsAccumulator metrics_;
  EpisodeMaxima maxima_;
  std::size_t placement_target_;
  std::size_t placements_ = 0;
  double max_wait_seen_ = 0.0;
};

struct EnvConfig {
  int cluster_cores = 16;
  WindowConfig window{5, 1};
  RewardWeights weights;
  std::size_t episode_placements = 200;
  std::size_t episode_jobs = 0;  // 0: four arrivals per requested placement
  double runtime_cap = 0.0;      // 0: taken from the trace metadata

  /* The default margin is deliberately generous. Episodes are meant to end
     at the placement target; if the arrival supply is tight, running the
     queue dry becomes cheaper than scheduling (every skipped placement
     shortens the episode) and reward-seeking policies degenerate. */
  std::size_t jobs_per_episode() const {
    return episode_jobs ? episode_jobs : episode_placements * 4;
  }
};

struct StepInfo {
  std::optional<std::uint64_t> placed_job_id;
  std::optional<std::uint64_t> arrived_job_id;  // admitted while time advanced
  double time_advanced = 0.0;
  bool forwarded = false;  // explicit pass action
  bool invalid = false;    // empty slot or job does not fit
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

/* Gym-style environment over EpisodeSim. Actions 0..M-1 pick a window slot,
   action M forwards. A valid pick allocates the job with zero reward and
   time standing still, so the agent can chain placements within one event
   cycle; forwarding or an invalid pick scores the current state and then
   advances to the next event. The episode ends at the placement target, when
   the system drains, or when a non-placement is chosen with no event left to
   advance to. */
class SchedulingEnv {
 public:
  SchedulingEnv(EnvConfig config, std::shared_ptr<const Trace> trace);

  Observation reset(std::uint64_t seed);
  StepResult step(int action);

  int observation_size() const noexcept {
    return config_.cluster_cores + 3 * config_.window.size();
  }
  int action_count() const noexcept { return config_.window.size() + 1; }
  int forward_action() const noexcept { return config_.window.size(); }

  bool done() const noexcept { return done_; }
  double now() const { return sim().now(); }
  const ClusterState& cluster() const { return sim().cluster(); }
  const JobQueue& queue() const { return sim().queue(); }
  const WindowView& window() const { return window_; }
  const MetricsAccumulator& metrics() const { return sim().metrics(); }
  double total_reward() const noexcept { return total_reward_; }
  const EnvConfig& config() const noexcept { return config_; }

 private:
  EpisodeSim& sim();
  const EpisodeSim& sim() const;
  Observation observe();

  EnvConfig config_;
  std::shared_ptr<const Trace> trace_;
  std::optional<EpisodeSim> sim_;
  WindowView window_;
  double runtime_cap_ = 1.0;
  double max_wait_seen_ = 0.0;
  double total_reward_ = 0.0;
  bool done_ = true;  // requires reset() first
};

}  // namespace dbf
