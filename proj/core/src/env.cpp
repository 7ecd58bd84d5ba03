#include "dbf/env.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dbf/errors.hpp"

namespace dbf {

double reward(const ClusterState& cluster, const JobQueue& queue,
              const EpisodeMaxima& maxima, const RewardWeights& weights) {
  double idle = 1.0 - cluster.utilization();
  double queue_term = maxima.max_queue_length > 0.0
                          ? static_cast<double>(queue.size()) / maxima.max_queue_length
                          : 0.0;
  double wait_term = maxima.max_total_waiting > 0.0
                         ? queue.total_waiting(cluster.now()) / maxima.max_total_waiting
                         : 0.0;
  return -weights.w1 * idle - weights.w2 * queue_term - weights.w3 * wait_term;
}

Observation build_observation(const ClusterState& cluster, const WindowView& window,
                              double runtime_cap, double max_wait_seen) {
  if (runtime_cap <= 0.0) throw SimulationError("runtime cap must be positive");

  Observation obs;
  obs.reserve(static_cast<std::size_t>(cluster.total_cores()) + 3 * window.size());
  for (int core = 0; core < cluster.total_cores(); ++core)
    obs.push_back(cluster.core_remaining(core) / runtime_cap);

  double wait_scale = std::max(max_wait_seen, 1.0);
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (!window.occupied(i)) {
      obs.insert(obs.end(), {0.0, 0.0, 0.0});
      continue;
    }
    const WindowSlot& s = window.slot(i);
    obs.push_back(static_cast<double>(s.cores) / static_cast<double>(cluster.total_cores()));
    obs.push_back(s.runtime / runtime_cap);
    obs.push_back(s.wait / wait_scale);
  }
  return obs;
}

EpisodeSim::EpisodeSim(int total_cores, std::vector<Job> arrivals,
                       std::size_t placement_target)
    : cluster_(total_cores),
      clock_(std::move(arrivals)),
      metrics_(total_cores),
      placement_target_(placement_target) {
  if (clock_.exhausted()) throw WorkloadError("episode without any arrivals");
  // Time starts at the first arrival; it enters the queue right away.
  double first = *clock_.next_arrival_time();
  cluster_.advance(first);
  Job job = clock_.pop_arrival();
  if (job.cores > total_cores) throw WorkloadError("job wider than the cluster");
  queue_.push_back(job);
  metrics_.record_arrival(job);
  observe_maxima();
}

Job EpisodeSim::place(std::size_t queue_index) {
  Job job = queue_.remove_at(queue_index);
  Job started = cluster_.allocate(job);
  double wait = started.wait_at(now());
  max_wait_seen_ = std::max(max_wait_seen_, wait);
  metrics_.record_placement(started, wait);
  ++placements_;
  observe_maxima();
  return started;
}

std::optional<std::uint64_t> EpisodeSim::advance_next_event() {
  std::optional<double> when = next_event_time(clock_, cluster_);
  if (!when) throw SimulationError("advance with no pending event");

  metrics_.record_interval(now(), *when, cluster_.cores_in_use(), queue_.size());
  cluster_.advance(*when);

  std::optional<std::uint64_t> admitted;
  if (clock_.next_arrival_time() && *clock_.next_arrival_time() == *when) {
    Job job = clock_.pop_arrival();
    if (job.cores > cluster_.total_cores())
      throw WorkloadError("job wider than the cluster");
    admitted = job.id;
    queue_.push_back(job);
    metrics_.record_arrival(job);
  }
  observe_maxima();
  return admitted;
}

SchedulingEnv::SchedulingEnv(EnvConfig config, std::shared_ptr<const Trace> trace)
    : config_(config), trace_(std::move(trace)), window_(1) {
  if (!trace_) throw WorkloadError("environment needs a trace");
  if (config_.window.head < 0 || config_.window.tail < 0 || config_.window.size() < 1)
    throw ConfigError("window", "head and tail must be >= 0 and sum to >= 1");
  if (config_.cluster_cores < 1) throw ConfigError("cluster.cores", "must be >= 1");
  runtime_cap_ = config_.runtime_cap > 0.0 ? config_.runtime_cap
                                           : std::max(trace_->meta.max_runtime, 1.0);
}

EpisodeSim& SchedulingEnv::sim() {
  if (!sim_) throw SimulationError("environment not reset");
  return *sim_;
}

const EpisodeSim& SchedulingEnv::sim() const {
  if (!sim_) throw SimulationError("environment not reset");
  return *sim_;
}

Observation SchedulingEnv::observe() {
  const EpisodeSim& s = sim();
  max_wait_seen_ = std::max(max_wait_seen_, s.max_wait_seen());
  for (const Job& j : s.queue())
    max_wait_seen_ = std::max(max_wait_seen_, j.wait_at(s.now()));

  window_ = build_window(s.queue(), config_.window, s.now());
  sim_->metrics().record_window_sample(s.queue().size(),
                                       static_cast<std::size_t>(config_.window.size()));
  return build_observation(s.cluster(), window_, runtime_cap_, max_wait_seen_);
}

Observation SchedulingEnv::reset(std::uint64_t seed) {
  std::vector<Job> arrivals = sample_episode(*trace_, seed, config_.jobs_per_episode());
  sim_.emplace(config_.cluster_cores, std::move(arrivals), config_.episode_placements);
  max_wait_seen_ = 0.0;
  total_reward_ = 0.0;
  done_ = false;
  return observe();
}

StepResult SchedulingEnv::step(int action) {
  if (done_) throw SimulationError("step on a finished episode");
  if (action < 0 || action >= action_count())
    throw SimulationError("action outside [0, M]");

  EpisodeSim& s = sim();
  StepResult result;

  bool placed = false;
  if (action < forward_action() && window_.occupied(static_cast<std::size_t>(action))) {
    std::size_t qi = window_.slot(static_cast<std::size_t>(action)).queue_index;
    if (s.fits(qi)) {
      Job job = s.place(qi);
      result.info.placed_job_id = job.id;
      placed = true;
    }
  }

  if (placed) {
    // Zero reward and frozen time: the agent keeps scheduling this cycle.
    result.reward = 0.0;
    s.metrics().record_action(true, false, false);
    done_ = s.finished();
  } else {
    result.info.forwarded = action == forward_action();
    result.info.invalid = !result.info.forwarded;
    s.metrics().record_action(false, result.info.forwarded, result.info.invalid);
    // Score the state as it stands, then let time move.
    result.reward = reward(s.cluster(), s.queue(), s.maxima(), config_.weights);
    if (s.has_pending_event()) {
      double before = s.now();
      result.info.arrived_job_id = s.advance_next_event();
      result.info.time_advanced = s.now() - before;
      done_ = s.finished();
    } else {
      // Nothing can ever happen again without a placement; give up.
      done_ = true;
    }
  }

  total_reward_ += result.reward;
  result.observation = observe();
  result.done = done_;
  return result;
}

}  // namespace dbf
