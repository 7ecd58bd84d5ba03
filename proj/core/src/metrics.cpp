#include "dbf/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dbf/errors.hpp"

namespace dbf {

namespace {
// Slowdowns of very short jobs are dominated by noise, so runtimes below
// this floor are treated as if they were this long.
constexpr double kSlowdownRuntimeFloor = 10.0;
}  // namespace

JobTypeKey job_type_of(int cores, double runtime) {
  int bucket = 1;
  while (bucket < cores) bucket *= 2;
  int rb = static_cast<int>(std::ceil(2.0 * std::log10(std::max(runtime, 1.0))));
  return JobTypeKey{bucket, rb};
}

std::pair<double, double> runtime_bucket_range(int bucket) {
  return {std::pow(10.0, (bucket - 1) / 2.0), std::pow(10.0, bucket / 2.0)};
}

MetricsAccumulator::MetricsAccumulator(int total_cores) : total_cores_(total_cores) {}

void MetricsAccumulator::record_interval(double from, double to, int cores_in_use,
                                         std::size_t queue_length) {
  if (to < from) throw TimeRegressionError("metrics interval runs backwards");
  double dt = to - from;
  elapsed_ += dt;
  busy_core_seconds_ += dt * static_cast<double>(cores_in_use);
  queue_length_seconds_ += dt * static_cast<double>(queue_length);
}

void MetricsAccumulator::record_arrival(const Job& job) {
  arrived_unplaced_.push_back(job);
}

void MetricsAccumulator::record_placement(const Job& job, double wait) {
  auto it = std::find_if(arrived_unplaced_.begin(), arrived_unplaced_.end(),
                         [&](const Job& j) { return j.id == job.id; });
  if (it != arrived_unplaced_.end()) arrived_unplaced_.erase(it);

  placed_ids_.push_back(job.id);
  placed_wait_sum_ += wait;
  weighted_load_sum_ += wait * static_cast<double>(job.cores) * job.runtime;
  plain_load_sum_ += static_cast<double>(job.cores) * job.runtime;
  bounded_slowdown_sum_ +=
      std::max(1.0, (wait + job.runtime) / std::max(job.runtime, kSlowdownRuntimeFloor));

  auto& stats = job_types_[job_type_of(job.cores, job.runtime)];
  ++stats.count;
  stats.wait_sum += wait;
}

void MetricsAccumulator::record_window_sample(std::size_t queue_length,
                                              std::size_t window_size) {
  ++window_samples_;
  if (queue_length > window_size) {
    invisible_sum_ += queue_length - window_size;
    ++partial_samples_;
  }
}

void MetricsAccumulator::record_action(bool placed, bool forwarded, bool invalid) {
  (void)placed;
  ++actions_;
  if (forwarded) ++forwards_;
  if (invalid) ++invalids_;
}

void MetricsAccumulator::merge(const MetricsAccumulator& other) {
  elapsed_ += other.elapsed_;
  busy_core_seconds_ += other.busy_core_seconds_;
  queue_length_seconds_ += other.queue_length_seconds_;
  arrived_unplaced_.insert(arrived_unplaced_.end(), other.arrived_unplaced_.begin(),
                           other.arrived_unplaced_.end());
  placed_ids_.insert(placed_ids_.end(), other.placed_ids_.begin(), other.placed_ids_.end());
  placed_wait_sum_ += other.placed_wait_sum_;
  weighted_load_sum_ += other.weighted_load_sum_;
  plain_load_sum_ += other.plain_load_sum_;
  bounded_slowdown_sum_ += other.bounded_slowdown_sum_;
  window_samples_ += other.window_samples_;
  invisible_sum_ += other.invisible_sum_;
  partial_samples_ += other.partial_samples_;
  actions_ += other.actions_;
  forwards_ += other.forwards_;
  invalids_ += other.invalids_;
  for (const auto& [key, stats] : other.job_types_) {
    auto& mine = job_types_[key];
    mine.count += stats.count;
    mine.wait_sum += stats.wait_sum;
  }
}

MetricsReport MetricsAccumulator::finalize(double now) const {
  if (elapsed_ <= 0.0) throw SimulationError("metrics over an empty time span");
  std::size_t arrived = placed_ids_.size() + arrived_unplaced_.size();
  if (arrived == 0) throw SimulationError("metrics with no jobs seen");

  MetricsReport r;
  r.elapsed = elapsed_;
  r.mean_utilization = busy_core_seconds_ / (elapsed_ * static_cast<double>(total_cores_));
  r.mean_queue_length = queue_length_seconds_ / elapsed_;

  double wait_sum = placed_wait_sum_;
  for (const Job& j : arrived_unplaced_) wait_sum += j.wait_at(now);
  r.mean_wait = wait_sum / static_cast<double>(arrived);

  r.weighted_load = weighted_load_sum_ / elapsed_;
  r.plain_load = plain_load_sum_ / elapsed_;
  r.mean_bounded_slowdown =
      placed_ids_.empty() ? 0.0
                          : bounded_slowdown_sum_ / static_cast<double>(placed_ids_.size());
  r.mean_invisible = window_samples_
                         ? static_cast<double>(invisible_sum_) /
                               static_cast<double>(window_samples_)
                         : 0.0;
  r.partial_observation_ratio =
      window_samples_ ? static_cast<double>(partial_samples_) /
                            static_cast<double>(window_samples_)
                      : 0.0;
  r.invalid_rate =
      actions_ ? static_cast<double>(invalids_) / static_cast<double>(actions_) : 0.0;
  r.fwd_rate =
      actions_ ? static_cast<double>(forwards_) / static_cast<double>(actions_) : 0.0;
  r.arrivals = arrived;
  r.placements = placed_ids_.size();
  r.actions = actions_;
  return r;
}

}  // namespace dbf
