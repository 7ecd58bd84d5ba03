#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "dbf/job.hpp"

namespace dbf {

/* Time-averaged and per-job schedule quality measures for one episode (or a
   merge of episodes). Time-weighted quantities integrate step functions
   between events; job-weighted quantities average over arrivals or
   placements. */
struct MetricsReport {
  double elapsed = 0.0;
  double mean_utilization = 0.0;   // core-seconds used / (N * elapsed)
  double mean_queue_length = 0.0;  // time-weighted
  double mean_wait = 0.0;          // over arrived jobs; queued jobs count their wait so far
  double weighted_load = 0.0;      // sum of wait * cores * runtime over placed jobs, / elapsed
  double plain_load = 0.0;         // sum of cores * runtime over placed jobs, / elapsed
  double mean_bounded_slowdown = 0.0;  // over placed jobs
  double mean_invisible = 0.0;     // mean over samples of max(0, L - M)
  double partial_observation_ratio = 0.0;  // fraction of samples with L > M
  double invalid_rate = 0.0;       // invalid actions / actions
  double fwd_rate = 0.0;           // explicit forwards / actions
  std::size_t arrivals = 0;
  std::size_t placements = 0;
  std::size_t actions = 0;
};

// Jobs bucketed by core count (rounded up to a power of two) and by runtime
// (half-decade log10 buckets); used for the per-type wait breakdown.
struct JobTypeKey {
  int core_bucket;      // 1, 2, 4, ...
  int runtime_bucket;   // k such that runtime is in (10^((k-1)/2), 10^(k/2)]
  auto operator<=>(const JobTypeKey&) const = default;
};

struct JobTypeStats {
  std::size_t count = 0;
  double wait_sum = 0.0;
  double mean_wait() const { return count ? wait_sum / static_cast<double>(count) : 0.0; }
};

JobTypeKey job_type_of(int cores, double runtime);
// Bucket boundaries for presentation: (lower, upper] in seconds.
std::pair<double, double> runtime_bucket_range(int bucket);

class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(int total_cores);

  // One constant-state stretch between events.
  void record_interval(double from, double to, int cores_in_use, std::size_t queue_length);
  void record_arrival(const Job& job);
  void record_placement(const Job& job, double wait);
  // Queue length vs window capacity at one observation.
  void record_window_sample(std::size_t queue_length, std::size_t window_size);
  void record_action(bool placed, bool forwarded, bool invalid);

  /* Folds another accumulator into this one. Concatenating the metrics of
     two adjacent stretches this way matches accumulating the whole stretch
     directly. */
  void merge(const MetricsAccumulator& other);

  /* Snapshot of all measures at time `now`. Queued-but-unplaced jobs
     contribute their wait so far. Throws SimulationError when no time has
     elapsed or no job has arrived. */
  MetricsReport finalize(double now) const;

  const std::map<JobTypeKey, JobTypeStats>& job_types() const noexcept { return job_types_; }
  std::size_t placements() const noexcept { return placed_ids_.size(); }

 private:
  int total_cores_;
  double elapsed_ = 0.0;
  double busy_core_seconds_ = 0.0;
  double queue_length_seconds_ = 0.0;

  std::vector<Job> arrived_unplaced_;
  std::vector<std::uint64_t> placed_ids_;
  double placed_wait_sum_ = 0.0;
  double weighted_load_sum_ = 0.0;  // wait * cores * runtime
  double plain_load_sum_ = 0.0;     // cores * runtime
  double bounded_slowdown_sum_ = 0.0;

  std::size_t window_samples_ = 0;
  std::size_t invisible_sum_ = 0;
  std::size_t partial_samples_ = 0;

  std::size_t actions_ = 0;
  std::size_t forwards_ = 0;
  std::size_t invalids_ = 0;

  std::map<JobTypeKey, JobTypeStats> job_types_;
};

}  // namespace dbf
