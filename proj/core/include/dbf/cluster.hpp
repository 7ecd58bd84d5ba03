#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dbf/job.hpp"

namespace dbf {

/* Homogeneous cluster of N identical cores plus the running allocations.
   Time only moves through advance(); completions are deterministic because
   runtimes are exact. */
class ClusterState {
 public:
  struct Allocation {
    Job job;                     // start_time set at allocation
    double finish_time;
    std::vector<int> core_ids;   // which cores this job occupies
  };

  explicit ClusterState(int total_cores);

  int total_cores() const noexcept { return total_cores_; }
  double now() const noexcept { return now_; }
  int cores_in_use() const noexcept { return in_use_; }
  int available_cores() const noexcept { return total_cores_ - in_use_; }
  double utilization() const noexcept {
    return static_cast<double>(in_use_) / static_cast<double>(total_cores_);
  }
  std::size_t running_count() const noexcept { return allocations_.size(); }
  const std::vector<Allocation>& allocations() const noexcept { return allocations_; }

  // Seconds until core i frees up; 0 for an idle core.
  double core_remaining(int core) const;

  /* Starts a job immediately on the lowest-numbered idle cores. Throws
     InsufficientCoresError when it does not fit (callers are expected to
     check first; an over-commit here is an integrity bug) and
     SimulationError if the job id is already running. Returns the started
     copy with start_time = now. */
  Job allocate(const Job& job);

  /* Moves time forward to to_time and removes every allocation finishing at
     or before it. Completions are returned ordered by finish time, ties by
     ascending job id. Throws TimeRegressionError when to_time < now. */
  std::vector<Job> advance(double to_time);

  // Earliest finish among running allocations; empty when nothing runs.
  std::optional<double> next_completion_time() const;

 private:
  int total_cores_;
  int in_use_ = 0;
  double now_ = 0.0;
  std::vector<Allocation> allocations_;
  std::vector<std::optional<double>> core_finish_;  // empty slot = idle core
};

}  // namespace dbf
