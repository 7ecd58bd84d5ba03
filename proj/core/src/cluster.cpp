#include "dbf/cluster.hpp"

#include <algorithm>
#include <string>

#include "dbf/errors.hpp"

namespace dbf {

ClusterState::ClusterState(int total_cores) : total_cores_(total_cores) {
  if (total_cores < 1) throw SimulationError("cluster needs at least one core");
  core_finish_.resize(static_cast<std::size_t>(total_cores));
}

double ClusterState::core_remaining(int core) const {
  const auto& finish = core_finish_.at(static_cast<std::size_t>(core));
  return finish ? *finish - now_ : 0.0;
}

Job ClusterState::allocate(const Job& job) {
  if (job.cores < 1 || job.cores > total_cores_)
    throw SimulationError("job core count outside [1, N]");
  if (job.cores > available_cores())
    throw InsufficientCoresError("allocation of " + std::to_string(job.cores) +
                                 " cores with only " + std::to_string(available_cores()) +
                                 " available");
  for (const Allocation& a : allocations_)
    if (a.job.id == job.id) throw SimulationError("job already running");

  Allocation alloc;
  alloc.job = job;
  alloc.job.start_time = now_;
  alloc.finish_time = now_ + job.runtime;
  alloc.core_ids.reserve(static_cast<std::size_t>(job.cores));
  for (std::size_t i = 0; i < core_finish_.size() &&
       alloc.core_ids.size() < static_cast<std::size_t>(job.cores); ++i) {
    if (!core_finish_[i]) {
      core_finish_[i] = alloc.finish_time;
      alloc.core_ids.push_back(static_cast<int>(i));
    }
  }
  in_use_ += job.cores;
  allocations_.push_back(alloc);
  return allocations_.back().job;
}

std::vector<Job> ClusterState::advance(double to_time) {
  if (to_time < now_)
    throw TimeRegressionError("advance to " + std::to_string(to_time) +
                              " before current time " + std::to_string(now_));

  std::vector<Allocation> done;
  auto split = std::stable_partition(allocations_.begin(), allocations_.end(),
                                     [&](const Allocation& a) { return a.finish_time > to_time; });
  done.assign(split, allocations_.end());
  allocations_.erase(split, allocations_.end());

  std::sort(done.begin(), done.end(), [](const Allocation& a, const Allocation& b) {
    if (a.finish_time != b.finish_time) return a.finish_time < b.finish_time;
    return a.job.id < b.job.id;
  });

  std::vector<Job> completed;
  completed.reserve(done.size());
  for (const Allocation& a : done) {
    for (int core : a.core_ids) core_finish_[static_cast<std::size_t>(core)].reset();
    in_use_ -= a.job.cores;
    completed.push_back(a.job);
  }
  now_ = to_time;
  return completed;
}

std::optional<double> ClusterState::next_completion_time() const {
  std::optional<double> earliest;
  for (const Allocation& a : allocations_)
    if (!earliest || a.finish_time < *earliest) earliest = a.finish_time;
  return earliest;
}

}  // namespace dbf
