#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dbf/job.hpp"

namespace dbf {

/* Unbounded wait queue in arrival order. Jobs may leave from any index
   (the scheduler is not forced to honor FIFO), the remainder keeps its
   relative order. */
class JobQueue {
 public:
  void push_back(Job job) { jobs_.push_back(std::move(job)); }

  Job remove_at(std::size_t index) {
    if (index >= jobs_.size()) throw std::out_of_range("queue index out of range");
    Job job = jobs_[index];
    jobs_.erase(jobs_.begin() + static_cast<std::ptrdiff_t>(index));
    return job;
  }

  const Job& at(std::size_t index) const { return jobs_.at(index); }
  std::size_t size() const noexcept { return jobs_.size(); }
  bool empty() const noexcept { return jobs_.empty(); }

  // Total accumulated waiting time of everything still queued.
  double total_waiting(double now) const {
    double sum = 0.0;
    for (const Job& j : jobs_) sum += j.wait_at(now);
    return sum;
  }

  auto begin() const noexcept { return jobs_.begin(); }
  auto end() const noexcept { return jobs_.end(); }

 private:
  std::vector<Job> jobs_;
};

}  // namespace dbf
