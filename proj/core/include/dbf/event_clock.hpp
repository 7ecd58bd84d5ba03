#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dbf/cluster.hpp"
#include "dbf/job.hpp"

namespace dbf {

/* Pending arrival stream for one episode, consumed in submission order.
   Arrivals sharing a submit time are still handed out one at a time so each
   gets its own decision cycle. */
class EventClock {
 public:
  EventClock() = default;

  explicit EventClock(std::vector<Job> arrivals) : arrivals_(std::move(arrivals)) {
    std::stable_sort(arrivals_.begin(), arrivals_.end(),
                     [](const Job& a, const Job& b) { return a.submit_time < b.submit_time; });
  }

  std::optional<double> next_arrival_time() const {
    if (exhausted()) return std::nullopt;
    return arrivals_[next_].submit_time;
  }

  Job pop_arrival() {
    if (exhausted()) throw std::logic_error("no arrivals left");
    return arrivals_[next_++];
  }

  bool exhausted() const noexcept { return next_ >= arrivals_.size(); }
  std::size_t remaining() const noexcept { return arrivals_.size() - next_; }

 private:
  std::vector<Job> arrivals_;
  std::size_t next_ = 0;
};

/* Next moment anything happens: the earlier of the next arrival and the next
   completion. Empty when both streams are dry (the episode cannot progress
   without a placement). */
inline std::optional<double> next_event_time(const EventClock& clock,
                                             const ClusterState& cluster) {
  std::optional<double> arrival = clock.next_arrival_time();
  std::optional<double> completion = cluster.next_completion_time();
  if (arrival && completion) return std::min(*arrival, *completion);
  return arrival ? arrival : completion;
}

}  // namespace dbf
