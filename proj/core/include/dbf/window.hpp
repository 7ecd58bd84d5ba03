#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dbf/job_queue.hpp"

namespace dbf {

/* Split observation window over the queue: the first `head` slots track the
   front of the queue, the remaining `tail` slots track its back. Either part
   may be empty, but not both. */
struct WindowConfig {
  int head = 5;
  int tail = 1;
  int size() const noexcept { return head + tail; }
};

struct WindowSlot {
  std::size_t queue_index;  // 0-based position in the queue right now
  int cores;
  double runtime;
  double wait;              // accumulated waiting time at build time
};

/* Immutable snapshot mapping window slots to queue positions. Slot i holds
   the i-th head job for i < head; tail slots hold the deepest queue
   positions not already covered, in queue order. Unfilled slots are empty,
   so actions on them are invalid by construction. */
class WindowView {
 public:
  explicit WindowView(std::size_t size) : slots_(size) {}

  std::size_t size() const noexcept { return slots_.size(); }
  bool occupied(std::size_t slot) const { return slots_.at(slot).has_value(); }
  const WindowSlot& slot(std::size_t slot) const { return *slots_.at(slot); }

  bool covers(std::size_t queue_index) const {
    for (const auto& s : slots_)
      if (s && s->queue_index == queue_index) return true;
    return false;
  }

  void set(std::size_t slot, WindowSlot value) { slots_.at(slot) = value; }

 private:
  std::vector<std::optional<WindowSlot>> slots_;
};

/* Builds the window for the current queue. With L jobs queued, head slots
   take positions 0 .. min(L, head)-1 and tail slots take the min(tail, rest)
   highest positions not already claimed, keeping ascending order. A queue
   shorter than the window leaves the leftover slots empty. */
WindowView build_window(const JobQueue& queue, const WindowConfig& config, double now);

}  // namespace dbf
