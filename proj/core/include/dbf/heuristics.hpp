#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dbf/cluster.hpp"
#include "dbf/env.hpp"
#include "dbf/job_queue.hpp"

namespace dbf {

enum class HeuristicKind { fcfs, sjf, lcfs, fcfs_easy };

std::optional<HeuristicKind> heuristic_from_name(const std::string& name);
std::string heuristic_name(HeuristicKind kind);

/* Single-placement policies: the queue index to start now, or empty to wait
   for the next event.
     fcfs: the head job, only if it fits.
     sjf:  the fitting job with the fewest cores (ties to the earliest).
     lcfs: the latest arrival that fits.
*/
std::optional<std::size_t> select_fcfs(const JobQueue& queue, int available_cores);
std::optional<std::size_t> select_sjf(const JobQueue& queue, int available_cores);
std::optional<std::size_t> select_lcfs(const JobQueue& queue, int available_cores);

/* EASY backfilling pass for the current instant. Heads are started greedily
   while they fit. When the head is blocked, its earliest possible start
   (the shadow time) is computed from the running allocations' finish times
   and held as a reservation; queued jobs behind it are then started in
   queue order if they fit now and do not push that reservation back, i.e.
   they either finish by the shadow time or only use cores the head leaves
   over. Returns the queue indices to start, in order, valid against the
   queue as passed in. */
std::vector<std::size_t> easy_backfill(const JobQueue& queue, const ClusterState& cluster);

struct HeuristicEpisodeResult {
  MetricsReport report;
  MetricsAccumulator metrics{1};  // raw accumulator, for per-type tables
  double end_time = 0.0;
  std::map<std::uint64_t, double> start_times;
};

/* Replays one episode under a heuristic on the same event engine the RL
   environment uses: the policy fires after every event, placing as many
   jobs as it wants to before time moves again. window_size only feeds the
   queue-visibility statistics. placement_target 0 drains the system. */
HeuristicEpisodeResult run_heuristic_episode(HeuristicKind kind, int total_cores,
                                             std::vector<Job> arrivals,
                                             std::size_t placement_target,
                                             std::size_t window_size);

}  // namespace dbf
