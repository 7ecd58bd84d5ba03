#include "dbf/heuristics.hpp"

#include <algorithm>
#include <limits>

#include "dbf/errors.hpp"

namespace dbf {

std::optional<HeuristicKind> heuristic_from_name(const std::string& name) {
  if (name == "fcfs") return HeuristicKind::fcfs;
  if (name == "sjf") return HeuristicKind::sjf;
  if (name == "lcfs") return HeuristicKind::lcfs;
  if (name == "fcfs-easy") return HeuristicKind::fcfs_easy;
  return std::nullopt;
}

std::string heuristic_name(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::fcfs: return "fcfs";
    case HeuristicKind::sjf: return "sjf";
    case HeuristicKind::lcfs: return "lcfs";
    case HeuristicKind::fcfs_easy: return "fcfs-easy";
  }
  return "?";
}

std::optional<std::size_t> select_fcfs(const JobQueue& queue, int available_cores) {
  if (!queue.empty() && queue.at(0).cores <= available_cores) return 0;
  return std::nullopt;
}

std::optional<std::size_t> select_sjf(const JobQueue& queue, int available_cores) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    if (queue.at(i).cores > available_cores) continue;
    if (!best || queue.at(i).cores < queue.at(*best).cores) best = i;
  }
  return best;
}

std::optional<std::size_t> select_lcfs(const JobQueue& queue, int available_cores) {
  for (std::size_t i = queue.size(); i-- > 0;)
    if (queue.at(i).cores <= available_cores) return i;
  return std::nullopt;
}

std::vector<std::size_t> easy_backfill(const JobQueue& queue, const ClusterState& cluster) {
  std::vector<std::size_t> picks;
  int avail = cluster.available_cores();
  double now = cluster.now();

  // Occupancy profile the reservation is computed against: running jobs
  // plus everything this pass has already decided to start.
  struct Busy { int cores; double finish; };
  std::vector<Busy> busy;
  for (const auto& a : cluster.allocations()) busy.push_back({a.job.cores, a.finish_time});

  std::vector<bool> taken(queue.size(), false);
  std::size_t head = 0;

  auto start = [&](std::size_t i) {
    picks.push_back(i);
    taken[i] = true;
    avail -= queue.at(i).cores;
    busy.push_back({queue.at(i).cores, now + queue.at(i).runtime});
  };

  // Greedy phase: consume heads while they fit.
  while (head < queue.size() && queue.at(head).cores <= avail) start(head++);
  if (head >= queue.size()) return picks;

  // Shadow time: earliest moment enough cores free up for the blocked head.
  // Candidate moments are the distinct finish times of the busy profile.
  int needed = queue.at(head).cores;
  std::vector<double> finishes;
  for (const Busy& b : busy) finishes.push_back(b.finish);
  std::sort(finishes.begin(), finishes.end());
  finishes.erase(std::unique(finishes.begin(), finishes.end()), finishes.end());

  auto free_at = [&](double t) {
    int used = 0;
    for (const Busy& b : busy)
      if (b.finish > t) used += b.cores;
    return cluster.total_cores() - used;
  };

  double shadow = now;
  for (double t : finishes) {
    if (free_at(t) >= needed) { shadow = t; break; }
  }
  // Cores beyond the head's need at the shadow moment; jobs running past the
  // reservation may use these without delaying it.
  int extra = free_at(shadow) - needed;

  for (std::size_t i = head + 1; i < queue.size(); ++i) {
    if (taken[i]) continue;
    const Job& j = queue.at(i);
    if (j.cores > avail) continue;
    bool ends_by_shadow = now + j.runtime <= shadow;
    if (!ends_by_shadow && j.cores > extra) continue;
    start(i);
    if (!ends_by_shadow) extra -= j.cores;
  }
  return picks;
}

HeuristicEpisodeResult run_heuristic_episode(HeuristicKind kind, int total_cores,
                                             std::vector<Job> arrivals,
                                             std::size_t placement_target,
                                             std::size_t window_size) {
  EpisodeSim sim(total_cores, std::move(arrivals), placement_target);
  HeuristicEpisodeResult result;

  auto place_tracked = [&](std::size_t qi) {
    Job started = sim.place(qi);
    result.start_times[started.id] = *started.start_time;
  };

  // One scheduling pass at the current instant.
  auto pass = [&] {
    while (!sim.finished()) {
      if (kind == HeuristicKind::fcfs_easy) {
        std::vector<std::size_t> picks = easy_backfill(sim.queue(), sim.cluster());
        if (picks.empty()) return;
        // Indices shift as jobs leave the queue: each removal lowers the
        // later indices by one per earlier pick below them.
        std::vector<std::size_t> done;
        for (std::size_t idx : picks) {
          if (sim.finished()) return;
          std::size_t shift = 0;
          for (std::size_t d : done)
            if (d < idx) ++shift;
          place_tracked(idx - shift);
          done.push_back(idx);
        }
        continue;  // allocations changed; run another pass to a fixpoint
      }
      std::optional<std::size_t> pick;
      switch (kind) {
        case HeuristicKind::fcfs: pick = select_fcfs(sim.queue(), sim.cluster().available_cores()); break;
        case HeuristicKind::sjf: pick = select_sjf(sim.queue(), sim.cluster().available_cores()); break;
        case HeuristicKind::lcfs: pick = select_lcfs(sim.queue(), sim.cluster().available_cores()); break;
        case HeuristicKind::fcfs_easy: break;
      }
      if (!pick) return;
      place_tracked(*pick);
    }
  };

  sim.metrics().record_window_sample(sim.queue().size(), window_size);
  pass();
  while (!sim.finished() && sim.has_pending_event()) {
    sim.advance_next_event();
    sim.metrics().record_action(false, true, false);  // waiting mirrors a Fwd
    sim.metrics().record_window_sample(sim.queue().size(), window_size);
    pass();
  }

  result.end_time = sim.now();
  result.report = sim.metrics().finalize(sim.now());
  result.metrics = sim.metrics();
  return result;
}

}  // namespace dbf
