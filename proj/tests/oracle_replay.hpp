#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dbf/heuristics.hpp"
#include "dbf/job.hpp"

namespace dbf::testing {

/* Independent re-implementation of the scheduling policies as a unit-step
   replay over integer times: no event queue, no shared simulator code, just
   the policy definitions applied at every tick. Completions free their cores
   before arrivals enter; arrivals sharing a tick are admitted one at a time
   with a full scheduling pass after each, mirroring the engine's
   one-arrival-per-cycle rule. Jobs must have integer submit/runtime. */
std::map<std::uint64_t, double> oracle_start_times(HeuristicKind kind, int total_cores,
                                                   const std::vector<Job>& jobs);

// Time-averaged utilization over [first arrival, drain] for the same replay.
double oracle_mean_utilization(HeuristicKind kind, int total_cores,
                               const std::vector<Job>& jobs);

}  // namespace dbf::testing
