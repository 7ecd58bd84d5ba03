#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dbf/job.hpp"

namespace dbf {

struct TraceMeta {
  int max_cores = 0;        // declared by the trace header, else observed
  double max_runtime = 0.0; // same
  std::size_t skipped = 0;  // data lines dropped (unresolvable or cancelled)
  std::string source;       // "synthetic" or the file path
};

struct Trace {
  std::vector<Job> jobs;  // submit times non-decreasing, cores/runtime >= 1
  TraceMeta meta;
};

/* Parameters of the synthetic workload generator. Runtimes are log-normal,
   clamped to [1, runtime_cap]. Core counts favor powers of two with
   probability pow2_bias, otherwise uniform in [1, cores]; either way they
   are capped at the cluster size. Inter-arrival gaps are exponential with
   the given rate (jobs per second). */
struct SyntheticParams {
  int cores = 256;
  double runtime_log_mean = 6.494;
  double runtime_log_sigma = 1.7;
  double runtime_cap = 124707.0;
  double pow2_bias = 0.75;
  double arrival_rate = 271.5 / 209278.0;
  std::uint64_t seed = 9001;
};

/* Reads Standard Workload Format text: ';' comment lines, then 18
   whitespace-separated fields per job. Field 8 (requested processors) gives
   the core count, falling back to field 5 (allocated) when -1; field 9
   (requested time) gives the runtime, falling back to field 4 (actual).
   Jobs with no resolvable cores or runtime, and cancelled jobs (status 5),
   are skipped and counted in meta.skipped. A line with the wrong field
   count or a non-numeric field raises ParseError with its line number. */
Trace parse_swf(std::istream& in);
Trace parse_swf_file(const std::string& path);

Trace generate_synthetic(const SyntheticParams& params, std::size_t count);

/* Cuts one episode of n_jobs consecutive jobs starting at a seeded random
   offset, re-basing submit times so the first job arrives at t = 0.
   Throws WorkloadError when the trace holds fewer than n_jobs jobs. */
std::vector<Job> sample_episode(const Trace& trace, std::uint64_t seed, std::size_t n_jobs);

// Serializes jobs back out as SWF, including MaxProcs/MaxRuntime headers.
void write_swf(std::ostream& out, const Trace& trace);

}  // namespace dbf
