#include "dbf/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "dbf/errors.hpp"
#include "dbf/rng.hpp"

namespace dbf {

namespace {

constexpr int kSwfFieldCount = 18;

// Header comments may declare cluster-wide limits, e.g. "; MaxProcs: 256".
void scan_header_comment(const std::string& line, TraceMeta& meta) {
  auto grab = [&](const char* key) -> std::optional<double> {
    auto pos = line.find(key);
    if (pos == std::string::npos) return std::nullopt;
    pos = line.find(':', pos);
    if (pos == std::string::npos) return std::nullopt;
    try {
      return std::stod(line.substr(pos + 1));
    } catch (...) {
      return std::nullopt;
    }
  };
  if (auto v = grab("MaxProcs")) meta.max_cores = static_cast<int>(*v);
  if (auto v = grab("MaxRuntime")) meta.max_runtime = *v;
}

}  // namespace

Trace parse_swf(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[line.find_first_not_of(" \t")] == ';') {
      scan_header_comment(line, trace.meta);
      continue;
    }

    std::istringstream fields(line);
    std::vector<double> f;
    double v;
    while (fields >> v) f.push_back(v);
    if (!fields.eof())
      throw ParseError("non-numeric field", line_no);
    if (f.size() != kSwfFieldCount)
      throw ParseError("expected 18 fields, got " + std::to_string(f.size()), line_no);

    // 1 id, 2 submit, 4 actual runtime, 5 allocated procs,
    // 8 requested procs, 9 requested time, 11 status
    double cores = f[7] > 0 ? f[7] : f[4];
    double runtime = f[8] > 0 ? f[8] : f[3];
    bool cancelled = f[10] == 5;
    if (cores < 1 || runtime < 1 || cancelled) {
      ++trace.meta.skipped;
      continue;
    }

    Job job;
    job.id = static_cast<std::uint64_t>(f[0]);
    job.submit_time = f[1];
    job.cores = static_cast<int>(cores);
    job.runtime = runtime;
    trace.jobs.push_back(job);
  }

  std::stable_sort(trace.jobs.begin(), trace.jobs.end(),
                   [](const Job& a, const Job& b) { return a.submit_time < b.submit_time; });
  for (const Job& j : trace.jobs) {
    trace.meta.max_cores = std::max(trace.meta.max_cores, j.cores);
    trace.meta.max_runtime = std::max(trace.meta.max_runtime, j.runtime);
  }
  return trace;
}

Trace parse_swf_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw WorkloadError("cannot open trace file: " + path);
  Trace trace = parse_swf(in);
  trace.meta.source = path;
  return trace;
}

Trace generate_synthetic(const SyntheticParams& params, std::size_t count) {
  if (params.cores < 1) throw ConfigError("workload.synthetic.cores", "must be >= 1");
  if (params.runtime_cap < 1) throw ConfigError("workload.synthetic.runtime_cap", "must be >= 1");
  if (params.arrival_rate <= 0) throw ConfigError("workload.synthetic.arrival_rate", "must be > 0");
  if (params.pow2_bias < 0 || params.pow2_bias > 1)
    throw ConfigError("workload.synthetic.pow2_bias", "must be in [0, 1]");

  std::mt19937_64 rng(params.seed);

  // Powers of two up to the cluster size.
  std::vector<int> pow2;
  for (int p = 1; p <= params.cores; p *= 2) {
    pow2.push_back(p);
    if (p > params.cores / 2) break;
  }

  Trace trace;
  trace.jobs.reserve(count);
  double t = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    t += sample_exponential(rng, params.arrival_rate);

    double r = std::exp(params.runtime_log_mean +
                        params.runtime_log_sigma * sample_standard_normal(rng));
    r = std::clamp(r, 1.0, params.runtime_cap);

    int c;
    if (uniform01(rng) < params.pow2_bias) {
      c = pow2[static_cast<std::size_t>(uniform_below(rng, pow2.size()))];
    } else {
      c = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(params.cores)));
    }
    c = std::clamp(c, 1, params.cores);

    Job job;
    job.id = i + 1;
    job.submit_time = t;
    job.cores = c;
    job.runtime = r;
    trace.jobs.push_back(job);
  }

  trace.meta.max_cores = params.cores;
  trace.meta.max_runtime = params.runtime_cap;
  trace.meta.source = "synthetic";
  return trace;
}

std::vector<Job> sample_episode(const Trace& trace, std::uint64_t seed, std::size_t n_jobs) {
  if (n_jobs == 0) throw WorkloadError("episode needs at least one job");
  if (trace.jobs.size() < n_jobs)
    throw WorkloadError("trace holds " + std::to_string(trace.jobs.size()) +
                        " jobs, episode needs " + std::to_string(n_jobs));

  std::mt19937_64 rng(seed);
  std::size_t span = trace.jobs.size() - n_jobs + 1;
  std::size_t offset = static_cast<std::size_t>(uniform_below(rng, span));

  std::vector<Job> episode(trace.jobs.begin() + static_cast<std::ptrdiff_t>(offset),
                           trace.jobs.begin() + static_cast<std::ptrdiff_t>(offset + n_jobs));
  double base = episode.front().submit_time;
  for (Job& j : episode) {
    j.submit_time -= base;
    j.start_time.reset();
  }
  return episode;
}

void write_swf(std::ostream& out, const Trace& trace) {
  out << "; Generated by dbf gen-trace\n";
  out << "; MaxProcs: " << trace.meta.max_cores << "\n";
  out << "; MaxRuntime: " << std::setprecision(17) << trace.meta.max_runtime << "\n";
  for (const Job& j : trace.jobs) {
    out << j.id << ' ' << std::setprecision(17) << j.submit_time << ' '
        << -1 << ' ' << std::setprecision(17) << j.runtime << ' ' << j.cores << ' '
        << -1 << ' ' << -1 << ' ' << j.cores << ' '
        << std::setprecision(17) << j.runtime << ' ' << -1 << ' '
        << 1 << ' ' << -1 << ' ' << -1 << ' ' << -1 << ' ' << -1 << ' '
        << -1 << ' ' << -1 << ' ' << -1 << "\n";
  }
}

}  // namespace dbf
