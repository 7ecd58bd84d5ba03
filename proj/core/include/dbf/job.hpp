#pragma once

#include <cstdint>
#include <optional>

namespace dbf {

/* One batch job. Times are seconds; runtime is the exact execution time
   (the simulator has no early or late completions). start_time stays empty
   until the job is allocated. */
struct Job {
  std::uint64_t id = 0;
  double submit_time = 0.0;
  int cores = 1;
  double runtime = 1.0;
  std::optional<double> start_time;

  double wait_at(double now) const { return now - submit_time; }
  bool operator==(const Job& other) const {
    return id == other.id && submit_time == other.submit_time &&
           cores == other.cores && runtime == other.runtime &&
           start_time == other.start_time;
  }
};

}  // namespace dbf
