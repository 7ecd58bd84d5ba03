#include "doctest.h"

#include <map>
#include <random>
#include <vector>

#include "dbf/heuristics.hpp"
#include "dbf/rng.hpp"
#include "oracle_replay.hpp"

using namespace dbf;

namespace {

Job job(std::uint64_t id, double submit, int cores, double runtime) {
  return Job{.id = id, .submit_time = submit, .cores = cores, .runtime = runtime, .start_time = {}};
}

JobQueue queue_of(std::vector<Job> jobs) {
  JobQueue q;
  for (Job& j : jobs) q.push_back(std::move(j));
  return q;
}

// Runs one instance under the production engine and the unit-step oracle and
// requires identical start-time schedules.
void check_against_oracle(HeuristicKind kind, int cores, const std::vector<Job>& jobs) {
  auto result = run_heuristic_episode(kind, cores, jobs, 0, 6);
  auto expected = testing::oracle_start_times(kind, cores, jobs);
  REQUIRE(result.start_times.size() == jobs.size());
  REQUIRE(expected.size() == jobs.size());
  for (const auto& [id, t] : expected) {
    REQUIRE(result.start_times.count(id) == 1);
    CHECK(result.start_times.at(id) == t);
  }
  CHECK(result.report.mean_utilization ==
        doctest::Approx(testing::oracle_mean_utilization(kind, cores, jobs)).epsilon(1e-9));
}

const HeuristicKind kAllKinds[] = {HeuristicKind::fcfs, HeuristicKind::sjf,
                                   HeuristicKind::lcfs, HeuristicKind::fcfs_easy};

}  // namespace

TEST_SUITE_BEGIN("heuristics");

TEST_CASE("names round-trip") {
  for (HeuristicKind kind : kAllKinds) {
    auto parsed = heuristic_from_name(heuristic_name(kind));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
  }
  CHECK_FALSE(heuristic_from_name("round-robin").has_value());
}

TEST_CASE("fcfs only ever starts the head") {
  JobQueue blocked = queue_of({job(1, 0.0, 3, 5.0), job(2, 0.0, 1, 5.0)});
  CHECK_FALSE(select_fcfs(blocked, 2).has_value());

  JobQueue open = queue_of({job(1, 0.0, 2, 5.0)});
  CHECK(select_fcfs(open, 2) == std::size_t{0});

  JobQueue empty;
  CHECK_FALSE(select_fcfs(empty, 4).has_value());
}

TEST_CASE("sjf picks the narrowest fitting job, earliest on ties") {
  JobQueue q = queue_of({job(1, 0.0, 4, 5.0), job(2, 1.0, 2, 5.0), job(3, 2.0, 2, 5.0)});
  CHECK(select_sjf(q, 3) == std::size_t{1});

  JobQueue none = queue_of({job(1, 0.0, 4, 5.0)});
  CHECK_FALSE(select_sjf(none, 3).has_value());

  JobQueue single = queue_of({job(1, 0.0, 4, 5.0), job(2, 0.0, 3, 9.0)});
  CHECK(select_sjf(single, 3) == std::size_t{1});
}

TEST_CASE("lcfs picks the deepest fitting job") {
  JobQueue q = queue_of({job(1, 0.0, 1, 5.0), job(2, 1.0, 1, 5.0), job(3, 2.0, 1, 5.0)});
  CHECK(select_lcfs(q, 4) == std::size_t{2});

  JobQueue only_head = queue_of({job(1, 0.0, 1, 5.0), job(2, 1.0, 4, 5.0)});
  CHECK(select_lcfs(only_head, 2) == std::size_t{0});

  JobQueue empty;
  CHECK_FALSE(select_lcfs(empty, 4).has_value());
}

TEST_CASE("backfill accepts a job that finishes inside the reservation") {
  ClusterState cluster(4);
  cluster.allocate(job(99, 0.0, 2, 100.0));  // frees at t = 100

  // Head needs 4, so its reservation sits at t = 100 with nothing to spare.
  JobQueue q = queue_of({job(1, 0.0, 4, 10.0), job(2, 0.0, 2, 50.0)});
  auto picks = easy_backfill(q, cluster);
  REQUIRE(picks.size() == 1);
  CHECK(picks[0] == 1);  // finishes at 50 <= 100
}

TEST_CASE("backfill rejects a job that would push the reservation back") {
  ClusterState cluster(4);
  cluster.allocate(job(99, 0.0, 2, 100.0));

  JobQueue q = queue_of({job(1, 0.0, 4, 10.0), job(2, 0.0, 2, 200.0)});
  CHECK(easy_backfill(q, cluster).empty());  // would run past t = 100
}

TEST_CASE("backfill starts heads greedily while they fit") {
  ClusterState cluster(4);
  JobQueue q = queue_of({job(1, 0.0, 1, 5.0), job(2, 0.0, 2, 5.0), job(3, 0.0, 1, 5.0)});
  auto picks = easy_backfill(q, cluster);
  REQUIRE(picks.size() == 3);
  CHECK(picks[0] == 0);
  CHECK(picks[1] == 1);
  CHECK(picks[2] == 2);
}

TEST_CASE("backfill may consume cores the reservation leaves over") {
  ClusterState cluster(4);
  cluster.allocate(job(99, 0.0, 2, 10.0));  // frees at t = 10

  // Head needs 3, reserved at t = 10 leaving one spare core; a long 1-core
  // job may take the spare, a long 2-core job may not.
  JobQueue q = queue_of({job(1, 0.0, 3, 5.0), job(2, 0.0, 1, 50.0), job(3, 0.0, 2, 50.0)});
  auto picks = easy_backfill(q, cluster);
  REQUIRE(picks.size() == 1);
  CHECK(picks[0] == 1);
}

TEST_CASE("backfill on an empty queue does nothing") {
  ClusterState cluster(4);
  JobQueue empty;
  CHECK(easy_backfill(empty, cluster).empty());
}

TEST_CASE("fcfs keeps start times in arrival order") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Job> jobs;
    double submit = 0.0;
    for (int i = 0; i < 8; ++i) {
      submit += static_cast<double>(uniform_below(rng, 4));
      jobs.push_back(job(static_cast<std::uint64_t>(i + 1), submit,
                         1 + static_cast<int>(uniform_below(rng, 4)),
                         1.0 + static_cast<double>(uniform_below(rng, 5))));
    }
    auto result = run_heuristic_episode(HeuristicKind::fcfs, 4, jobs, 0, 6);
    for (std::size_t i = 1; i < jobs.size(); ++i)
      CHECK(result.start_times.at(jobs[i].id) >= result.start_times.at(jobs[i - 1].id));
  }
}

TEST_CASE("every policy matches the oracle on all two-job instances") {
  std::vector<Job> jobs;
  for (double s1 : {0.0, 1.0, 2.0})
    for (int c1 = 1; c1 <= 4; ++c1)
      for (double r1 : {1.0, 2.0, 3.0})
        for (double s2 : {0.0, 1.0, 2.0})
          for (int c2 = 1; c2 <= 4; ++c2)
            for (double r2 : {1.0, 2.0, 3.0}) {
              if (s2 < s1) continue;  // arrival order fixed by id
              jobs = {job(1, s1, c1, r1), job(2, s2, c2, r2)};
              for (HeuristicKind kind : kAllKinds)
                check_against_oracle(kind, 4, jobs);
            }
}

TEST_CASE("every policy matches the oracle on random deeper instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 400; ++trial) {
    std::size_t n = 3 + uniform_below(rng, 4);  // 3..6 jobs
    std::vector<Job> jobs;
    double submit = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      submit += static_cast<double>(uniform_below(rng, 3));
      jobs.push_back(job(i + 1, submit, 1 + static_cast<int>(uniform_below(rng, 4)),
                         1.0 + static_cast<double>(uniform_below(rng, 6))));
    }
    for (HeuristicKind kind : kAllKinds)
      check_against_oracle(kind, 4, jobs);
  }
}

/* The backfilling guarantee covers the reservation holder. The first job
   that waits under plain fcfs is the first job ever blocked at the head
   (everything before it started at its own submit), and up to that moment
   both policies behave identically, so its start must match exactly. */
TEST_CASE("backfilling never delays the first blocked job") {
  std::mt19937_64 rng(5150);
  int blocked_instances = 0;
  for (int trial = 0; trial < 600; ++trial) {
    std::size_t n = 2 + uniform_below(rng, 5);
    std::vector<Job> jobs;
    double submit = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      submit += static_cast<double>(uniform_below(rng, 3));
      jobs.push_back(job(i + 1, submit, 1 + static_cast<int>(uniform_below(rng, 4)),
                         1.0 + static_cast<double>(uniform_below(rng, 6))));
    }
    auto fcfs = run_heuristic_episode(HeuristicKind::fcfs, 4, jobs, 0, 6);
    const Job* holder = nullptr;
    for (const Job& j : jobs)
      if (fcfs.start_times.at(j.id) > j.submit_time) {
        holder = &j;
        break;
      }
    if (!holder) continue;
    ++blocked_instances;
    auto easy = run_heuristic_episode(HeuristicKind::fcfs_easy, 4, jobs, 0, 6);
    CHECK(easy.start_times.at(holder->id) == fcfs.start_times.at(holder->id));
  }
  CHECK(blocked_instances > 100);  // the family must actually exercise blocking
}

TEST_CASE("spare-core backfills may delay jobs behind the holder") {
  /* 4 cores. The head leaves one spare core, the 100s one-core job parks on
     it past the shadow, and job 3 loses the core it would have had at its
     fcfs start. The holder (job 2) is untouched. */
  std::vector<Job> jobs = {job(1, 0.0, 3, 10.0), job(2, 0.0, 2, 5.0),
                           job(3, 0.0, 2, 1.0), job(4, 0.0, 1, 100.0)};
  auto fcfs = run_heuristic_episode(HeuristicKind::fcfs, 4, jobs, 0, 6);
  auto easy = run_heuristic_episode(HeuristicKind::fcfs_easy, 4, jobs, 0, 6);
  CHECK(fcfs.start_times.at(2) == 10.0);
  CHECK(easy.start_times.at(2) == 10.0);
  CHECK(fcfs.start_times.at(3) == 10.0);
  CHECK(easy.start_times.at(3) == 15.0);
  CHECK(fcfs.start_times.at(4) == 11.0);
  CHECK(easy.start_times.at(4) == 0.0);
}

TEST_CASE("episode results carry per-type stats and fwd actions") {
  std::vector<Job> jobs = {job(1, 0.0, 2, 10.0), job(2, 0.0, 2, 10.0),
                           job(3, 5.0, 4, 20.0)};
  auto result = run_heuristic_episode(HeuristicKind::fcfs, 4, jobs, 0, 6);
  CHECK(result.report.placements == 3);
  CHECK(result.report.arrivals == 3);
  CHECK(result.report.fwd_rate == 1.0);  // heuristics only wait, never misfire
  CHECK(result.end_time > 0.0);
  CHECK_FALSE(result.metrics.job_types().empty());
}

TEST_SUITE_END();
