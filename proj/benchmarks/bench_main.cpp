// Microbenchmarks for the hot paths: environment stepping, policy forward
// passes, PPO updates, EASY backfilling over long queues and SWF parsing.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <sstream>

#include "dbf/agent.hpp"
#include "dbf/commands.hpp"
#include "dbf/config.hpp"
#include "dbf/env.hpp"
#include "dbf/heuristics.hpp"
#include "dbf/rng.hpp"
#include "dbf/workload.hpp"

namespace {

std::shared_ptr<const dbf::Trace> desk_trace() {
  static std::shared_ptr<const dbf::Trace> trace = [] {
    dbf::RunConfig config;
    return std::make_shared<const dbf::Trace>(dbf::load_workload(config));
  }();
  return trace;
}

void BM_EnvStepRandom(benchmark::State& state) {
  dbf::RunConfig config;
  dbf::SchedulingEnv env(config.env_config(), desk_trace());
  std::mt19937_64 rng(7);
  env.reset(1);
  std::uint64_t seed = 2;
  for (auto _ : state) {
    if (env.done()) env.reset(seed++);
    int action = static_cast<int>(dbf::uniform_below(
        rng, static_cast<std::uint64_t>(env.action_count())));
    benchmark::DoNotOptimize(env.step(action));
  }
}
BENCHMARK(BM_EnvStepRandom);

void BM_PolicyForward(benchmark::State& state) {
  const int obs_size = 16 + 3 * 6;
  dbf::PolicyParams params =
      dbf::make_policy(obs_size, 7, {64, 64}, 42);
  std::vector<double> obs(obs_size, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(dbf::policy_forward(params, obs));
}
BENCHMARK(BM_PolicyForward);

void BM_PpoUpdate(benchmark::State& state) {
  const int obs_size = 16 + 3 * 6;
  dbf::PolicyParams params = dbf::make_policy(obs_size, 7, {64, 64}, 42);
  dbf::PpoHyperparams hp;
  std::mt19937_64 rng(11);

  dbf::RolloutBuffer buffer;
  for (int i = 0; i < 512; ++i) {
    std::vector<double> obs(obs_size);
    for (double& x : obs) x = dbf::uniform01(rng);
    buffer.push(obs, i % 7, -1.9, i % 3 ? -0.5 : 0.0, 0.1, i == 511);
  }

  for (auto _ : state) {
    dbf::PolicyParams copy = params;
    dbf::AdamOptimizer a, c;
    std::mt19937_64 shuffle(3);
    dbf::ppo_update(copy, a, c, buffer, hp, shuffle);
    benchmark::DoNotOptimize(copy);
  }
}
BENCHMARK(BM_PpoUpdate);

void BM_EasyBackfill(benchmark::State& state) {
  dbf::ClusterState cluster(64);
  std::mt19937_64 rng(5);
  dbf::Job wide{.id = 9000, .submit_time = 0.0, .cores = 60, .runtime = 500.0};
  cluster.allocate(wide);

  dbf::JobQueue queue;
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(state.range(0)); ++i) {
    dbf::Job j;
    j.id = i + 1;
    j.submit_time = 0.0;
    j.cores = 1 + static_cast<int>(dbf::uniform_below(rng, 64));
    j.runtime = 1.0 + 100.0 * dbf::uniform01(rng);
    queue.push_back(j);
  }
  for (auto _ : state) benchmark::DoNotOptimize(dbf::easy_backfill(queue, cluster));
}
BENCHMARK(BM_EasyBackfill)->Arg(64)->Arg(512);

void BM_ParseSwf(benchmark::State& state) {
  dbf::SyntheticParams params;
  std::ostringstream swf;
  dbf::write_swf(swf, dbf::generate_synthetic(params, 5000));
  std::string text = swf.str();
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(dbf::parse_swf(in));
  }
}
BENCHMARK(BM_ParseSwf);

}  // namespace

BENCHMARK_MAIN();
