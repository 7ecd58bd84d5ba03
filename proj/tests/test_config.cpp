#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dbf/config.hpp"
#include "dbf/errors.hpp"

using namespace dbf;

namespace {

std::string write_temp_config(const std::string& name, const std::string& text) {
  std::string path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults pass validation") {
  RunConfig c;
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("every advertised key applies to its field") {
  RunConfig c;
  apply_config_value(c, "cluster.cores", "32");
  apply_config_value(c, "window.head", "7");
  apply_config_value(c, "window.tail", "2");
  apply_config_value(c, "reward.w1", "0.5");
  apply_config_value(c, "episode.placements", "123");
  apply_config_value(c, "workload.source", "trace.swf");
  apply_config_value(c, "workload.synthetic.arrival_rate", "0.25");
  apply_config_value(c, "scheduler", "fcfs");
  apply_config_value(c, "ppo.hidden", "16, 8");
  apply_config_value(c, "ppo.learning_rate", "0.001");
  apply_config_value(c, "ppo.use_gae", "true");
  apply_config_value(c, "train.episodes", "55");
  apply_config_value(c, "eval.greedy", "1");
  apply_config_value(c, "seed", "999");
  apply_config_value(c, "out.dir", "results");

  CHECK(c.cluster_cores == 32);
  CHECK(c.window_head == 7);
  CHECK(c.window_tail == 2);
  CHECK(c.reward_w1 == 0.5);
  CHECK(c.episode_placements == 123);
  CHECK(c.workload_source == "trace.swf");
  CHECK(c.synthetic.arrival_rate == 0.25);
  CHECK(c.scheduler == "fcfs");
  CHECK(c.hidden == std::vector<int>{16, 8});
  CHECK(c.ppo.learning_rate == 0.001);
  CHECK(c.ppo.use_gae);
  CHECK(c.train_episodes == 55);
  CHECK(c.eval_greedy);
  CHECK(c.seed == 999);
  CHECK(c.out_dir == "results");
}

TEST_CASE("config map round-trips through apply") {
  RunConfig original;
  original.cluster_cores = 24;
  original.window_head = 3;
  original.hidden = {32};
  original.ppo.clip = 0.15;
  original.eval_greedy = true;

  RunConfig rebuilt;
  for (const auto& [key, value] : config_to_map(original)) {
    if (value.empty()) continue;  // empty strings (eval.checkpoint) keep defaults
    apply_config_value(rebuilt, key, value);
  }
  CHECK(canonical_config(rebuilt) == canonical_config(original));
  CHECK(config_hash(rebuilt) == config_hash(original));
}

TEST_CASE("unknown keys and bad values name the key") {
  RunConfig c;
  CHECK_THROWS_AS(apply_config_value(c, "cluster.size", "16"), ConfigError);
  CHECK_THROWS_AS(apply_config_value(c, "cluster.cores", "many"), ConfigError);
  CHECK_THROWS_AS(apply_config_value(c, "cluster.cores", "16x"), ConfigError);
  CHECK_THROWS_AS(apply_config_value(c, "ppo.use_gae", "maybe"), ConfigError);
  CHECK_THROWS_AS(apply_config_value(c, "ppo.hidden", ""), ConfigError);

  try {
    apply_config_value(c, "window.heads", "4");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("window.heads") != std::string::npos);
  }
}

TEST_CASE("config files override in order and ignore comments") {
  std::string path = write_temp_config("dbf_cfg_basic.cfg",
                                       "# a comment line\n"
                                       "cluster.cores = 64\n"
                                       "\n"
                                       "window.head = 4   # trailing comment\n"
                                       "window.head = 6\n");
  RunConfig c = parse_config_file(path);
  CHECK(c.cluster_cores == 64);
  CHECK(c.window_head == 6);
  std::filesystem::remove(path);
}

TEST_CASE("config files reject junk lines and missing files") {
  std::string path = write_temp_config("dbf_cfg_junk.cfg", "cluster.cores 64\n");
  CHECK_THROWS_AS(parse_config_file(path), ConfigError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/dbf.cfg"), ConfigError);
}

TEST_CASE("validation names the offending field") {
  auto expect_field = [](RunConfig c, const std::string& field) {
    try {
      validate_config(c);
      FAIL("expected ConfigError for " << field);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };

  RunConfig bad_cores;
  bad_cores.cluster_cores = 0;
  expect_field(bad_cores, "cluster.cores");

  RunConfig bad_window;
  bad_window.window_head = 0;
  bad_window.window_tail = 0;
  expect_field(bad_window, "window.head");

  RunConfig bad_weight;
  bad_weight.reward_w2 = 1.5;
  expect_field(bad_weight, "reward.w2");

  RunConfig heavy;
  heavy.reward_w1 = 0.5;
  heavy.reward_w2 = 0.5;
  heavy.reward_w3 = 0.5;
  expect_field(heavy, "reward.w1");

  RunConfig bad_sched;
  bad_sched.scheduler = "ejf";
  expect_field(bad_sched, "scheduler");

  RunConfig bad_gamma;
  bad_gamma.ppo.gamma = 0.0;
  expect_field(bad_gamma, "ppo.gamma");

  RunConfig wide_synth;
  wide_synth.synthetic.cores = 64;  // cluster stays 16
  expect_field(wide_synth, "workload.synthetic.cores");
}

TEST_CASE("weights summing exactly to one validate") {
  RunConfig c;
  c.reward_w1 = 0.2;
  c.reward_w2 = 0.3;
  c.reward_w3 = 0.5;
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("hash is stable for equal configs and moves with any field") {
  RunConfig a;
  RunConfig b;
  CHECK(config_hash(a) == config_hash(b));

  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));

  RunConfig c;
  c.reward_w1 = 0.33333333333333331;  // bit-identical to 1/3
  CHECK(config_hash(a) == config_hash(c));

  RunConfig d;
  d.window_tail = 0;
  CHECK(config_hash(a) != config_hash(d));
}

TEST_CASE("canonical form lists keys in sorted order") {
  std::string canon = canonical_config(RunConfig{});
  std::string previous;
  std::istringstream in(canon);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    std::string key = line.substr(0, line.find('='));
    CHECK(key > previous);
    previous = key;
  }
  CHECK(lines == config_keys().size());
}

TEST_CASE("env config mirrors the run config") {
  RunConfig c;
  c.cluster_cores = 48;
  c.window_head = 4;
  c.window_tail = 2;
  c.reward_w1 = 0.1;
  c.episode_placements = 77;
  c.episode_jobs = 99;

  EnvConfig e = c.env_config();
  CHECK(e.cluster_cores == 48);
  CHECK(e.window.head == 4);
  CHECK(e.window.tail == 2);
  CHECK(e.weights.w1 == 0.1);
  CHECK(e.episode_placements == 77);
  CHECK(e.jobs_per_episode() == 99);

  c.episode_jobs = 0;
  CHECK(c.env_config().jobs_per_episode() == 77 * 4);
}

TEST_CASE("synthetic workload loads with the configured count") {
  RunConfig c;
  c.synthetic_count = 500;
  Trace t = load_workload(c);
  CHECK(t.jobs.size() == 500);
  CHECK(t.meta.source == "synthetic");

  RunConfig missing;
  missing.workload_source = "/nonexistent/trace.swf";
  CHECK_THROWS(load_workload(missing));
}

TEST_SUITE_END();
