// Command line front end: argument parsing only, the work lives in
// dbf/commands.hpp so experiments are scriptable from tests as well.

#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "dbf/commands.hpp"
#include "dbf/config.hpp"
#include "dbf/errors.hpp"
#include "dbf/version.hpp"

namespace {

struct CommonArgs {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> overrides;
};

/* Every RunConfig key doubles as a long flag (--cluster.cores 32). Values
   are collected as strings and applied after the file so the flag wins. */
void add_config_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_file, "Configuration file (key = value lines)");
  for (const std::string& key : dbf::config_keys()) {
    cmd->add_option_function<std::string>(
        "--" + key,
        [&args, key](const std::string& value) { args.overrides.emplace_back(key, value); },
        "Override " + key);
  }
}

dbf::RunConfig resolve_config(const CommonArgs& args, bool validate = true) {
  dbf::RunConfig config;
  if (!args.config_file.empty()) config = dbf::parse_config_file(args.config_file);
  for (const auto& [key, value] : args.overrides)
    dbf::apply_config_value(config, key, value);
  // gen-trace only touches the generator, whose own checks apply.
  if (validate) dbf::validate_config(config);
  return config;
}

std::vector<std::pair<int, int>> parse_splits(const std::vector<std::string>& specs) {
  std::vector<std::pair<int, int>> splits;
  for (const std::string& s : specs) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
      throw dbf::ConfigError("splits", "expected head:tail, got '" + s + "'");
    try {
      splits.emplace_back(std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1)));
    } catch (const std::exception&) {
      throw dbf::ConfigError("splits", "expected head:tail, got '" + s + "'");
    }
  }
  return splits;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split-window cluster scheduling lab"};
  app.set_version_flag("--version", std::string(dbf::kToolName) + " " +
                                        std::string(dbf::kToolVersion));
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, compare_args, sweep_args, gen_args;

  CLI::App* train = app.add_subcommand("train", "Train a policy and log per-episode metrics");
  add_config_options(train, train_args);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint or a heuristic");
  add_config_options(evaluate, eval_args);
  std::string checkpoint;
  evaluate->add_option("--checkpoint", checkpoint, "Checkpoint to load (scheduler=agent)");

  CLI::App* compare = app.add_subcommand("compare", "Run several schedulers on paired workloads");
  add_config_options(compare, compare_args);
  std::vector<std::string> schedulers;
  compare->add_option("--schedulers", schedulers, "Schedulers to compare")
      ->delimiter(',')
      ->required();

  CLI::App* sweep = app.add_subcommand("sweep-split", "Train and evaluate window splits");
  add_config_options(sweep, sweep_args);
  int window_total = 0;
  std::vector<std::string> split_specs;
  sweep->add_option("--window", window_total, "Total window size M")->required();
  sweep->add_option("--splits", split_specs, "head:tail pairs summing to M")
      ->delimiter(',')
      ->required();

  CLI::App* gen = app.add_subcommand("gen-trace", "Write a synthetic workload as SWF");
  add_config_options(gen, gen_args);
  std::size_t count = 0;
  std::string out_file;
  gen->add_option("--count", count, "Number of jobs")->required();
  gen->add_option("--out", out_file, "Output SWF path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return dbf::cmd_train(resolve_config(train_args));
    if (evaluate->parsed()) {
      dbf::RunConfig config = resolve_config(eval_args);
      if (config.scheduler == "agent" && checkpoint.empty())
        throw dbf::ConfigError("checkpoint", "evaluate with scheduler=agent needs --checkpoint");
      return dbf::cmd_evaluate(config, checkpoint);
    }
    if (compare->parsed())
      return dbf::cmd_compare(resolve_config(compare_args), schedulers);
    if (sweep->parsed())
      return dbf::cmd_sweep_split(resolve_config(sweep_args), window_total,
                                  parse_splits(split_specs));
    if (gen->parsed())
      return dbf::cmd_gen_trace(resolve_config(gen_args, false), count, out_file);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
