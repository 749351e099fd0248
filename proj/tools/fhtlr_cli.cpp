// Command-line experiment runner: train / compare / solve / params.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fhtlr/config.hpp"
#include "fhtlr/experiment.hpp"

namespace {

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("FHTLR_OUT_DIR")) return env;
  return "out";
}

fhtlr::ExperimentConfig load_with_overrides(const std::string& path,
                                            const std::vector<std::uint64_t>& seeds) {
  fhtlr::ExperimentConfig cfg = fhtlr::load_experiment_config(path);
  if (!seeds.empty()) cfg.seeds = seeds;
  return cfg;
}

int cmd_train(const std::string& config_path, const std::vector<std::uint64_t>& seeds,
              const std::filesystem::path& out_dir, bool timing) {
  const auto cfg = load_with_overrides(config_path, seeds);
  fhtlr::RunOptions opts;
  opts.record_timing = timing;
  const auto result = fhtlr::run_experiment(cfg, out_dir, opts);
  for (const auto& path : result.seed_csvs) std::cout << path.string() << "\n";
  std::cout << result.aggregate_csv.string() << "\n";
  if (result.any_failed()) {
    std::cerr << "one or more seeds diverged\n";
    return 2;
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths,
                const std::vector<std::uint64_t>& seeds,
                const std::filesystem::path& out_dir, bool timing) {
  std::vector<fhtlr::ExperimentConfig> configs;
  for (const auto& path : config_paths) configs.push_back(load_with_overrides(path, seeds));
  fhtlr::RunOptions opts;
  opts.record_timing = timing;
  const auto rows = fhtlr::compare(configs, out_dir, opts);
  std::printf("%-12s %-8s %14s %12s %10s\n", "environment", "agent", "mean_return", "std",
              "params");
  bool failed = false;
  for (const auto& r : rows) {
    std::printf("%-12s %-8s %14.4f %12.4f %10zu%s\n", r.environment.c_str(), r.agent.c_str(),
                r.mean_final_return, r.std_final_return, r.params,
                r.failed ? "  [FAILED]" : "");
    failed = failed || r.failed;
  }
  std::cout << (out_dir / "comparison.csv").string() << "\n";
  return failed ? 2 : 0;
}

int cmd_solve(const std::string& config_path, const std::filesystem::path& out_dir) {
  const auto cfg = fhtlr::load_experiment_config(config_path);
  const auto out = fhtlr::solve_environment(cfg.environment, out_dir);
  std::printf("v_start = %.4f\n", out.solution.v_start);
  std::cout << out.q_star_csv.string() << "\n" << out.pi_star_csv.string() << "\n";
  return 0;
}

int cmd_params(const std::string& config_path) {
  const auto cfg = fhtlr::load_experiment_config(config_path);
  const auto env = fhtlr::make_environment(cfg.environment);
  const auto& space = env->space();
  const auto agent = fhtlr::make_agent(cfg, space, cfg.seeds.front());
  std::printf("environment: %s\n", cfg.environment.id.c_str());
  std::printf("agent: %s\n", cfg.agent.id.c_str());
  std::printf("params: %zu\n", agent->parameter_count());
  std::printf("dense_fh_table: %zu\n", space.num_cells());
  std::printf("dense_stationary_table: %zu\n", space.num_states() * space.num_actions());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-horizon tensor low-rank RL experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> config_paths;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir = default_out_dir();
  bool timing = false;

  auto* train = app.add_subcommand("train", "train one experiment config and write CSVs");
  train->add_option("--config", config_path, "experiment config file")->required();
  train->add_option("--seed", seeds, "override config seeds")->delimiter(',');
  train->add_option("--out", out_dir, "output directory (default $FHTLR_OUT_DIR or ./out)");
  train->add_flag("--timing", timing,
                  "record wall-clock in elapsed_ms (breaks byte-identical reruns)");

  auto* comp = app.add_subcommand("compare", "run several configs and tabulate final returns");
  comp->add_option("--config", config_paths, "experiment config files")
      ->required()
      ->take_all();
  comp->add_option("--seed", seeds, "override config seeds for every run")->delimiter(',');
  comp->add_option("--out", out_dir, "output directory");
  comp->add_flag("--timing", timing, "record wall-clock in elapsed_ms");

  auto* solve = app.add_subcommand("solve", "backward-induction oracle dump for the environment");
  solve->add_option("--config", config_path, "experiment config file")->required();
  solve->add_option("--out", out_dir, "output directory");

  auto* params = app.add_subcommand("params", "report parameter counts for the configured agent");
  params->add_option("--config", config_path, "experiment config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(train)) return cmd_train(config_path, seeds, out_dir, timing);
    if (app.got_subcommand(comp)) return cmd_compare(config_paths, seeds, out_dir, timing);
    if (app.got_subcommand(solve)) return cmd_solve(config_path, out_dir);
    if (app.got_subcommand(params)) return cmd_params(config_path);
  } catch (const fhtlr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
