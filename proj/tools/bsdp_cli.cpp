// Command-line front end: run experiments, sweep chain lengths, dump prior
// diagnostic curves and verify analytic gradients.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsdp/bsdp.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string algo;
  std::string env;
  std::string out_dir;
  long long seed_base = -1;
  int parallel = 0;

  void attach(CLI::App& cmd, bool with_env = true) {
    cmd.add_option("--config", config_path, "experiment config file");
    cmd.add_option("--algo", algo, "algorithm: bsdp|bsp|bs|dqn|random");
    if (with_env)
      cmd.add_option(
          "--env", env,
          "environment: binary_chain|cartpole|mountain_car|acrobot|line1d");
    cmd.add_option("--seed-base", seed_base, "first seed of the sweep");
    cmd.add_option("--out", out_dir, "output directory");
    cmd.add_option("--parallel", parallel, "worker threads for repeats");
  }

  std::vector<bsdp::ConfigEntry> overrides() const {
    std::vector<bsdp::ConfigEntry> o;
    if (!algo.empty()) o.push_back({"experiment", "algorithm", algo, 0});
    if (!env.empty()) o.push_back({"experiment", "environment", env, 0});
    if (seed_base >= 0)
      o.push_back({"experiment", "seed_base", std::to_string(seed_base), 0});
    if (!out_dir.empty()) o.push_back({"experiment", "out_dir", out_dir, 0});
    if (parallel > 0)
      o.push_back({"experiment", "parallel", std::to_string(parallel), 0});
    return o;
  }

  bsdp::ExperimentConfig load() const {
    if (!config_path.empty()) return bsdp::load_config(config_path, overrides());
    auto entries = overrides();
    return bsdp::config_from_entries(entries);
  }
};

int cmd_run(const CommonFlags& flags, bool print_config) {
  bsdp::ExperimentConfig cfg = flags.load();
  if (print_config) {
    std::cout << bsdp::echo_config(cfg);
    return 0;
  }
  const auto results = bsdp::run_experiment(cfg);
  bsdp::write_run_outputs(cfg, results);
  for (const auto& r : results) {
    std::cout << "seed " << r.seed << ": episodes=" << r.rewards.size()
              << " final_reward=" << bsdp::format_double(r.rewards.back());
    if (cfg.environment == "binary_chain")
      std::cout << " episodes_to_solve="
                << (r.episodes_to_solve ? std::to_string(*r.episodes_to_solve)
                                        : std::string("unsolved"));
    std::cout << " (" << bsdp::format_double(r.wall_seconds) << "s)\n";
  }
  std::cout << "wrote " << cfg.out_dir << "/reward.csv, erate.csv, "
            << (cfg.environment == "binary_chain" ? "solve.csv"
                                                  : "aggregate.csv")
            << "\n";
  return 0;
}

int cmd_sweep_chain(const CommonFlags& flags, int n_max) {
  CommonFlags adjusted = flags;
  adjusted.env = "binary_chain";
  bsdp::ExperimentConfig cfg = adjusted.load();
  const auto rows = bsdp::sweep_chain(cfg, n_max);
  const std::filesystem::path path =
      std::filesystem::path(cfg.out_dir) / "chain_sweep.csv";
  bsdp::write_csv(path, bsdp::chain_sweep_table(rows));
  for (const auto& row : rows)
    std::cout << "N=" << row.n << " median_episodes_to_solve="
              << bsdp::format_double(row.median_episodes) << "\n";
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_demo_priors(const CommonFlags& flags, int steps) {
  CommonFlags adjusted = flags;
  adjusted.env = "line1d";
  if (adjusted.algo.empty()) adjusted.algo = "bsdp";
  bsdp::ExperimentConfig cfg = adjusted.load();
  if (steps > 0) cfg.agent.diversity.steps = steps;
  const auto paths = bsdp::dump_prior_curves(cfg);
  for (const auto& p : paths) std::cout << "wrote " << p.string() << "\n";
  return 0;
}

int cmd_gradcheck(int instances) {
  const bsdp::GradCheckReport report =
      bsdp::run_gradient_suite(instances, /*seed=*/12345);
  for (const auto& c : report.cases)
    std::printf("%-22s instances=%d failures=%d worst=%.3g tol=%.1g %s\n",
                c.name.c_str(), c.instances, c.failures, c.worst, c.tolerance,
                c.ok() ? "OK" : "FAIL");
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bootstrapped DQN with diverse priors: experiment toolkit"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  bool print_config = false;
  CLI::App* run = app.add_subcommand("run", "execute one experiment config");
  run_flags.attach(*run);
  run->add_flag("--print-config", print_config,
                "echo the effective configuration and exit");

  CommonFlags sweep_flags;
  int n_max = 8;
  CLI::App* sweep = app.add_subcommand(
      "sweep-chain", "episodes-to-solve over chain lengths 1..N");
  sweep_flags.attach(*sweep, /*with_env=*/false);
  sweep->add_option("--nmax", n_max, "largest chain length");

  CommonFlags demo_flags;
  int demo_steps = 0;
  CLI::App* demo = app.add_subcommand(
      "demo-priors", "dump per-member Q curves for each prior regime");
  demo_flags.attach(*demo, /*with_env=*/false);
  demo->add_option("--steps", demo_steps,
                   "override diversification iteration count");

  int instances = 20;
  CLI::App* grad = app.add_subcommand(
      "gradcheck", "verify analytic gradients against finite differences");
  grad->add_option("--instances", instances, "random instances per case");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags, print_config);
    if (sweep->parsed()) return cmd_sweep_chain(sweep_flags, n_max);
    if (demo->parsed()) return cmd_demo_priors(demo_flags, demo_steps);
    if (grad->parsed()) return cmd_gradcheck(instances);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
