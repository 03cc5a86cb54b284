#pragma once

#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bsdp/agents.hpp"
#include "bsdp/envs.hpp"
#include "bsdp/harness/config.hpp"
#include "bsdp/harness/csv.hpp"
#include "bsdp/harness/metrics.hpp"

namespace bsdp {

struct RunResult {
  std::vector<double> rewards;  // one entry per episode actually run
  std::vector<double> erates;
  std::optional<int> episodes_to_solve;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

/// One fully isolated run: fresh environment, agent (including prior
/// diversification for the diverse-prior variant) and buffer, all seeded from
/// `seed`. Chain runs stop at the solving episode.
inline RunResult run_single(const ExperimentConfig& cfg, std::uint64_t seed,
                            TrainObserver* observer = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  Rng env_rng = make_rng(seed, stream::kEnvironment);
  Rng run_rng = make_rng(seed, stream::kRun);
  auto env = make_env(cfg.environment, cfg.chain_n, env_rng);
  Agent agent = Agent::make(cfg.agent, env->spec(), seed);
  const int buffer_members =
      agent.kind() == AgentKind::RandomPolicy ? 1 : agent.ensemble_size();
  ReplayBuffer buffer(cfg.replay_capacity, buffer_members);

  RunResult result;
  result.seed = seed;
  const bool stop_on_solve = cfg.environment == "binary_chain";
  for (int episode = 0; episode < cfg.episodes; ++episode) {
    EpisodeRecord rec = agent.train_episode(*env, buffer, run_rng, observer);
    result.rewards.push_back(rec.total_reward);
    result.erates.push_back(exploration_rate(rec.exploration_flags));
    if (stop_on_solve && rec.total_reward > 0.0) break;
  }
  result.episodes_to_solve = episodes_to_solve(result.rewards, cfg.episodes);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

/// `repeats` independent runs with seeds seed_base, seed_base+1, ...,
/// executed by up to cfg.parallel worker threads.
inline std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<RunResult> results(cfg.repeats);
  const int workers = std::min(cfg.parallel, cfg.repeats);
  if (workers <= 1) {
    for (int i = 0; i < cfg.repeats; ++i)
      results[i] = run_single(cfg, cfg.seed_base + i);
    return results;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= cfg.repeats) return;
      try {
        results[i] = run_single(cfg, cfg.seed_base + i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

// --- Output files ------------------------------------------------------------

/// reward.csv / erate.csv: one row per episode, one column per seed. Runs that
/// stopped early leave their trailing cells empty.
inline Csv per_seed_curve_table(const std::vector<RunResult>& runs,
                                bool erate) {
  Csv table;
  table.header.push_back("episode");
  std::size_t max_len = 0;
  for (const auto& r : runs) {
    table.header.push_back("seed_" + std::to_string(r.seed));
    max_len = std::max(max_len, r.rewards.size());
  }
  for (std::size_t i = 0; i < max_len; ++i) {
    std::vector<std::string> row;
    row.push_back(std::to_string(i + 1));
    for (const auto& r : runs) {
      const auto& curve = erate ? r.erates : r.rewards;
      row.push_back(i < curve.size() ? format_double(curve[i]) : "");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline Csv aggregate_table(const std::vector<RunResult>& runs, int window) {
  std::vector<std::vector<double>> smoothed;
  smoothed.reserve(runs.size());
  for (const auto& r : runs) smoothed.push_back(moving_average(r.rewards, window));
  const AggregateCurve agg = aggregate_curves(smoothed);
  Csv table;
  table.header = {"episode", "mean", "lo", "hi"};
  for (std::size_t i = 0; i < agg.mean.size(); ++i)
    table.rows.push_back({std::to_string(i + 1), format_double(agg.mean[i]),
                          format_double(agg.lo[i]), format_double(agg.hi[i])});
  return table;
}

/// solve.csv: unsolved runs record the episode cap and set the unsolved flag.
inline Csv solve_table(const std::vector<RunResult>& runs, int cap) {
  Csv table;
  table.header = {"seed", "episodes_to_solve", "unsolved"};
  for (const auto& r : runs) {
    const bool solved = r.episodes_to_solve.has_value();
    table.rows.push_back({std::to_string(r.seed),
                          std::to_string(solved ? *r.episodes_to_solve : cap),
                          solved ? "0" : "1"});
  }
  return table;
}

/// Writes reward.csv and erate.csv, plus aggregate.csv (classic control,
/// smoothed mean with a +-0.3 std band) or solve.csv (chains, where runs stop
/// early and curve lengths differ).
inline void write_run_outputs(const ExperimentConfig& cfg,
                              const std::vector<RunResult>& runs) {
  const std::filesystem::path dir(cfg.out_dir);
  write_csv(dir / "reward.csv", per_seed_curve_table(runs, false));
  write_csv(dir / "erate.csv", per_seed_curve_table(runs, true));
  if (cfg.environment == "binary_chain") {
    write_csv(dir / "solve.csv", solve_table(runs, cfg.episodes));
  } else {
    write_csv(dir / "aggregate.csv", aggregate_table(runs, cfg.smooth_window));
  }
}

// --- Chain sweep -------------------------------------------------------------

inline double median_episodes_to_solve(const std::vector<RunResult>& runs,
                                       int cap) {
  Vec values;
  values.reserve(runs.size());
  for (const auto& r : runs)
    values.push_back(r.episodes_to_solve ? *r.episodes_to_solve : cap);
  return median(values);
}

struct ChainSweepRow {
  int n = 0;
  double median_episodes = 0.0;
};

/// Runs the configured algorithm on chains of length 1..n_max and reports the
/// per-length median episode count needed to find the reward.
inline std::vector<ChainSweepRow> sweep_chain(ExperimentConfig cfg, int n_max) {
  cfg.environment = "binary_chain";
  std::vector<ChainSweepRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.chain_n = n;
    const auto runs = run_experiment(run_cfg);
    rows.push_back({n, median_episodes_to_solve(runs, cfg.episodes)});
  }
  return rows;
}

inline Csv chain_sweep_table(const std::vector<ChainSweepRow>& rows) {
  Csv table;
  table.header = {"n", "median_episodes_to_solve"};
  for (const auto& r : rows)
    table.rows.push_back({std::to_string(r.n), format_double(r.median_episodes)});
  return table;
}

// --- Prior curve demo ---------------------------------------------------------

enum class PriorRegime { HeRandom, KlOnly, KlBd, All };

inline const char* prior_regime_name(PriorRegime regime) {
  switch (regime) {
    case PriorRegime::HeRandom: return "he_random";
    case PriorRegime::KlOnly: return "kl";
    case PriorRegime::KlBd: return "kl_bd";
    case PriorRegime::All: return "all";
  }
  return "?";
}

/// Fresh diverse-prior ensemble on the given environment's sampling box with
/// the loss weights of one regime. All regimes share the seed, so they start
/// from identical networks.
inline Ensemble build_prior_ensemble(const ExperimentConfig& cfg,
                                     const EnvSpec& env_spec,
                                     PriorRegime regime, std::uint64_t seed) {
  AgentConfig agent_cfg = cfg.agent;
  agent_cfg.kind = AgentKind::Bsp;  // He priors, no diversification yet
  if (regime != PriorRegime::HeRandom) {
    agent_cfg.kind = AgentKind::Bsdp;
    agent_cfg.diversity.alpha1 =
        regime == PriorRegime::All ? cfg.agent.diversity.alpha1 : 0.0;
    agent_cfg.diversity.alpha2 =
        regime == PriorRegime::KlOnly ? 0.0 : cfg.agent.diversity.alpha2;
  }
  Agent agent = Agent::make(agent_cfg, env_spec, seed);
  return std::move(agent.members());
}

inline std::vector<double> uniform_grid(double lo, double hi, int points) {
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return grid;
}

/// Q(s, action 0) for each member on a uniform state grid.
inline Csv prior_curve_table(const Ensemble& ensemble,
                             const std::vector<double>& grid) {
  Csv table;
  table.header.push_back("state");
  for (std::size_t k = 0; k < ensemble.size(); ++k)
    table.header.push_back("member_" + std::to_string(k));
  for (double s : grid) {
    std::vector<std::string> row;
    row.push_back(format_double(s));
    for (const auto& member : ensemble)
      row.push_back(format_double(member.q({s})[0]));
    table.rows.push_back(std::move(row));
  }
  return table;
}

/// Writes one 101-point curve file per prior regime for the one-dimensional
/// demo space. Returns the written paths.
inline std::vector<std::filesystem::path> dump_prior_curves(
    const ExperimentConfig& cfg) {
  Rng env_rng = make_rng(cfg.seed_base, stream::kEnvironment);
  auto env = make_env("line1d", 1, env_rng);
  const auto grid = uniform_grid(-5.0, 5.0, 101);
  std::vector<std::filesystem::path> paths;
  for (PriorRegime regime : {PriorRegime::HeRandom, PriorRegime::KlOnly,
                             PriorRegime::KlBd, PriorRegime::All}) {
    const Ensemble ensemble =
        build_prior_ensemble(cfg, env->spec(), regime, cfg.seed_base);
    const std::filesystem::path path =
        std::filesystem::path(cfg.out_dir) /
        (std::string("priors_") + prior_regime_name(regime) + ".csv");
    write_csv(path, prior_curve_table(ensemble, grid));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace bsdp
