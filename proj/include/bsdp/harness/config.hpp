#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsdp/agents.hpp"
#include "bsdp/harness/csv.hpp"

namespace bsdp {

/// Everything one experiment needs: the environment and algorithm, the sweep
/// bookkeeping, and every agent/replay/diversity/schedule knob. Defaults
/// depend on the environment and are resolved at load time.
struct ExperimentConfig {
  std::string algorithm = "bsdp";
  std::string environment = "cartpole";
  int episodes = 500;
  int repeats = 5;
  std::uint64_t seed_base = 1;
  int chain_n = 10;
  std::string out_dir = "out";
  int parallel = 1;
  int smooth_window = 50;
  std::size_t replay_capacity = 100000;
  AgentConfig agent;
};

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config line " + std::to_string(line) +
                              ": expected a boolean, got '" + v + "'");
}

inline long parse_int(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const long n = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw std::invalid_argument("config line " + std::to_string(line) +
                                ": expected an integer, got '" + v + "'");
  }
}

inline double parse_real(const std::string& v, int line) {
  try {
    return parse_double(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("config line " + std::to_string(line) +
                                ": expected a number, got '" + v + "'");
  }
}

inline std::vector<int> parse_int_list(const std::string& v, int line) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(static_cast<int>(parse_int(trim(item), line)));
  if (out.empty())
    throw std::invalid_argument("config line " + std::to_string(line) +
                                ": expected a list of integers");
  return out;
}

inline std::string format_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace detail

/// Line-oriented `key = value` text grouped by `[section]` headers.
/// `#` starts a comment.
inline std::vector<ConfigEntry> parse_config_entries(const std::string& text) {
  std::vector<ConfigEntry> entries;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    ConfigEntry e;
    e.section = section;
    e.key = detail::trim(line.substr(0, eq));
    e.value = detail::trim(line.substr(eq + 1));
    e.line = lineno;
    if (e.key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key");
    entries.push_back(std::move(e));
  }
  return entries;
}

/// Environment-specific defaults. Chain experiments run longer, use the
/// larger ensemble and learning rate, resample the active member per step and
/// a smaller network; classic control uses the 500-episode setup.
inline ExperimentConfig default_config(const std::string& algorithm,
                                       const std::string& environment) {
  ExperimentConfig cfg;
  cfg.algorithm = algorithm;
  cfg.environment = environment;
  cfg.agent.kind = agent_kind_from_name(algorithm);
  const bool chain = environment == "binary_chain";
  const bool line1d = environment == "line1d";
  cfg.episodes = chain ? 5000 : 500;
  // The 1-D demo space pairs with the chain-style setup (ensemble of 10,
  // one hidden layer); its learning rate only feeds prior diversification.
  cfg.agent.learning_rate = chain || line1d ? 0.05 : 1e-4;
  cfg.agent.prior_learning_rate = cfg.agent.learning_rate;
  cfg.agent.ensemble_size = chain || line1d ? 10 : 5;
  cfg.agent.gamma = chain ? 0.9 : 0.99;
  cfg.agent.hidden_layers = chain || line1d ? std::vector<int>{32}
                                            : std::vector<int>{64, 64};
  cfg.agent.per_step_resampling = chain;
  return cfg;
}

inline void validate_config(const ExperimentConfig& cfg);

/// Applies `entries` over environment-resolved defaults. Unknown sections or
/// keys are errors.
inline ExperimentConfig config_from_entries(
    const std::vector<ConfigEntry>& entries) {
  std::string algorithm = "bsdp";
  std::string environment = "cartpole";
  for (const auto& e : entries) {
    if (e.section == "experiment" && e.key == "algorithm") algorithm = e.value;
    if (e.section == "experiment" && e.key == "environment")
      environment = e.value;
  }
  ExperimentConfig cfg = default_config(algorithm, environment);

  bool lr_set = false;
  bool prior_lr_set = false;
  using detail::parse_bool;
  using detail::parse_int;
  using detail::parse_int_list;
  using detail::parse_real;
  for (const auto& e : entries) {
    const std::string& k = e.key;
    const std::string& v = e.value;
    const int ln = e.line;
    if (e.section == "experiment") {
      if (k == "algorithm") continue;
      else if (k == "environment") continue;
      else if (k == "episodes") cfg.episodes = static_cast<int>(parse_int(v, ln));
      else if (k == "repeats") cfg.repeats = static_cast<int>(parse_int(v, ln));
      else if (k == "seed_base")
        cfg.seed_base = static_cast<std::uint64_t>(parse_int(v, ln));
      else if (k == "chain_n") cfg.chain_n = static_cast<int>(parse_int(v, ln));
      else if (k == "out_dir") cfg.out_dir = v;
      else if (k == "parallel") cfg.parallel = static_cast<int>(parse_int(v, ln));
      else if (k == "smooth_window")
        cfg.smooth_window = static_cast<int>(parse_int(v, ln));
      else goto unknown;
    } else if (e.section == "agent") {
      if (k == "learning_rate") {
        cfg.agent.learning_rate = parse_real(v, ln);
        lr_set = true;
      } else if (k == "ensemble_size")
        cfg.agent.ensemble_size = static_cast<int>(parse_int(v, ln));
      else if (k == "gamma") cfg.agent.gamma = parse_real(v, ln);
      else if (k == "per_step_resampling")
        cfg.agent.per_step_resampling = parse_bool(v, ln);
      else if (k == "target_sync")
        cfg.agent.target_sync = static_cast<int>(parse_int(v, ln));
      else if (k == "warmup")
        cfg.agent.warmup = static_cast<int>(parse_int(v, ln));
      else if (k == "hidden") cfg.agent.hidden_layers = parse_int_list(v, ln);
      else if (k == "optimizer")
        cfg.agent.optimizer = optimizer_kind_from_name(v);
      else goto unknown;
    } else if (e.section == "replay") {
      if (k == "capacity")
        cfg.replay_capacity = static_cast<std::size_t>(parse_int(v, ln));
      else if (k == "batch_size")
        cfg.agent.batch_size = static_cast<int>(parse_int(v, ln));
      else if (k == "mask_probability")
        cfg.agent.mask_probability = parse_real(v, ln);
      else goto unknown;
    } else if (e.section == "diversity") {
      if (k == "epsilon") cfg.agent.diversity.epsilon = parse_real(v, ln);
      else if (k == "alpha1") cfg.agent.diversity.alpha1 = parse_real(v, ln);
      else if (k == "alpha2") cfg.agent.diversity.alpha2 = parse_real(v, ln);
      else if (k == "steps")
        cfg.agent.diversity.steps = static_cast<int>(parse_int(v, ln));
      else if (k == "fdm_step") cfg.agent.diversity.fdm_step = parse_real(v, ln);
      else if (k == "batch_size")
        cfg.agent.diversity.batch_size = static_cast<int>(parse_int(v, ln));
      else if (k == "prior_learning_rate") {
        cfg.agent.prior_learning_rate = parse_real(v, ln);
        prior_lr_set = true;
      } else goto unknown;
    } else if (e.section == "schedule") {
      if (k == "beta1") cfg.agent.beta1 = parse_real(v, ln);
      else if (k == "beta2") cfg.agent.beta2 = parse_real(v, ln);
      else if (k == "lambda") cfg.agent.lambda = parse_real(v, ln);
      else goto unknown;
    } else {
      throw std::invalid_argument("config line " + std::to_string(e.line) +
                                  ": unknown section [" + e.section + "]");
    }
    continue;
  unknown:
    throw std::invalid_argument("config line " + std::to_string(e.line) +
                                ": unknown key '" + e.key + "' in section [" +
                                e.section + "]");
  }
  if (lr_set && !prior_lr_set)
    cfg.agent.prior_learning_rate = cfg.agent.learning_rate;
  validate_config(cfg);
  return cfg;
}

inline void validate_config(const ExperimentConfig& cfg) {
  agent_kind_from_name(cfg.algorithm);  // throws on unknown names
  static const char* kEnvs[] = {"binary_chain", "cartpole", "mountain_car",
                                "acrobot", "line1d"};
  bool known = false;
  for (const char* e : kEnvs) known = known || cfg.environment == e;
  if (!known)
    throw std::invalid_argument("unknown environment: " + cfg.environment);
  if (cfg.episodes < 1) throw std::invalid_argument("episodes < 1");
  if (cfg.repeats < 1) throw std::invalid_argument("repeats < 1");
  if (cfg.chain_n < 1) throw std::invalid_argument("chain_n < 1");
  if (cfg.parallel < 1) throw std::invalid_argument("parallel < 1");
  if (cfg.smooth_window < 1) throw std::invalid_argument("smooth_window < 1");
  if (cfg.agent.learning_rate < 0) throw std::invalid_argument("learning_rate < 0");
  if (cfg.agent.ensemble_size < 1) throw std::invalid_argument("ensemble_size < 1");
  if (cfg.agent.gamma <= 0.0 || cfg.agent.gamma > 1.0)
    throw std::invalid_argument("gamma outside (0, 1]");
  if (cfg.agent.mask_probability < 0.0 || cfg.agent.mask_probability > 1.0)
    throw std::invalid_argument("mask_probability outside [0, 1]");
  cfg.agent.diversity.validate();
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  return config_from_entries(parse_config_entries(text));
}

inline ExperimentConfig load_config(const std::string& path,
                                    const std::vector<ConfigEntry>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto entries = parse_config_entries(buf.str());
  entries.insert(entries.end(), overrides.begin(), overrides.end());
  return config_from_entries(entries);
}

/// Effective configuration in the same format the parser reads.
inline std::string echo_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "algorithm = " << cfg.algorithm << "\n";
  out << "environment = " << cfg.environment << "\n";
  out << "episodes = " << cfg.episodes << "\n";
  out << "repeats = " << cfg.repeats << "\n";
  out << "seed_base = " << cfg.seed_base << "\n";
  out << "chain_n = " << cfg.chain_n << "\n";
  out << "out_dir = " << cfg.out_dir << "\n";
  out << "parallel = " << cfg.parallel << "\n";
  out << "smooth_window = " << cfg.smooth_window << "\n";
  out << "[agent]\n";
  out << "learning_rate = " << format_double(cfg.agent.learning_rate) << "\n";
  out << "ensemble_size = " << cfg.agent.ensemble_size << "\n";
  out << "gamma = " << format_double(cfg.agent.gamma) << "\n";
  out << "per_step_resampling = "
      << (cfg.agent.per_step_resampling ? "true" : "false") << "\n";
  out << "target_sync = " << cfg.agent.target_sync << "\n";
  out << "warmup = " << cfg.agent.warmup << "\n";
  out << "hidden = " << detail::format_int_list(cfg.agent.hidden_layers) << "\n";
  out << "optimizer = "
      << (cfg.agent.optimizer == OptimizerKind::Adam ? "adam" : "sgd") << "\n";
  out << "[replay]\n";
  out << "capacity = " << cfg.replay_capacity << "\n";
  out << "batch_size = " << cfg.agent.batch_size << "\n";
  out << "mask_probability = " << format_double(cfg.agent.mask_probability)
      << "\n";
  out << "[diversity]\n";
  out << "epsilon = " << format_double(cfg.agent.diversity.epsilon) << "\n";
  out << "alpha1 = " << format_double(cfg.agent.diversity.alpha1) << "\n";
  out << "alpha2 = " << format_double(cfg.agent.diversity.alpha2) << "\n";
  out << "steps = " << cfg.agent.diversity.steps << "\n";
  out << "fdm_step = " << format_double(cfg.agent.diversity.fdm_step) << "\n";
  out << "batch_size = " << cfg.agent.diversity.batch_size << "\n";
  out << "prior_learning_rate = " << format_double(cfg.agent.prior_learning_rate)
      << "\n";
  out << "[schedule]\n";
  out << "beta1 = " << format_double(cfg.agent.beta1) << "\n";
  out << "beta2 = " << format_double(cfg.agent.beta2) << "\n";
  out << "lambda = " << format_double(cfg.agent.lambda) << "\n";
  return out.str();
}

}  // namespace bsdp
