#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bsdp/ops.hpp"
#include "bsdp/rng.hpp"

namespace bsdp {

struct EnvSpec {
  std::string name;
  int state_dim = 0;
  int action_count = 0;
  // Per-dimension (low, high) bounds used when sampling states for prior
  // diversification. Unbounded physical quantities are clipped to ranges that
  // cover the values reachable in practice.
  std::vector<std::pair<double, double>> sampling_box;
  int max_episode_steps = 0;
};

struct StepResult {
  Vec next_state;
  double reward = 0.0;
  bool terminal = false;   // MDP termination; drops the bootstrap target
  bool truncated = false;  // step-limit cutoff; episode ends, target survives
};

/// Discrete-action episodic MDP. reset() must be called before the first
/// step() and after every finished episode.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual Vec reset(Rng& rng) = 0;
  virtual StepResult step(int action) = 0;

 protected:
  void check_action(int action) const {
    if (action < 0 || action >= spec().action_count)
      throw std::invalid_argument("Environment::step: invalid action index");
  }
  void check_active() const {
    if (!active_)
      throw std::logic_error(
          "Environment::step: episode is over; call reset first");
  }
  bool active_ = false;
  int elapsed_ = 0;
};

}  // namespace bsdp
