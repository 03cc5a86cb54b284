#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bsdp/envs/env.hpp"

namespace bsdp {

/// Chain of N binary decisions against a hidden ground-truth action sequence,
/// drawn once at construction and fixed for the whole run. A correct action
/// advances the position; any wrong action ends the episode with reward 0;
/// matching the entire sequence pays the single reward of 1 at position N.
/// Observations are a one-hot encoding of the position (length N + 1).
class BinaryChainEnv final : public Environment {
 public:
  BinaryChainEnv(int n, Rng& rng) : BinaryChainEnv(draw_truth(n, rng)) {}

  explicit BinaryChainEnv(std::vector<std::uint8_t> ground_truth)
      : truth_(std::move(ground_truth)) {
    const int n = static_cast<int>(truth_.size());
    if (n < 1) throw std::invalid_argument("BinaryChainEnv: N < 1");
    spec_.name = "binary_chain";
    spec_.state_dim = n + 1;
    spec_.action_count = 2;
    spec_.sampling_box.assign(n + 1, {0.0, 1.0});
    spec_.max_episode_steps = n;  // episodes end naturally within N steps
  }

  const EnvSpec& spec() const override { return spec_; }
  const std::vector<std::uint8_t>& ground_truth() const { return truth_; }
  int position() const { return position_; }

  Vec reset(Rng&) override {
    position_ = 0;
    active_ = true;
    return observation();
  }

  StepResult step(int action) override {
    check_active();
    check_action(action);
    const int n = static_cast<int>(truth_.size());
    StepResult r;
    if (action == truth_[position_]) {
      ++position_;
      if (position_ == n) {
        r.reward = 1.0;
        r.terminal = true;
      }
    } else {
      r.terminal = true;
    }
    r.next_state = observation();
    if (r.terminal) active_ = false;
    return r;
  }

  Vec observation() const {
    Vec obs(truth_.size() + 1, 0.0);
    obs[position_] = 1.0;
    return obs;
  }

 private:
  static std::vector<std::uint8_t> draw_truth(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("BinaryChainEnv: N < 1");
    std::vector<std::uint8_t> truth(n);
    std::uniform_int_distribution<int> bit(0, 1);
    for (auto& b : truth) b = static_cast<std::uint8_t>(bit(rng));
    return truth;
  }

  std::vector<std::uint8_t> truth_;
  EnvSpec spec_;
  int position_ = 0;
};

}  // namespace bsdp
