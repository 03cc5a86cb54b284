#pragma once

#include "bsdp/envs/env.hpp"

namespace bsdp {

/// One-dimensional state box [-5, 5] with two actions and no dynamics; it
/// exists to give prior diversification and its diagnostics a minimal state
/// space. Every step ends the episode with reward 0.
class Line1dEnv final : public Environment {
 public:
  Line1dEnv() {
    spec_.name = "line1d";
    spec_.state_dim = 1;
    spec_.action_count = 2;
    spec_.sampling_box = {{-5.0, 5.0}};
    spec_.max_episode_steps = 1;
  }

  const EnvSpec& spec() const override { return spec_; }

  Vec reset(Rng& rng) override {
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    state_ = dist(rng);
    active_ = true;
    return {state_};
  }

  StepResult step(int action) override {
    check_active();
    check_action(action);
    active_ = false;
    return {{state_}, 0.0, true, false};
  }

 private:
  double state_ = 0.0;
  EnvSpec spec_;
};

}  // namespace bsdp
