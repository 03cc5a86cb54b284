#pragma once

#include <algorithm>
#include <cmath>

#include "bsdp/envs/env.hpp"

namespace bsdp {

/// Underpowered car in a sinusoidal valley. Actions accelerate left (0),
/// coast (1) or accelerate right (2); every step pays reward -1 until the car
/// reaches position 0.5 on the right hill. Truncates after 200 steps.
class MountainCarEnv final : public Environment {
 public:
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.5;
  static constexpr double kForce = 0.001;
  static constexpr double kGravity = 0.0025;

  MountainCarEnv() {
    spec_.name = "mountain_car";
    spec_.state_dim = 2;
    spec_.action_count = 3;
    spec_.sampling_box = {{kMinPosition, kMaxPosition}, {-kMaxSpeed, kMaxSpeed}};
    spec_.max_episode_steps = 200;
  }

  const EnvSpec& spec() const override { return spec_; }

  Vec reset(Rng& rng) override {
    std::uniform_real_distribution<double> dist(-0.6, -0.4);
    position_ = dist(rng);
    velocity_ = 0.0;
    elapsed_ = 0;
    active_ = true;
    return {position_, velocity_};
  }

  void set_state(double position, double velocity) {
    position_ = position;
    velocity_ = velocity;
    elapsed_ = 0;
    active_ = true;
  }

  StepResult step(int action) override {
    check_active();
    check_action(action);
    velocity_ += (action - 1) * kForce - kGravity * std::cos(3.0 * position_);
    velocity_ = std::clamp(velocity_, -kMaxSpeed, kMaxSpeed);
    position_ += velocity_;
    position_ = std::clamp(position_, kMinPosition, kMaxPosition);
    if (position_ == kMinPosition && velocity_ < 0.0) velocity_ = 0.0;
    ++elapsed_;

    StepResult r;
    r.reward = -1.0;
    r.terminal = position_ >= kGoalPosition;
    r.truncated = !r.terminal && elapsed_ >= spec_.max_episode_steps;
    r.next_state = {position_, velocity_};
    if (r.terminal || r.truncated) active_ = false;
    return r;
  }

 private:
  double position_ = 0.0;
  double velocity_ = 0.0;
  EnvSpec spec_;
};

}  // namespace bsdp
