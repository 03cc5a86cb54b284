#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "bsdp/envs/env.hpp"

namespace bsdp {

/// Pole balancing on a frictionless cart, Euler-integrated at 0.02 s steps.
/// Actions push the cart left (0) or right (1); every step pays reward 1.
/// The episode terminates when the cart leaves +-2.4 or the pole tilts past
/// 12 degrees, and truncates after 500 steps.
class CartPoleEnv final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kMassCart = 1.0;
  static constexpr double kMassPole = 0.1;
  static constexpr double kTotalMass = kMassCart + kMassPole;
  static constexpr double kLength = 0.5;  // half the pole length
  static constexpr double kPoleMassLength = kMassPole * kLength;
  static constexpr double kForceMag = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kThetaThreshold = 12.0 * 2.0 * std::numbers::pi / 360.0;
  static constexpr double kXThreshold = 2.4;

  CartPoleEnv() {
    spec_.name = "cartpole";
    spec_.state_dim = 4;
    spec_.action_count = 2;
    spec_.sampling_box = {{-2.4, 2.4}, {-3.0, 3.0}, {-0.21, 0.21}, {-3.0, 3.0}};
    spec_.max_episode_steps = 500;
  }

  const EnvSpec& spec() const override { return spec_; }

  Vec reset(Rng& rng) override {
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    for (double& v : state_) v = dist(rng);
    elapsed_ = 0;
    active_ = true;
    return observation();
  }

  void set_state(const Vec& s) {
    if (s.size() != 4) throw std::invalid_argument("CartPoleEnv: bad state");
    for (int i = 0; i < 4; ++i) state_[i] = s[i];
    elapsed_ = 0;
    active_ = true;
  }

  StepResult step(int action) override {
    check_active();
    check_action(action);
    double x = state_[0], x_dot = state_[1];
    double theta = state_[2], theta_dot = state_[3];

    const double force = action == 1 ? kForceMag : -kForceMag;
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    const double temp =
        (force + kPoleMassLength * theta_dot * theta_dot * sin_t) / kTotalMass;
    const double theta_acc =
        (kGravity * sin_t - cos_t * temp) /
        (kLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / kTotalMass));
    const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;

    x += kTau * x_dot;
    x_dot += kTau * x_acc;
    theta += kTau * theta_dot;
    theta_dot += kTau * theta_acc;
    state_ = {x, x_dot, theta, theta_dot};
    ++elapsed_;

    StepResult r;
    r.reward = 1.0;
    r.terminal = x < -kXThreshold || x > kXThreshold ||
                 theta < -kThetaThreshold || theta > kThetaThreshold;
    r.truncated = !r.terminal && elapsed_ >= spec_.max_episode_steps;
    r.next_state = observation();
    if (r.terminal || r.truncated) active_ = false;
    return r;
  }

 private:
  Vec observation() const { return {state_[0], state_[1], state_[2], state_[3]}; }

  std::array<double, 4> state_{};
  EnvSpec spec_;
};

}  // namespace bsdp
