#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "bsdp/envs/env.hpp"

namespace bsdp {

/// Two-link pendulum with torque on the middle joint, integrated by one RK4
/// step of 0.2 s per action. Actions apply torque -1 (0), 0 (1) or +1 (2).
/// Every step pays reward -1 until the free end swings above link height 1,
/// which ends the episode with reward 0. Observations are
/// (cos t1, sin t1, cos t2, sin t2, dt1, dt2). Truncates after 500 steps.
class AcrobotEnv final : public Environment {
 public:
  static constexpr double kDt = 0.2;
  static constexpr double kLink1Length = 1.0;
  static constexpr double kLinkMass = 1.0;       // both links
  static constexpr double kLinkComPos = 0.5;     // both links
  static constexpr double kLinkInertia = 1.0;    // both links
  static constexpr double kGravity = 9.8;
  static constexpr double kMaxVel1 = 4.0 * std::numbers::pi;
  static constexpr double kMaxVel2 = 9.0 * std::numbers::pi;

  AcrobotEnv() {
    spec_.name = "acrobot";
    spec_.state_dim = 6;
    spec_.action_count = 3;
    spec_.sampling_box = {{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0},
                          {-1.0, 1.0}, {-kMaxVel1, kMaxVel1},
                          {-kMaxVel2, kMaxVel2}};
    spec_.max_episode_steps = 500;
  }

  const EnvSpec& spec() const override { return spec_; }

  Vec reset(Rng& rng) override {
    std::uniform_real_distribution<double> dist(-0.1, 0.1);
    for (double& v : state_) v = dist(rng);
    elapsed_ = 0;
    active_ = true;
    return observation();
  }

  /// Internal coordinates (theta1, theta2, dtheta1, dtheta2).
  void set_internal_state(const std::array<double, 4>& s) {
    state_ = s;
    elapsed_ = 0;
    active_ = true;
  }
  const std::array<double, 4>& internal_state() const { return state_; }

  StepResult step(int action) override {
    check_active();
    check_action(action);
    const double torque = static_cast<double>(action - 1);

    std::array<double, 5> y{state_[0], state_[1], state_[2], state_[3], torque};
    const auto k1 = dsdt(y);
    const auto k2 = dsdt(advance(y, k1, kDt / 2.0));
    const auto k3 = dsdt(advance(y, k2, kDt / 2.0));
    const auto k4 = dsdt(advance(y, k3, kDt));
    for (int i = 0; i < 4; ++i)
      y[i] += kDt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    state_[0] = wrap(y[0]);
    state_[1] = wrap(y[1]);
    state_[2] = std::clamp(y[2], -kMaxVel1, kMaxVel1);
    state_[3] = std::clamp(y[3], -kMaxVel2, kMaxVel2);
    ++elapsed_;

    StepResult r;
    r.terminal = -std::cos(state_[0]) - std::cos(state_[1] + state_[0]) > 1.0;
    r.reward = r.terminal ? 0.0 : -1.0;
    r.truncated = !r.terminal && elapsed_ >= spec_.max_episode_steps;
    r.next_state = observation();
    if (r.terminal || r.truncated) active_ = false;
    return r;
  }

 private:
  Vec observation() const {
    return {std::cos(state_[0]), std::sin(state_[0]), std::cos(state_[1]),
            std::sin(state_[1]), state_[2], state_[3]};
  }

  static std::array<double, 5> advance(const std::array<double, 5>& y,
                                       const std::array<double, 5>& k,
                                       double dt) {
    std::array<double, 5> out;
    for (int i = 0; i < 5; ++i) out[i] = y[i] + dt * k[i];
    return out;
  }

  static std::array<double, 5> dsdt(const std::array<double, 5>& y) {
    constexpr double m = kLinkMass, l1 = kLink1Length, lc = kLinkComPos;
    constexpr double moi = kLinkInertia, g = kGravity;
    constexpr double half_pi = std::numbers::pi / 2.0;
    const double theta1 = y[0], theta2 = y[1];
    const double dtheta1 = y[2], dtheta2 = y[3];
    const double torque = y[4];

    const double d1 = m * lc * lc +
                      m * (l1 * l1 + lc * lc + 2.0 * l1 * lc * std::cos(theta2)) +
                      2.0 * moi;
    const double d2 = m * (lc * lc + l1 * lc * std::cos(theta2)) + moi;
    const double phi2 = m * lc * g * std::cos(theta1 + theta2 - half_pi);
    const double phi1 =
        -m * l1 * lc * dtheta2 * dtheta2 * std::sin(theta2) -
        2.0 * m * l1 * lc * dtheta2 * dtheta1 * std::sin(theta2) +
        (m * lc + m * l1) * g * std::cos(theta1 - half_pi) + phi2;
    const double ddtheta2 =
        (torque + d2 / d1 * phi1 -
         m * l1 * lc * dtheta1 * dtheta1 * std::sin(theta2) - phi2) /
        (m * lc * lc + moi - d2 * d2 / d1);
    const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
    return {dtheta1, dtheta2, ddtheta1, ddtheta2, 0.0};
  }

  static double wrap(double angle) {
    constexpr double pi = std::numbers::pi;
    while (angle > pi) angle -= 2.0 * pi;
    while (angle < -pi) angle += 2.0 * pi;
    return angle;
  }

  std::array<double, 4> state_{};
  EnvSpec spec_;
};

}  // namespace bsdp
