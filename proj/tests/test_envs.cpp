#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "bsdp/envs.hpp"

using namespace bsdp;

namespace {

// Second, independent transcription of the cart-pole update rule, kept
// deliberately separate from the library implementation.
struct CartPoleOracle {
  double x = 0, x_dot = 0, theta = 0, theta_dot = 0;

  void step(int action) {
    const double g = 9.8, mc = 1.0, mp = 0.1, total = mc + mp;
    const double len = 0.5, pml = mp * len, fmag = 10.0, tau = 0.02;
    const double force = action == 1 ? fmag : -fmag;
    const double ct = std::cos(theta), st = std::sin(theta);
    const double tmp = (force + pml * theta_dot * theta_dot * st) / total;
    const double tacc = (g * st - ct * tmp) / (len * (4.0 / 3.0 - mp * ct * ct / total));
    const double xacc = tmp - pml * tacc * ct / total;
    x = x + tau * x_dot;
    x_dot = x_dot + tau * xacc;
    theta = theta + tau * theta_dot;
    theta_dot = theta_dot + tau * tacc;
  }
};

}  // namespace

TEST_CASE("binary chain replays its ground truth for exactly one reward") {
  BinaryChainEnv env({0, 1, 0});
  Rng rng = make_rng(71);
  Vec obs = env.reset(rng);
  CHECK(obs == Vec{1, 0, 0, 0});

  StepResult r = env.step(0);
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.terminal);
  CHECK(r.next_state == Vec{0, 1, 0, 0});

  r = env.step(1);
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.terminal);

  r = env.step(0);
  CHECK(r.reward == 1.0);
  CHECK(r.terminal);
  CHECK(r.next_state == Vec{0, 0, 0, 1});
}

TEST_CASE("binary chain terminates with zero reward on the first mistake") {
  BinaryChainEnv env({0, 1, 0});
  Rng rng = make_rng(72);
  env.reset(rng);
  const StepResult r = env.step(1);
  CHECK(r.reward == 0.0);
  CHECK(r.terminal);
}

TEST_CASE("length-one chain pays out immediately") {
  BinaryChainEnv env({1});
  Rng rng = make_rng(73);
  env.reset(rng);
  const StepResult r = env.step(1);
  CHECK(r.reward == 1.0);
  CHECK(r.terminal);
}

TEST_CASE("stepping a finished chain episode is a protocol error") {
  BinaryChainEnv env({1});
  Rng rng = make_rng(74);
  env.reset(rng);
  env.step(1);
  CHECK_THROWS_AS(env.step(0), std::logic_error);
}

TEST_CASE("chain rewards: only the exact truth sequence pays") {
  Rng rng = make_rng(75);
  for (int n : {2, 4, 6}) {
    Rng truth_rng = make_rng(100 + n);
    BinaryChainEnv env(n, truth_rng);
    const auto& truth = env.ground_truth();
    // Enumerate all 2^n action sequences; exactly one earns total reward 1.
    int winners = 0;
    for (int bits = 0; bits < (1 << n); ++bits) {
      env.reset(rng);
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        const StepResult r = env.step((bits >> i) & 1);
        total += r.reward;
        if (r.terminal) break;
      }
      if (total > 0.0) {
        ++winners;
        for (int i = 0; i < n; ++i) CHECK(((bits >> i) & 1) == truth[i]);
      }
    }
    CHECK(winners == 1);
  }
}

TEST_CASE("chain observations one-hot the position along the truth path") {
  Rng truth_rng = make_rng(76);
  BinaryChainEnv env(5, truth_rng);
  Rng rng = make_rng(77);
  Vec obs = env.reset(rng);
  for (int i = 0; i < 5; ++i) {
    REQUIRE(obs[i] == 1.0);
    obs = env.step(env.ground_truth()[i]).next_state;
  }
  CHECK(obs[5] == 1.0);
}

TEST_CASE("cartpole matches an independent transcription step for step") {
  CartPoleEnv env;
  env.set_state({0.0, 0.0, 0.0, 0.0});
  CartPoleOracle oracle;
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    const int action = i % 2;
    const StepResult r = env.step(action);
    oracle.step(action);
    CHECK(r.next_state[0] == Catch::Approx(oracle.x).margin(1e-10));
    CHECK(r.next_state[1] == Catch::Approx(oracle.x_dot).margin(1e-10));
    CHECK(r.next_state[2] == Catch::Approx(oracle.theta).margin(1e-10));
    CHECK(r.next_state[3] == Catch::Approx(oracle.theta_dot).margin(1e-10));
    ++compared;
    if (r.terminal) break;
  }
  CHECK(compared >= 30);
}

TEST_CASE("cartpole pays one per step and terminates on the angle bound") {
  CartPoleEnv env;
  env.set_state({0.0, 0.0, 0.0, 0.0});
  bool terminated = false;
  int steps = 0;
  while (!terminated && steps < 500) {
    const StepResult r = env.step(0);  // constant push tips the pole over
    CHECK(r.reward == 1.0);
    terminated = r.terminal;
    ++steps;
  }
  CHECK(terminated);
  CHECK(steps < 500);
}

TEST_CASE("cartpole resets inside (-0.05, 0.05)") {
  CartPoleEnv env;
  Rng rng = make_rng(78);
  for (int i = 0; i < 10000; ++i) {
    const Vec s = env.reset(rng);
    for (double v : s) {
      CHECK(v > -0.05);
      CHECK(v < 0.05);
    }
  }
  Rng a = make_rng(79), b = make_rng(79);
  CHECK(env.reset(a) == env.reset(b));
}

TEST_CASE("mountain car: coasting from rest changes velocity by gravity only") {
  MountainCarEnv env;
  const double p0 = -0.5;
  env.set_state(p0, 0.0);
  const StepResult r = env.step(1);
  const double expected_v = -0.0025 * std::cos(3.0 * p0);
  CHECK(r.next_state[1] == Catch::Approx(expected_v).margin(1e-15));
  CHECK(r.next_state[0] == Catch::Approx(p0 + expected_v).margin(1e-15));
  CHECK(r.reward == -1.0);
}

TEST_CASE("mountain car reaches the goal at position 0.5") {
  MountainCarEnv env;
  env.set_state(0.47, 0.05);
  const StepResult r = env.step(2);
  CHECK(r.terminal);
  CHECK(r.next_state[0] >= 0.5);
}

TEST_CASE("mountain car truncates after 200 steps of coasting") {
  MountainCarEnv env;
  env.set_state(-std::numbers::pi / 6.0, 0.0);  // valley bottom
  StepResult r;
  for (int i = 0; i < 200; ++i) {
    r = env.step(1);
    CHECK(r.reward == -1.0);
    REQUIRE_FALSE(r.terminal);
  }
  CHECK(r.truncated);
  CHECK_THROWS_AS(env.step(1), std::logic_error);
}

TEST_CASE("mountain car resets to a standing start in [-0.6, -0.4]") {
  MountainCarEnv env;
  Rng rng = make_rng(80);
  for (int i = 0; i < 1000; ++i) {
    const Vec s = env.reset(rng);
    CHECK(s[0] >= -0.6);
    CHECK(s[0] <= -0.4);
    CHECK(s[1] == 0.0);
  }
}

TEST_CASE("acrobot hangs at rest in its stable equilibrium") {
  AcrobotEnv env;
  env.set_internal_state({0.0, 0.0, 0.0, 0.0});
  const StepResult r = env.step(1);  // zero torque
  for (int i = 0; i < 4; ++i)
    CHECK(env.internal_state()[i] == Catch::Approx(0.0).margin(1e-12));
  CHECK(r.reward == -1.0);
  CHECK_FALSE(r.terminal);
  const Vec rest = {1.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < 6; ++i)
    CHECK(r.next_state[i] == Catch::Approx(rest[i]).margin(1e-12));
}

TEST_CASE("acrobot terminates above the target height with reward 0") {
  AcrobotEnv env;
  env.set_internal_state({std::numbers::pi, 0.0, 0.0, 0.0});  // inverted
  const StepResult r = env.step(1);
  CHECK(r.terminal);
  CHECK(r.reward == 0.0);
}

TEST_CASE("acrobot clamps angular velocities") {
  AcrobotEnv env;
  env.set_internal_state({0.0, 0.0, 100.0, -100.0});
  const StepResult r = env.step(2);
  CHECK(std::abs(r.next_state[4]) <= 4.0 * std::numbers::pi + 1e-12);
  CHECK(std::abs(r.next_state[5]) <= 9.0 * std::numbers::pi + 1e-12);
}

TEST_CASE("acrobot observations are trig-encoded angles") {
  AcrobotEnv env;
  env.set_internal_state({0.3, -0.8, 1.0, 2.0});
  const StepResult r = env.step(0);
  const auto& s = env.internal_state();
  CHECK(r.next_state[0] == Catch::Approx(std::cos(s[0])));
  CHECK(r.next_state[1] == Catch::Approx(std::sin(s[0])));
  CHECK(r.next_state[2] == Catch::Approx(std::cos(s[1])));
  CHECK(r.next_state[3] == Catch::Approx(std::sin(s[1])));
  CHECK(r.next_state[4] == s[2]);
  CHECK(r.next_state[5] == s[3]);
}

TEST_CASE("environment factory resolves every name") {
  Rng rng = make_rng(81);
  CHECK(make_env("binary_chain", 5, rng)->spec().state_dim == 6);
  CHECK(make_env("cartpole", 0, rng)->spec().state_dim == 4);
  CHECK(make_env("mountain_car", 0, rng)->spec().action_count == 3);
  CHECK(make_env("acrobot", 0, rng)->spec().state_dim == 6);
  CHECK(make_env("line1d", 0, rng)->spec().state_dim == 1);
  CHECK_THROWS_AS(make_env("atari", 0, rng), std::invalid_argument);
}

TEST_CASE("declared sampling boxes are finite and well-ordered") {
  Rng rng = make_rng(82);
  for (const char* name :
       {"binary_chain", "cartpole", "mountain_car", "acrobot", "line1d"}) {
    const auto env = make_env(name, 4, rng);
    const EnvSpec& spec = env->spec();
    REQUIRE(static_cast<int>(spec.sampling_box.size()) == spec.state_dim);
    for (const auto& [lo, hi] : spec.sampling_box) {
      CHECK(std::isfinite(lo));
      CHECK(std::isfinite(hi));
      CHECK(lo < hi);
    }
    CHECK(spec.action_count >= 2);
  }
}

TEST_CASE("invalid actions are protocol errors") {
  Rng rng = make_rng(83);
  const auto env = make_env("cartpole", 0, rng);
  env->reset(rng);
  CHECK_THROWS_AS(env->step(2), std::invalid_argument);
  CHECK_THROWS_AS(env->step(-1), std::invalid_argument);
}

TEST_CASE("line1d samples its box and ends immediately") {
  Line1dEnv env;
  Rng rng = make_rng(84);
  for (int i = 0; i < 100; ++i) {
    const Vec s = env.reset(rng);
    CHECK(s[0] >= -5.0);
    CHECK(s[0] <= 5.0);
    const StepResult r = env.step(i % 2);
    CHECK(r.terminal);
    CHECK(r.reward == 0.0);
  }
}
