#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bsdp/mlp.hpp"
#include "bsdp/rng.hpp"

using namespace bsdp;

namespace {

// Independent forward oracle: walks the layer parameters directly with plain
// index arithmetic instead of the library's affine/activate helpers.
Vec naive_forward(const MLP& net, const Vec& input) {
  Vec cur = input;
  const int layers = net.layer_count();
  for (int l = 0; l < layers; ++l) {
    const Matrix& w = net.weights()[l];
    Vec next(w.rows, 0.0);
    for (int o = 0; o < w.rows; ++o) {
      next[o] = net.biases()[l][o];
      for (int i = 0; i < w.cols; ++i) next[o] += w(o, i) * cur[i];
      if (l != layers - 1) {
        if (net.activation() == Activation::ReLU)
          next[o] = std::max(0.0, next[o]);
        else
          next[o] = std::tanh(next[o]);
      }
    }
    cur = next;
  }
  return cur;
}

double sample_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace

TEST_CASE("MLP rejects invalid architectures") {
  Rng rng = make_rng(1);
  CHECK_THROWS_AS(MLP::init_he({}, Activation::ReLU, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(MLP::init_he({3}, Activation::ReLU, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(MLP::init_he({0, 2}, Activation::ReLU, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(MLP::init_he({4, -1, 2}, Activation::ReLU, rng),
                  std::invalid_argument);
}

TEST_CASE("He initialization draws Normal(0, sqrt(2/fan_in)) with zero biases") {
  Rng rng = make_rng(2);
  // fan-in 2 -> std sqrt(2/2) = 1
  const MLP wide = MLP::init_he({2, 50000}, Activation::ReLU, rng);
  CHECK(sample_std(wide.weights()[0].data) == Catch::Approx(1.0).epsilon(0.05));
  for (double b : wide.biases()[0]) CHECK(b == 0.0);

  // fan-in 50 over 1e5 draws -> std within 5% of sqrt(2/50)
  const MLP fan50 = MLP::init_he({50, 2000}, Activation::ReLU, rng);
  CHECK(fan50.weights()[0].data.size() == 100000);
  CHECK(sample_std(fan50.weights()[0].data) ==
        Catch::Approx(std::sqrt(2.0 / 50.0)).epsilon(0.05));
}

TEST_CASE("He initialization is deterministic per seed") {
  Rng a = make_rng(77), b = make_rng(77);
  const MLP na = MLP::init_he({3, 16, 2}, Activation::ReLU, a);
  const MLP nb = MLP::init_he({3, 16, 2}, Activation::ReLU, b);
  CHECK(bitwise_equal(na, nb));
  Rng c = make_rng(78);
  const MLP nc = MLP::init_he({3, 16, 2}, Activation::ReLU, c);
  CHECK_FALSE(bitwise_equal(na, nc));
}

TEST_CASE("forward: zero network maps anything to zero") {
  const MLP net({3, 8, 2}, Activation::ReLU);
  const Vec out = net.forward({1.0, -2.0, 0.5});
  REQUIRE(out.size() == 2);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("forward: identity single layer reproduces its input") {
  MLP net({3, 3}, Activation::ReLU);
  for (int i = 0; i < 3; ++i) net.weights()[0](i, i) = 1.0;
  const Vec in = {0.3, -1.7, 2.2};
  CHECK(net.forward(in) == in);
}

TEST_CASE("forward matches the naive matrix oracle") {
  Rng rng = make_rng(3);
  std::normal_distribution<double> dist(0.0, 1.0);
  const MLP net = MLP::init_he({2, 16, 3}, Activation::ReLU, rng);
  for (int trial = 0; trial < 25; ++trial) {
    Vec in = {dist(rng), dist(rng)};
    const Vec got = net.forward(in);
    const Vec want = naive_forward(net, in);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(got[i] == Catch::Approx(want[i]).margin(1e-12));
  }
  const MLP tanh_net = MLP::init_he({2, 16, 3}, Activation::Tanh, rng);
  const Vec in = {0.2, -0.9};
  const Vec got = tanh_net.forward(in);
  const Vec want = naive_forward(tanh_net, in);
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(got[i] == Catch::Approx(want[i]).margin(1e-12));
}

TEST_CASE("forward rejects wrong input lengths") {
  const MLP net({3, 2}, Activation::ReLU);
  CHECK_THROWS_AS(net.forward({1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(net.forward({1.0, 2.0, 3.0, 4.0}), std::invalid_argument);
}

TEST_CASE("backward: zero output gradient yields zero gradients") {
  Rng rng = make_rng(4);
  const MLP net = MLP::init_he({3, 8, 2}, Activation::ReLU, rng);
  const GradientSet g = net.backward({0.1, 0.2, 0.3}, {0.0, 0.0});
  for (const auto& m : g.weights)
    for (double v : m.data) CHECK(v == 0.0);
  for (const auto& b : g.biases)
    for (double v : b) CHECK(v == 0.0);
}

TEST_CASE("backward: single linear layer gives the outer product") {
  Rng rng = make_rng(5);
  const MLP net = MLP::init_he({3, 2}, Activation::ReLU, rng);
  const Vec x = {0.5, -1.0, 2.0};
  const Vec g = {2.0, -3.0};
  const GradientSet grads = net.backward(x, g);
  for (int o = 0; o < 2; ++o) {
    for (int i = 0; i < 3; ++i)
      CHECK(grads.weights[0](o, i) == Catch::Approx(g[o] * x[i]).margin(1e-15));
    CHECK(grads.biases[0][o] == g[o]);
  }
}

TEST_CASE("backward matches central finite differences") {
  Rng rng = make_rng(6);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (Activation act : {Activation::ReLU, Activation::Tanh}) {
    MLP net = MLP::init_he({3, 8, 8, 2}, act, rng);
    Vec x(3), g(2);
    for (double& v : x) v = dist(rng);
    for (double& v : g) v = dist(rng);
    const GradientSet analytic = net.backward(x, g);

    const double delta = 1e-5;
    auto scalar = [&] {
      const Vec out = net.forward(x);
      return out[0] * g[0] + out[1] * g[1];
    };
    for (int l = 0; l < net.layer_count(); ++l) {
      auto& w = net.weights()[l].data;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double saved = w[i];
        w[i] = saved + delta;
        const double hi = scalar();
        w[i] = saved - delta;
        const double lo = scalar();
        w[i] = saved;
        const double numeric = (hi - lo) / (2.0 * delta);
        const double analytic_v = analytic.weights[l].data[i];
        const double diff = std::abs(numeric - analytic_v);
        const double scale = std::max({std::abs(numeric), std::abs(analytic_v), 1e-3});
        CHECK(diff / scale < 1e-4);
      }
      auto& b = net.biases()[l];
      for (std::size_t i = 0; i < b.size(); ++i) {
        const double saved = b[i];
        b[i] = saved + delta;
        const double hi = scalar();
        b[i] = saved - delta;
        const double lo = scalar();
        b[i] = saved;
        const double numeric = (hi - lo) / (2.0 * delta);
        const double analytic_v = analytic.biases[l][i];
        const double diff = std::abs(numeric - analytic_v);
        if (diff > 1e-7) {
          const double scale = std::max(std::abs(numeric), std::abs(analytic_v));
          CHECK(diff / scale < 1e-4);
        }
      }
    }
  }
}

TEST_CASE("backward validates shapes") {
  const MLP net({3, 2}, Activation::ReLU);
  CHECK_THROWS_AS(net.backward({1.0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(net.backward({1.0, 1.0, 1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("gradient shapes mirror the network") {
  Rng rng = make_rng(7);
  const MLP net = MLP::init_he({4, 6, 5, 2}, Activation::ReLU, rng);
  const GradientSet g = net.zero_gradients();
  REQUIRE(g.weights.size() == 3);
  CHECK(g.weights[0].rows == 6);
  CHECK(g.weights[0].cols == 4);
  CHECK(g.weights[2].rows == 2);
  CHECK(g.weights[2].cols == 5);
  CHECK(g.biases[1].size() == 5);
  CHECK(net.same_shape(g));
}
