#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "bsdp/ops.hpp"
#include "bsdp/rng.hpp"

namespace bsdp {

enum class Activation { ReLU, Tanh };

// Row-major by output neuron: data[o * cols + i].
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  double operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
};

/// Per-layer parameter gradients, shape-congruent with the network they were
/// computed from.
struct GradientSet {
  std::vector<Matrix> weights;
  std::vector<Vec> biases;

  void add(const GradientSet& other) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
      auto& w = weights[l].data;
      const auto& ow = other.weights[l].data;
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += ow[i];
      auto& b = biases[l];
      const auto& ob = other.biases[l];
      for (std::size_t i = 0; i < b.size(); ++i) b[i] += ob[i];
    }
  }

  void scale(double factor) {
    for (auto& m : weights)
      for (double& v : m.data) v *= factor;
    for (auto& b : biases)
      for (double& v : b) v *= factor;
  }

  bool finite() const {
    for (const auto& m : weights)
      for (double v : m.data)
        if (!std::isfinite(v)) return false;
    for (const auto& b : biases)
      for (double v : b)
        if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Dense feed-forward network. Hidden layers share one nonlinearity; the
/// output layer is linear. Weight matrix of layer l has shape
/// (layer_sizes[l+1] x layer_sizes[l]).
class MLP {
 public:
  MLP() = default;

  MLP(std::vector<int> layer_sizes, Activation hidden_activation)
      : sizes_(std::move(layer_sizes)), activation_(hidden_activation) {
    if (sizes_.size() < 2)
      throw std::invalid_argument("MLP: need at least input and output sizes");
    for (int s : sizes_)
      if (s < 1) throw std::invalid_argument("MLP: layer sizes must be >= 1");
    weights_.reserve(sizes_.size() - 1);
    biases_.reserve(sizes_.size() - 1);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      weights_.emplace_back(sizes_[l + 1], sizes_[l]);
      biases_.emplace_back(sizes_[l + 1], 0.0);
    }
  }

  /// He initialization: weights of a layer with fan-in n are drawn from
  /// Normal(0, sqrt(2/n)); biases start at zero.
  static MLP init_he(const std::vector<int>& layer_sizes, Activation act,
                     Rng& rng) {
    MLP net(layer_sizes, act);
    for (std::size_t l = 0; l < net.weights_.size(); ++l) {
      const double stddev = std::sqrt(2.0 / net.sizes_[l]);
      std::normal_distribution<double> dist(0.0, stddev);
      for (double& w : net.weights_[l].data) w = dist(rng);
    }
    return net;
  }

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int layer_count() const { return static_cast<int>(weights_.size()); }
  Activation activation() const { return activation_; }

  std::vector<Matrix>& weights() { return weights_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  std::vector<Vec>& biases() { return biases_; }
  const std::vector<Vec>& biases() const { return biases_; }

  Vec forward(const Vec& input) const {
    if (input.size() != static_cast<std::size_t>(input_size()))
      throw std::invalid_argument("MLP::forward: input length mismatch");
    Vec cur = input;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Vec next = affine(l, cur);
      if (l + 1 < weights_.size()) activate(next);
      cur = std::move(next);
    }
    return cur;
  }

  /// Gradient of dot(forward(input), output_gradient) with respect to every
  /// parameter.
  GradientSet backward(const Vec& input, const Vec& output_gradient) const {
    if (input.size() != static_cast<std::size_t>(input_size()))
      throw std::invalid_argument("MLP::backward: input length mismatch");
    if (output_gradient.size() != static_cast<std::size_t>(output_size()))
      throw std::invalid_argument(
          "MLP::backward: output gradient length mismatch");

    const std::size_t layers = weights_.size();
    std::vector<Vec> acts(layers + 1);  // acts[l] feeds layer l
    std::vector<Vec> pre(layers);       // pre-activation of layer l
    acts[0] = input;
    for (std::size_t l = 0; l < layers; ++l) {
      pre[l] = affine(l, acts[l]);
      acts[l + 1] = pre[l];
      if (l + 1 < layers) activate(acts[l + 1]);
    }

    GradientSet grads = zero_gradients();
    Vec delta = output_gradient;
    for (std::size_t l = layers; l-- > 0;) {
      Matrix& dw = grads.weights[l];
      const Vec& a = acts[l];
      for (int o = 0; o < dw.rows; ++o) {
        const double d = delta[o];
        double* row = &dw.data[static_cast<std::size_t>(o) * dw.cols];
        for (int i = 0; i < dw.cols; ++i) row[i] = d * a[i];
        grads.biases[l][o] = d;
      }
      if (l == 0) break;
      const Matrix& w = weights_[l];
      Vec prev(w.cols, 0.0);
      for (int o = 0; o < w.rows; ++o) {
        const double d = delta[o];
        const double* row = &w.data[static_cast<std::size_t>(o) * w.cols];
        for (int i = 0; i < w.cols; ++i) prev[i] += d * row[i];
      }
      for (int i = 0; i < w.cols; ++i)
        prev[i] *= activation_derivative(pre[l - 1][i]);
      delta = std::move(prev);
    }
    return grads;
  }

  GradientSet zero_gradients() const {
    GradientSet g;
    g.weights.reserve(weights_.size());
    g.biases.reserve(biases_.size());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      g.weights.emplace_back(weights_[l].rows, weights_[l].cols);
      g.biases.emplace_back(biases_[l].size(), 0.0);
    }
    return g;
  }

  bool same_shape(const GradientSet& g) const {
    if (g.weights.size() != weights_.size() ||
        g.biases.size() != biases_.size())
      return false;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      if (g.weights[l].rows != weights_[l].rows ||
          g.weights[l].cols != weights_[l].cols ||
          g.biases[l].size() != biases_[l].size())
        return false;
    }
    return true;
  }

  void set_all_parameters(double value) {
    for (auto& m : weights_)
      for (double& v : m.data) v = value;
    for (auto& b : biases_)
      for (double& v : b) v = value;
  }

 private:
  Vec affine(std::size_t layer, const Vec& in) const {
    const Matrix& w = weights_[layer];
    Vec out(w.rows);
    for (int o = 0; o < w.rows; ++o) {
      double sum = biases_[layer][o];
      const double* row = &w.data[static_cast<std::size_t>(o) * w.cols];
      for (int i = 0; i < w.cols; ++i) sum += row[i] * in[i];
      out[o] = sum;
    }
    return out;
  }

  void activate(Vec& v) const {
    if (activation_ == Activation::ReLU) {
      for (double& x : v) x = x > 0.0 ? x : 0.0;
    } else {
      for (double& x : v) x = std::tanh(x);
    }
  }

  double activation_derivative(double pre) const {
    if (activation_ == Activation::ReLU) return pre > 0.0 ? 1.0 : 0.0;
    const double t = std::tanh(pre);
    return 1.0 - t * t;
  }

  std::vector<int> sizes_;
  Activation activation_ = Activation::ReLU;
  std::vector<Matrix> weights_;
  std::vector<Vec> biases_;
};

inline bool bitwise_equal(const MLP& a, const MLP& b) {
  if (a.layer_sizes() != b.layer_sizes()) return false;
  for (int l = 0; l < a.layer_count(); ++l) {
    if (a.weights()[l].data != b.weights()[l].data) return false;
    if (a.biases()[l] != b.biases()[l]) return false;
  }
  return true;
}

}  // namespace bsdp
