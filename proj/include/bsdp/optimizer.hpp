#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "bsdp/mlp.hpp"

namespace bsdp {

enum class OptimizerKind { Sgd, Adam };

inline OptimizerKind optimizer_kind_from_name(const std::string& name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw std::invalid_argument("unknown optimizer: " + name);
}

/// First-order parameter updates for one network. Adam moment buffers are
/// sized lazily on the first step, so one Optimizer instance must stay paired
/// with one network.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, double beta1 = 0.9,
            double beta2 = 0.999, double epsilon = 1e-8)
      : kind_(kind),
        learning_rate_(learning_rate),
        beta1_(beta1),
        beta2_(beta2),
        epsilon_(epsilon) {
    if (learning_rate < 0.0)
      throw std::invalid_argument("Optimizer: negative learning rate");
  }

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return learning_rate_; }
  long step_count() const { return step_count_; }

  void step(MLP& net, const GradientSet& grads) {
    if (!net.same_shape(grads))
      throw std::invalid_argument("Optimizer::step: gradient shape mismatch");
    if (!grads.finite())
      throw std::runtime_error("Optimizer::step: non-finite gradient");
    ++step_count_;
    if (kind_ == OptimizerKind::Sgd) {
      sgd_update(net, grads);
    } else {
      adam_update(net, grads);
    }
  }

 private:
  void sgd_update(MLP& net, const GradientSet& grads) {
    for (int l = 0; l < net.layer_count(); ++l) {
      auto& w = net.weights()[l].data;
      const auto& gw = grads.weights[l].data;
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] -= learning_rate_ * gw[i];
      auto& b = net.biases()[l];
      const auto& gb = grads.biases[l];
      for (std::size_t i = 0; i < b.size(); ++i)
        b[i] -= learning_rate_ * gb[i];
    }
  }

  void adam_update(MLP& net, const GradientSet& grads) {
    if (m_.weights.empty()) {
      m_ = net.zero_gradients();
      v_ = net.zero_gradients();
    } else if (!net.same_shape(m_)) {
      throw std::invalid_argument(
          "Optimizer::step: network shape changed under an Adam optimizer");
    }
    const double bc1 = 1.0 - std::pow(beta1_, step_count_);
    const double bc2 = 1.0 - std::pow(beta2_, step_count_);
    for (int l = 0; l < net.layer_count(); ++l) {
      auto update = [&](double& theta, double& m, double& v, double g) {
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = beta2_ * v + (1.0 - beta2_) * g * g;
        const double mhat = m / bc1;
        const double vhat = v / bc2;
        theta -= learning_rate_ * mhat / (std::sqrt(vhat) + epsilon_);
      };
      auto& w = net.weights()[l].data;
      const auto& gw = grads.weights[l].data;
      for (std::size_t i = 0; i < w.size(); ++i)
        update(w[i], m_.weights[l].data[i], v_.weights[l].data[i], gw[i]);
      auto& b = net.biases()[l];
      const auto& gb = grads.biases[l];
      for (std::size_t i = 0; i < b.size(); ++i)
        update(b[i], m_.biases[l][i], v_.biases[l][i], gb[i]);
    }
  }

  OptimizerKind kind_;
  double learning_rate_;
  double beta1_;
  double beta2_;
  double epsilon_;
  long step_count_ = 0;
  GradientSet m_;
  GradientSet v_;
};

}  // namespace bsdp
