#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bsdp/agents.hpp"
#include "bsdp/diverse_prior.hpp"
#include "bsdp/mlp.hpp"
#include "bsdp/replay.hpp"
#include "bsdp/rng.hpp"

namespace bsdp {

/// Central finite differences of `scalar` with respect to every parameter of
/// `net`. The net is restored to its original parameters afterwards.
inline GradientSet central_diff_gradient(const std::function<double()>& scalar,
                                         MLP& net, double delta) {
  GradientSet out = net.zero_gradients();
  auto probe = [&](double& theta, double& slot) {
    const double saved = theta;
    theta = saved + delta;
    const double hi = scalar();
    theta = saved - delta;
    const double lo = scalar();
    theta = saved;
    slot = (hi - lo) / (2.0 * delta);
  };
  for (int l = 0; l < net.layer_count(); ++l) {
    auto& w = net.weights()[l].data;
    for (std::size_t i = 0; i < w.size(); ++i)
      probe(w[i], out.weights[l].data[i]);
    auto& b = net.biases()[l];
    for (std::size_t i = 0; i < b.size(); ++i) probe(b[i], out.biases[l][i]);
  }
  return out;
}

inline double max_relative_mismatch(const GradientSet& analytic,
                                    const GradientSet& numeric,
                                    double abs_floor) {
  double worst = 0.0;
  auto compare = [&](double a, double n) {
    const double diff = std::abs(a - n);
    if (diff <= abs_floor) return;
    const double scale = std::max(std::abs(a), std::abs(n));
    worst = std::max(worst, diff / scale);
  };
  for (std::size_t l = 0; l < analytic.weights.size(); ++l) {
    for (std::size_t i = 0; i < analytic.weights[l].data.size(); ++i)
      compare(analytic.weights[l].data[i], numeric.weights[l].data[i]);
    for (std::size_t i = 0; i < analytic.biases[l].size(); ++i)
      compare(analytic.biases[l][i], numeric.biases[l][i]);
  }
  return worst;
}

namespace gradcheck {

inline std::vector<int> random_architecture(Rng& rng, int max_hidden_layers) {
  std::uniform_int_distribution<int> depth(1, max_hidden_layers);
  std::uniform_int_distribution<int> width(2, 8);
  std::vector<int> sizes;
  sizes.push_back(width(rng));
  const int hidden = depth(rng);
  for (int i = 0; i < hidden; ++i) sizes.push_back(width(rng));
  sizes.push_back(width(rng));
  return sizes;
}

inline Vec random_vec(int n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Vec v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

/// True when any hidden pre-activation sits within `margin` of zero, where a
/// rectifier is not differentiable and finite differences straddle the kink.
inline bool near_relu_kink(const MLP& net, const Vec& input, double margin) {
  if (net.activation() != Activation::ReLU) return false;
  Vec cur = input;
  for (int l = 0; l + 1 < net.layer_count(); ++l) {
    const Matrix& w = net.weights()[l];
    Vec next(w.rows);
    for (int o = 0; o < w.rows; ++o) {
      double z = net.biases()[l][o];
      for (int i = 0; i < w.cols; ++i) z += w(o, i) * cur[i];
      if (std::abs(z) < margin) return true;
      next[o] = z > 0.0 ? z : 0.0;
    }
    cur = std::move(next);
  }
  return false;
}

/// Projection of the network output onto a fixed direction.
inline double mlp_backward_mismatch(Rng& rng) {
  for (;;) {
    const auto sizes = random_architecture(rng, 3);
    MLP net = MLP::init_he(sizes, Activation::ReLU, rng);
    const Vec input = random_vec(sizes.front(), rng);
    if (near_relu_kink(net, input, 1e-3)) continue;
    const Vec direction = random_vec(sizes.back(), rng);
    const GradientSet analytic = net.backward(input, direction);
    const auto scalar = [&] {
      const Vec out = net.forward(input);
      double dot = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) dot += out[i] * direction[i];
      return dot;
    };
    const GradientSet numeric = central_diff_gradient(scalar, net, 1e-5);
    return max_relative_mismatch(analytic, numeric, 1e-7);
  }
}

inline double td_loss_mismatch(Rng& rng) {
  const int state_dim = 3;
  const int actions = 3;
  const std::vector<int> sizes = {state_dim, 8, actions};
  QEnsembleMember member;
  member.trainable = MLP::init_he(sizes, Activation::ReLU, rng);
  member.prior = MLP::init_he(sizes, Activation::Tanh, rng);
  member.target_trainable = MLP::init_he(sizes, Activation::ReLU, rng);

  std::uniform_int_distribution<int> action(0, actions - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<MaskedTransition> batch;
  while (batch.size() < 8) {
    MaskedTransition t;
    t.state = random_vec(state_dim, rng);
    if (near_relu_kink(member.trainable, t.state, 1e-3)) continue;
    t.next_state = random_vec(state_dim, rng);
    t.action = action(rng);
    t.reward = random_vec(1, rng)[0];
    t.terminal = unit(rng) < 0.25;
    t.mask = {1};
    batch.push_back(std::move(t));
  }
  const double gamma = 0.99;
  const GradientSet analytic = td_loss(member, batch, gamma).second;
  const auto scalar = [&] { return td_loss(member, batch, gamma).first; };
  const GradientSet numeric =
      central_diff_gradient(scalar, member.trainable, 1e-5);
  return max_relative_mismatch(analytic, numeric, 1e-7);
}

/// True when member j's Q value is one of the median-defining entries for any
/// state/action in the batch; the analytic gradient detaches the median, so
/// finite differences only agree away from those points.
inline bool member_touches_median(int j, const std::vector<Vec>& states,
                                  const Ensemble& ensemble) {
  const std::size_t k = ensemble.size();
  for (const Vec& s : states) {
    std::vector<Vec> qs;
    qs.reserve(k);
    for (const auto& m : ensemble) qs.push_back(m.q(s));
    for (std::size_t a = 0; a < qs.front().size(); ++a) {
      Vec column(k);
      for (std::size_t m = 0; m < k; ++m) column[m] = qs[m][a];
      Vec sorted = column;
      std::sort(sorted.begin(), sorted.end());
      const double ja = column[j];
      if (k % 2 == 1) {
        if (ja == sorted[k / 2]) return true;
      } else {
        if (ja == sorted[k / 2 - 1] || ja == sorted[k / 2]) return true;
      }
    }
  }
  return false;
}

inline double diversity_objective_mismatch(Rng& rng) {
  const int k = 5;
  const std::vector<int> sizes = {2, 6, 2};
  DiversityHyperparams hp;
  hp.epsilon = 50.0;  // keep every state strictly inside the clip
  hp.alpha1 = 1.0;
  hp.alpha2 = 0.1;
  hp.fdm_step = 1e-2;
  hp.batch_size = 3;

  for (;;) {
    Ensemble ensemble;
    for (int m = 0; m < k; ++m) {
      QEnsembleMember member;
      member.trainable = MLP::init_he(sizes, Activation::ReLU, rng);
      member.prior = MLP::init_he(sizes, Activation::Tanh, rng);
      member.target_trainable = member.trainable;
      ensemble.push_back(std::move(member));
    }
    std::vector<Vec> states;
    for (int i = 0; i < hp.batch_size; ++i)
      states.push_back(random_vec(sizes.front(), rng));
    const int j = select_member(k, rng);
    if (member_touches_median(j, states, ensemble)) continue;
    bool interior = true;
    for (const Vec& s : states) {
      const double kl = kl_divergence(
          softmax(ensemble[j].q(s)), softmax(ensemble_median_q(s, ensemble)));
      interior = interior && kl > 1e-8 && kl < hp.epsilon * 0.9;
    }
    if (!interior) continue;

    const GradientSet analytic =
        diversity_objective_gradient(j, states, ensemble, hp).second;
    const auto scalar = [&] {
      return diversity_objective(j, states, ensemble, hp);
    };
    // The nonlinearity term divides by fdm_step^2, so objective evaluations
    // carry cancellation noise of about 1e-11; a larger probe keeps the
    // finite-difference quotient above that noise floor.
    const GradientSet numeric =
        central_diff_gradient(scalar, ensemble[j].prior, 1e-4);
    return max_relative_mismatch(analytic, numeric, 1e-7);
  }
}

}  // namespace gradcheck

struct GradCheckCase {
  std::string name;
  int instances = 0;
  int failures = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  bool ok() const { return failures == 0; }
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  bool ok() const {
    for (const auto& c : cases)
      if (!c.ok()) return false;
    return true;
  }
};

/// Checks every analytic gradient in the library against central finite
/// differences on freshly randomized instances.
inline GradCheckReport run_gradient_suite(int instances, std::uint64_t seed,
                                          double tolerance = 1e-3) {
  Rng rng = make_rng(seed, 0x6bad);
  GradCheckReport report;
  auto run = [&](const std::string& name, auto&& fn) {
    GradCheckCase c;
    c.name = name;
    c.instances = instances;
    c.tolerance = tolerance;
    for (int i = 0; i < instances; ++i) {
      const double mismatch = fn(rng);
      c.worst = std::max(c.worst, mismatch);
      if (mismatch > tolerance) ++c.failures;
    }
    report.cases.push_back(std::move(c));
  };
  run("mlp_backward", gradcheck::mlp_backward_mismatch);
  run("td_loss", gradcheck::td_loss_mismatch);
  run("diversity_objective", gradcheck::diversity_objective_mismatch);
  return report;
}

}  // namespace bsdp
