#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bsdp/ensemble.hpp"
#include "bsdp/ops.hpp"
#include "bsdp/optimizer.hpp"
#include "bsdp/rng.hpp"

namespace bsdp {

struct DiversityHyperparams {
  double epsilon = 0.1;   // KL clipping upper bound
  double alpha1 = 1.0;    // nonlinearity weight
  double alpha2 = 0.1;    // output-bounding weight
  int steps = 2000;       // optimization iterations
  double fdm_step = 1e-2; // finite-difference step in state units
  int batch_size = 64;    // states per loss estimate

  void validate() const {
    if (epsilon <= 0.0)
      throw std::invalid_argument("DiversityHyperparams: epsilon <= 0");
    if (alpha1 < 0.0 || alpha2 < 0.0)
      throw std::invalid_argument("DiversityHyperparams: negative weight");
    if (steps < 1) throw std::invalid_argument("DiversityHyperparams: steps < 1");
    if (fdm_step <= 0.0)
      throw std::invalid_argument("DiversityHyperparams: fdm_step <= 0");
    if (batch_size < 1)
      throw std::invalid_argument("DiversityHyperparams: batch_size < 1");
  }
};

/// Uniform sampling over a per-dimension box.
class StateSampler {
 public:
  explicit StateSampler(std::vector<std::pair<double, double>> box)
      : box_(std::move(box)) {
    if (box_.empty()) throw std::invalid_argument("StateSampler: empty box");
    for (const auto& [lo, hi] : box_)
      if (!(lo < hi))
        throw std::invalid_argument("StateSampler: lower bound must be < upper");
  }

  int dim() const { return static_cast<int>(box_.size()); }
  const std::vector<std::pair<double, double>>& box() const { return box_; }

  Vec sample(Rng& rng) const {
    Vec s(box_.size());
    for (std::size_t d = 0; d < box_.size(); ++d) {
      std::uniform_real_distribution<double> dist(box_[d].first,
                                                  box_[d].second);
      s[d] = dist(rng);
    }
    return s;
  }

  std::vector<Vec> sample_batch(int n, Rng& rng) const {
    std::vector<Vec> batch;
    batch.reserve(n);
    for (int i = 0; i < n; ++i) batch.push_back(sample(rng));
    return batch;
  }

 private:
  std::vector<std::pair<double, double>> box_;
};

using QFunction = std::function<Vec(const Vec&)>;

inline QFunction member_q_fn(const Ensemble& ensemble, int member_index) {
  return [&ensemble, member_index](const Vec& s) {
    return ensemble_q_all_actions(member_index, s, ensemble);
  };
}

// --- Loss terms -------------------------------------------------------------
//
// Each term has a callable-based core used by tests with analytic Q shapes,
// plus the ensemble-facing overload used in training.

/// Mean over the batch of -clip(D_KL(softmax(q(s)) || softmax(q_ref(s))), 0,
/// epsilon). Always in [-epsilon, 0].
inline double kl_loss(const QFunction& q, const QFunction& q_ref,
                      const std::vector<Vec>& states, double epsilon) {
  if (states.empty()) throw std::invalid_argument("kl_loss: empty batch");
  if (epsilon <= 0.0) throw std::invalid_argument("kl_loss: epsilon <= 0");
  double sum = 0.0;
  for (const Vec& s : states)
    sum += -clip(kl_divergence(softmax(q(s)), softmax(q_ref(s))), 0.0, epsilon);
  return sum / static_cast<double>(states.size());
}

inline double kl_loss(int member_index, const std::vector<Vec>& states,
                      const Ensemble& ensemble, double epsilon) {
  return kl_loss(
      member_q_fn(ensemble, member_index),
      [&ensemble](const Vec& s) { return ensemble_median_q(s, ensemble); },
      states, epsilon);
}

/// Mean over the batch of -|q''(s)|^2, where q''(s) stacks the
/// finite-difference second derivative along every state dimension for every
/// action. Always <= 0.
inline double nl_loss(const QFunction& q, const std::vector<Vec>& states,
                      double h) {
  if (states.empty()) throw std::invalid_argument("nl_loss: empty batch");
  double sum = 0.0;
  for (const Vec& s : states) {
    double sq = 0.0;
    for (int d = 0; d < static_cast<int>(s.size()); ++d) {
      const Vec dd = fdm_second_derivative(q, s, d, h);
      for (double v : dd) sq += v * v;
    }
    sum += -sq;
  }
  return sum / static_cast<double>(states.size());
}

inline double nl_loss(int member_index, const std::vector<Vec>& states,
                      const Ensemble& ensemble, double h) {
  return nl_loss(member_q_fn(ensemble, member_index), states, h);
}

/// Mean over the batch of the squared Euclidean norm of q(s). Always >= 0.
inline double bd_loss(const QFunction& q, const std::vector<Vec>& states) {
  if (states.empty()) throw std::invalid_argument("bd_loss: empty batch");
  double sum = 0.0;
  for (const Vec& s : states) {
    const Vec out = q(s);
    for (double v : out) sum += v * v;
  }
  return sum / static_cast<double>(states.size());
}

inline double bd_loss(int member_index, const std::vector<Vec>& states,
                      const Ensemble& ensemble) {
  return bd_loss(member_q_fn(ensemble, member_index), states);
}

/// Combined objective: kl_loss + alpha1 * nl_loss + alpha2 * bd_loss.
inline double diversity_objective(int member_index,
                                  const std::vector<Vec>& states,
                                  const Ensemble& ensemble,
                                  const DiversityHyperparams& hp) {
  hp.validate();
  double value = kl_loss(member_index, states, ensemble, hp.epsilon);
  if (hp.alpha1 != 0.0)
    value += hp.alpha1 * nl_loss(member_index, states, ensemble, hp.fdm_step);
  if (hp.alpha2 != 0.0)
    value += hp.alpha2 * bd_loss(member_index, states, ensemble);
  return value;
}

/// Value of the combined objective together with its gradient with respect to
/// the selected member's prior parameters only. The ensemble median is
/// treated as a constant and the trainable part of the member receives no
/// gradient.
inline std::pair<double, GradientSet> diversity_objective_gradient(
    int member_index, const std::vector<Vec>& states, const Ensemble& ensemble,
    const DiversityHyperparams& hp) {
  hp.validate();
  if (states.empty())
    throw std::invalid_argument("diversity_objective_gradient: empty batch");
  const QEnsembleMember& member = ensemble.at(member_index);
  const MLP& prior = member.prior;
  GradientSet grads = prior.zero_gradients();
  const double h = hp.fdm_step;
  const double inv_h2 = 1.0 / (h * h);
  double total = 0.0;

  for (const Vec& s : states) {
    const Vec qj = member.q(s);
    const int actions = static_cast<int>(qj.size());
    Vec grad_q(actions, 0.0);  // d(per-state objective)/d qj(s)

    // KL term against the detached per-action median. The gradient of
    // KL(p(z) || q) with respect to the logits z is p * (log p - log q - KL);
    // the clip zeroes it outside (0, epsilon) and the loss is negated.
    {
      const Vec q_med = ensemble_median_q(s, ensemble);
      const Vec logp = log_softmax(qj);
      const Vec logq = log_softmax(q_med);
      double kl = 0.0;
      for (int a = 0; a < actions; ++a)
        kl += std::exp(logp[a]) * (logp[a] - logq[a]);
      total += -clip(kl, 0.0, hp.epsilon);
      if (kl > 0.0 && kl < hp.epsilon) {
        for (int a = 0; a < actions; ++a)
          grad_q[a] -= std::exp(logp[a]) * (logp[a] - logq[a] - kl);
      }
    }

    // Output-bounding term: alpha2 * |qj|^2.
    if (hp.alpha2 != 0.0) {
      double sq = 0.0;
      for (int a = 0; a < actions; ++a) {
        sq += qj[a] * qj[a];
        grad_q[a] += hp.alpha2 * 2.0 * qj[a];
      }
      total += hp.alpha2 * sq;
    }

    // Nonlinearity term: -alpha1 * sum over (dim, action) of the squared
    // forward stencil (q(s+2h) - 2 q(s+h) + q(s)) / h^2. Each stencil point
    // contributes its own backward pass through the prior.
    if (hp.alpha1 != 0.0) {
      const int dims = static_cast<int>(s.size());
      for (int d = 0; d < dims; ++d) {
        Vec s1 = s, s2 = s;
        s1[d] += h;
        s2[d] += 2.0 * h;
        const Vec q1 = member.q(s1);
        const Vec q2 = member.q(s2);
        Vec coeff(actions);  // -2 * alpha1 * stencil / h^2
        double sq = 0.0;
        for (int a = 0; a < actions; ++a) {
          const double g = (q2[a] - 2.0 * q1[a] + qj[a]) * inv_h2;
          sq += g * g;
          coeff[a] = -2.0 * hp.alpha1 * g * inv_h2;
        }
        total += -hp.alpha1 * sq;
        Vec grad2(actions), grad1(actions);
        for (int a = 0; a < actions; ++a) {
          grad2[a] = coeff[a];
          grad1[a] = -2.0 * coeff[a];
          grad_q[a] += coeff[a];
        }
        grads.add(prior.backward(s2, grad2));
        grads.add(prior.backward(s1, grad1));
      }
    }

    grads.add(prior.backward(s, grad_q));
  }

  const double inv_n = 1.0 / static_cast<double>(states.size());
  grads.scale(inv_n);
  return {total * inv_n, grads};
}

/// Optimizes the prior networks for diversity before any interaction with an
/// environment. Each iteration samples a state batch, picks one member
/// uniformly and applies a single optimizer step to that member's prior.
/// Trainable networks are untouched; priors come back frozen.
inline void diverse_prior_init(Ensemble& ensemble, const StateSampler& sampler,
                               const DiversityHyperparams& hp,
                               const Optimizer& optimizer_prototype, Rng& rng) {
  hp.validate();
  if (ensemble.size() < 2)
    throw std::invalid_argument(
        "diverse_prior_init: need at least 2 members for a median target");
  std::vector<Optimizer> opts(ensemble.size(), optimizer_prototype);
  std::uniform_int_distribution<int> pick(0,
                                          static_cast<int>(ensemble.size()) - 1);
  for (int iter = 0; iter < hp.steps; ++iter) {
    const std::vector<Vec> batch = sampler.sample_batch(hp.batch_size, rng);
    const int j = pick(rng);
    auto [value, grads] =
        diversity_objective_gradient(j, batch, ensemble, hp);
    (void)value;
    opts[j].step(ensemble[j].prior, grads);
  }
  for (auto& member : ensemble) member.prior_frozen = true;
}

}  // namespace bsdp
