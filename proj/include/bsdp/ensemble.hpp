#pragma once

#include <stdexcept>
#include <vector>

#include "bsdp/mlp.hpp"

namespace bsdp {

/// One ensemble member: a trainable value network, a fixed prior added to
/// every prediction, and a periodically synced target copy of the trainable
/// part. Members with `prior_is_zero` skip the prior forward pass entirely;
/// their Q is the trainable output alone.
struct QEnsembleMember {
  MLP trainable;
  MLP prior;
  MLP target_trainable;
  bool prior_frozen = false;
  bool prior_is_zero = false;

  Vec q(const Vec& state) const {
    Vec out = trainable.forward(state);
    if (!prior_is_zero) add_prior(state, out);
    return out;
  }

  Vec target_q(const Vec& state) const {
    Vec out = target_trainable.forward(state);
    if (!prior_is_zero) add_prior(state, out);
    return out;
  }

  void sync_target() { target_trainable = trainable; }

 private:
  void add_prior(const Vec& state, Vec& out) const {
    const Vec p = prior.forward(state);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += p[i];
  }
};

using Ensemble = std::vector<QEnsembleMember>;

inline Vec ensemble_q_all_actions(int member_index, const Vec& state,
                                  const Ensemble& ensemble) {
  if (member_index < 0 ||
      static_cast<std::size_t>(member_index) >= ensemble.size())
    throw std::invalid_argument("ensemble_q_all_actions: bad member index");
  return ensemble[member_index].q(state);
}

/// Per-action median of Q over all members; an even member count averages the
/// two middle values.
inline Vec ensemble_median_q(const Vec& state, const Ensemble& ensemble) {
  if (ensemble.empty())
    throw std::invalid_argument("ensemble_median_q: empty ensemble");
  std::vector<Vec> qs;
  qs.reserve(ensemble.size());
  for (const auto& member : ensemble) qs.push_back(member.q(state));
  const std::size_t actions = qs.front().size();
  Vec med(actions);
  Vec column(ensemble.size());
  for (std::size_t a = 0; a < actions; ++a) {
    for (std::size_t k = 0; k < ensemble.size(); ++k) column[k] = qs[k][a];
    med[a] = median(column);
  }
  return med;
}

}  // namespace bsdp
