#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bsdp/ops.hpp"

namespace bsdp {

/// 1-based index of the first episode with positive reward; empty if the run
/// never solved within `cap` episodes.
inline std::optional<int> episodes_to_solve(const std::vector<double>& rewards,
                                            int cap) {
  const int n = std::min<int>(static_cast<int>(rewards.size()), cap);
  for (int i = 0; i < n; ++i)
    if (rewards[i] > 0.0) return i + 1;
  return std::nullopt;
}

/// Fraction of an episode's actions that were exploratory.
inline double exploration_rate(const std::vector<std::uint8_t>& flags) {
  if (flags.empty())
    throw std::invalid_argument("exploration_rate: empty episode");
  long count = 0;
  for (auto f : flags) count += f ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(flags.size());
}

/// Trailing moving average; windows are partial at the start so the output
/// has the same length as the input.
inline std::vector<double> moving_average(const std::vector<double>& x,
                                          int window) {
  if (window < 1) throw std::invalid_argument("moving_average: window < 1");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t begin = i + 1 >= static_cast<std::size_t>(window)
                                  ? i + 1 - window
                                  : 0;
    double sum = 0.0;
    for (std::size_t j = begin; j <= i; ++j) sum += x[j];
    out[i] = sum / static_cast<double>(i - begin + 1);
  }
  return out;
}

struct AggregateCurve {
  std::vector<double> mean;
  std::vector<double> lo;  // mean - band_scale * std
  std::vector<double> hi;  // mean + band_scale * std
};

/// Pointwise mean with a +-band_scale * population-standard-deviation band.
inline AggregateCurve aggregate_curves(const std::vector<std::vector<double>>& curves,
                                       double band_scale = 0.3) {
  if (curves.empty())
    throw std::invalid_argument("aggregate_curves: no curves");
  const std::size_t len = curves.front().size();
  for (const auto& c : curves)
    if (c.size() != len)
      throw std::invalid_argument("aggregate_curves: length mismatch");
  AggregateCurve out;
  out.mean.resize(len);
  out.lo.resize(len);
  out.hi.resize(len);
  const double n = static_cast<double>(curves.size());
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (const auto& c : curves) sum += c[i];
    const double mean = sum / n;
    double var = 0.0;
    for (const auto& c : curves) var += (c[i] - mean) * (c[i] - mean);
    const double sd = std::sqrt(var / n);
    out.mean[i] = mean;
    out.lo[i] = mean - band_scale * sd;
    out.hi[i] = mean + band_scale * sd;
  }
  return out;
}

}  // namespace bsdp
