#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bsdp {

using Vec = std::vector<double>;

/// Numerically stable softmax (max is subtracted before exponentiation).
inline Vec softmax(const Vec& x) {
  if (x.empty()) throw std::invalid_argument("softmax: empty input");
  const double m = *std::max_element(x.begin(), x.end());
  Vec out(x.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - m);
    denom += out[i];
  }
  for (double& v : out) v /= denom;
  return out;
}

/// log(softmax(x)), kept in log space so saturated entries stay finite.
inline Vec log_softmax(const Vec& x) {
  if (x.empty()) throw std::invalid_argument("log_softmax: empty input");
  const double m = *std::max_element(x.begin(), x.end());
  double denom = 0.0;
  for (double v : x) denom += std::exp(v - m);
  const double log_denom = std::log(denom);
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - m - log_denom;
  return out;
}

/// D_KL(p || q) = sum_i p_i log(p_i / q_i); terms with p_i = 0 contribute 0.
inline double kl_divergence(const Vec& p, const Vec& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("kl_divergence: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] <= 0.0)
      throw std::domain_error("kl_divergence: q(i)=0 where p(i)>0");
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum;
}

inline double clip(double x, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("clip: lo > hi");
  return std::min(hi, std::max(lo, x));
}

/// Median of a set of values; an even count averages the two middle ones.
inline double median(Vec values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

using VectorFn = std::function<Vec(const Vec&)>;

/// Forward finite-difference second derivative of f along state dimension
/// `dim`: (f(s + 2h e) - 2 f(s + h e) + f(s)) / h^2, one entry per output
/// component. Exact for polynomials of degree <= 2.
inline Vec fdm_second_derivative(const VectorFn& f, const Vec& s, int dim,
                                 double h) {
  if (h <= 0.0) throw std::invalid_argument("fdm_second_derivative: h <= 0");
  if (dim < 0 || static_cast<std::size_t>(dim) >= s.size())
    throw std::invalid_argument("fdm_second_derivative: dim out of range");
  Vec s1 = s, s2 = s;
  s1[dim] += h;
  s2[dim] += 2.0 * h;
  const Vec f0 = f(s);
  const Vec f1 = f(s1);
  const Vec f2 = f(s2);
  if (f1.size() != f0.size() || f2.size() != f0.size())
    throw std::invalid_argument(
        "fdm_second_derivative: inconsistent output sizes");
  Vec out(f0.size());
  for (std::size_t i = 0; i < f0.size(); ++i) {
    out[i] = (f2[i] - 2.0 * f1[i] + f0[i]) / (h * h);
    if (!std::isfinite(out[i]))
      throw std::runtime_error("fdm_second_derivative: non-finite evaluation");
  }
  return out;
}

}  // namespace bsdp
