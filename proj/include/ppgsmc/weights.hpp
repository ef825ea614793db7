#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ppgsmc/errors.hpp"
#include "ppgsmc/rng.hpp"

namespace ppgsmc {

enum class ResamplingScheme { Multinomial, Systematic };

std::string to_string(ResamplingScheme s);
std::optional<ResamplingScheme> parse_scheme(const std::string& s);

namespace detail {
template <typename Derived>
typename Derived::Scalar pairwise_sum(const Eigen::DenseBase<Derived>& x, Eigen::Index lo, Eigen::Index hi) {
  const Eigen::Index n = hi - lo;
  if (n <= 16) {
    typename Derived::Scalar s(0);
    for (Eigen::Index i = lo; i < hi; ++i) s += x.derived().coeff(i);
    return s;
  }
  Eigen::Index mid = lo + n / 2;
  return pairwise_sum(x, lo, mid) + pairwise_sum(x, mid, hi);
}
}  // namespace detail

/// Sum in a fixed pairwise order; independent of how the vector was filled.
template <typename Derived>
typename Derived::Scalar pairwise_sum(const Eigen::DenseBase<Derived>& x) {
  return detail::pairwise_sum(x, 0, x.size());
}

template <typename Derived>
void check_weights(const Eigen::DenseBase<Derived>& W) {
  for (Eigen::Index i = 0; i < W.size(); ++i) {
    double w = W.derived().coeff(i);
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("weights must be finite and nonnegative");
  }
}

/// W / sum(W); the all-zero vector maps to uniform 1/N.
template <typename Derived>
Eigen::ArrayXd normalize_weights(const Eigen::DenseBase<Derived>& W, bool* was_zero = nullptr) {
  check_weights(W);
  const Eigen::Index n = W.size();
  double total = pairwise_sum(W);
  if (was_zero) *was_zero = total == 0.0;
  if (total == 0.0) return Eigen::ArrayXd::Constant(n, 1.0 / static_cast<double>(n));
  return W.derived().array().template cast<double>() / total;
}

/// (sum W)^2 / sum W^2.
template <typename Derived>
double ess(const Eigen::DenseBase<Derived>& W) {
  check_weights(W);
  Eigen::ArrayXd w = W.derived().array().template cast<double>();
  double s = pairwise_sum(w);
  if (s == 0.0) throw Error("degenerate ensemble: all weights are zero");
  double mx = w.maxCoeff();
  Eigen::ArrayXd r = w / mx;  // rescale so the squares cannot overflow or underflow
  double s1 = pairwise_sum(r);
  double s2 = pairwise_sum(r.square().eval());
  double e = s1 * s1 / s2;
  return std::clamp(e, 1.0, static_cast<double>(w.size()));
}

/// Indices of the N resampled rows, in increasing order for Systematic and in
/// draw order for Multinomial.
template <typename Derived>
std::vector<Eigen::Index> resample(ResamplingScheme scheme, const Eigen::DenseBase<Derived>& W, RngStream rng) {
  check_weights(W);
  const Eigen::Index n = W.size();
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 0) return out;
  Eigen::ArrayXd w = W.derived().array().template cast<double>();
  if (pairwise_sum(w) == 0.0) w.setOnes();

  // cumulative sums, sequential order
  Eigen::ArrayXd cum(n);
  double acc = 0.0;
  Eigen::Index last = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += w[i];
    cum[i] = acc;
    if (w[i] > 0.0) last = i;
  }
  const double total = acc;

  if (scheme == ResamplingScheme::Systematic) {
    // point j sits at u + j on the scaled axis [0, N); cell i is [C_{i-1}, C_i)
    // with C_i = N * cum_i / total. Points below C: ceil(C - u).
    const double u = rng.uniform();
    const double nd = static_cast<double>(n);
    Eigen::Index placed = 0;
    for (Eigen::Index i = 0; i < n && placed < n; ++i) {
      double c = i >= last ? nd : (cum[i] * nd) / total;
      auto below = static_cast<Eigen::Index>(std::ceil(c - u));
      below = std::clamp<Eigen::Index>(below, placed, n);
      for (; placed < below; ++placed) out.push_back(i);
    }
    return out;
  }

  for (Eigen::Index j = 0; j < n; ++j) {
    double target = rng.uniform() * total;
    auto it = std::upper_bound(cum.data(), cum.data() + n, target);
    Eigen::Index i = it - cum.data();
    out.push_back(std::min(i, last));
  }
  return out;
}

}  // namespace ppgsmc
