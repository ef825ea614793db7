#pragma once

#include <span>
#include <string>
#include <vector>

#include "ppgsmc/expr.hpp"
#include "ppgsmc/rng.hpp"

namespace ppgsmc {

enum class DistKind { Bernoulli, Uniform, Normal, TruncNormal, DiscreteUniform, Dirac };

/// Parameters, in order:
///   Bernoulli(p)  Uniform(a, b)  Normal(mean, sd)  TruncNormal(lo, hi, mean, sd)
///   DiscreteUniform(items...)  Dirac(value)
struct DistributionSpec {
  DistKind kind = DistKind::Dirac;
  std::vector<Expr> params;

  bool operator==(const DistributionSpec&) const = default;
};

const char* dist_name(DistKind k);
int param_count(DistKind k);  // -1 for variadic
bool is_discrete(DistKind k);
DistributionSpec make_dist(DistKind k, std::vector<Expr> params);  // arity checked

inline DistributionSpec bernoulli(Expr p) { return make_dist(DistKind::Bernoulli, {std::move(p)}); }
inline DistributionSpec uniform(Expr a, Expr b) { return make_dist(DistKind::Uniform, {std::move(a), std::move(b)}); }
inline DistributionSpec normal(Expr m, Expr sd) { return make_dist(DistKind::Normal, {std::move(m), std::move(sd)}); }
inline DistributionSpec dirac(Expr v) { return make_dist(DistKind::Dirac, {std::move(v)}); }

/// Out-of-domain parameters (Bernoulli p outside [0,1], sd 0 or infinite,
/// empty interval, ...) select the default distribution, Dirac at 0.
bool params_valid(DistKind k, std::span<const double> params);

/// Draws from the resolved distribution; *defaulted set when the default
/// was used. Draw counts are fixed per kind so streams stay aligned.
double sample(DistKind k, std::span<const double> params, RngStream& rng, bool* defaulted = nullptr);

/// Density w.r.t. counting (discrete) or Lebesgue (continuous) measure.
double density(DistKind k, std::span<const double> params, double x);

double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace ppgsmc
