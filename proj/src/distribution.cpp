#include "ppgsmc/distribution.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "ppgsmc/errors.hpp"

namespace ppgsmc {

const char* dist_name(DistKind k) {
  switch (k) {
    case DistKind::Bernoulli: return "Bernoulli";
    case DistKind::Uniform: return "Uniform";
    case DistKind::Normal: return "Normal";
    case DistKind::TruncNormal: return "TruncNormal";
    case DistKind::DiscreteUniform: return "DiscreteUniform";
    case DistKind::Dirac: return "Dirac";
  }
  return "?";
}

int param_count(DistKind k) {
  switch (k) {
    case DistKind::Bernoulli: return 1;
    case DistKind::Uniform: return 2;
    case DistKind::Normal: return 2;
    case DistKind::TruncNormal: return 4;
    case DistKind::DiscreteUniform: return -1;
    case DistKind::Dirac: return 1;
  }
  return 0;
}

bool is_discrete(DistKind k) {
  return k == DistKind::Bernoulli || k == DistKind::DiscreteUniform || k == DistKind::Dirac;
}

DistributionSpec make_dist(DistKind k, std::vector<Expr> params) {
  int n = param_count(k);
  if ((n >= 0 && static_cast<int>(params.size()) != n) || (n < 0 && params.empty()))
    throw StructureError(std::string(dist_name(k)) + ": wrong number of parameters");
  return DistributionSpec{k, std::move(params)};
}

namespace {

bool finite(double x) { return std::isfinite(x); }

bool sd_ok(double sd) { return finite(sd) && sd != 0.0; }

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// Mass of the standard normal on [a, b], computed in whichever tail keeps
// precision.
double normal_mass(double a, double b) {
  if (a > 0.0) return normal_cdf(-a) - normal_cdf(-b);
  return normal_cdf(b) - normal_cdf(a);
}

double trunc_normal_draw(double lo, double hi, double mean, double sd, double u) {
  double a = (lo - mean) / sd, b = (hi - mean) / sd;
  bool mirror = a > 0.0;
  if (mirror) {
    double t = a;
    a = -b;
    b = -t;
  }
  double pa = normal_cdf(a), pb = normal_cdf(b);
  double z;
  if (!(pb > pa)) {
    z = std::fmin(std::fmax(0.0, a), b);  // mass underflow: nearest point to the mode
  } else {
    z = normal_quantile(pa + u * (pb - pa));
    z = std::fmin(std::fmax(z, a), b);
  }
  if (mirror) z = -z;
  return mean + sd * z;
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (p <= 0.0) return -ext::inf;
  if (p >= 1.0) return ext::inf;
  // Acklam's rational approximation, then one Halley step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01, -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - plow) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  double e = normal_cdf(x) - p;
  double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
  x = x - u / (1 + x * u / 2);
  return x;
}

bool params_valid(DistKind k, std::span<const double> p) {
  switch (k) {
    case DistKind::Bernoulli: return p[0] >= 0.0 && p[0] <= 1.0;
    case DistKind::Uniform: return finite(p[0]) && finite(p[1]) && p[0] < p[1];
    case DistKind::Normal: return finite(p[0]) && sd_ok(p[1]);
    case DistKind::TruncNormal: return p[0] < p[1] && finite(p[2]) && sd_ok(p[3]);
    case DistKind::DiscreteUniform: return !p.empty();
    case DistKind::Dirac: return true;
  }
  return false;
}

double sample(DistKind k, std::span<const double> p, RngStream& rng, bool* defaulted) {
  bool ok = params_valid(k, p);
  if (defaulted) *defaulted = !ok;
  // Draw counts are fixed per kind whether or not the default is used.
  switch (k) {
    case DistKind::Bernoulli: {
      double u = rng.uniform();
      if (!ok) return 0.0;
      // mask select instead of a branch: coin flips at p = 1/2 defeat the predictor
      std::uint64_t m = std::uint64_t{0} - static_cast<std::uint64_t>(u < p[0]);
      return std::bit_cast<double>(m & std::bit_cast<std::uint64_t>(1.0));
    }
    case DistKind::Uniform: {
      double u = rng.uniform();
      if (!ok) return 0.0;
      double x = p[0] + (p[1] - p[0]) * u;
      return x < p[1] ? x : p[0];
    }
    case DistKind::Normal: {
      double u1 = rng.uniform_open(), u2 = rng.uniform();
      if (!ok) return 0.0;
      double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      return p[0] + std::fabs(p[1]) * z;
    }
    case DistKind::TruncNormal: {
      double u = rng.uniform_open();
      if (!ok) return 0.0;
      return trunc_normal_draw(p[0], p[1], p[2], std::fabs(p[3]), u);
    }
    case DistKind::DiscreteUniform: {
      double u = rng.uniform();
      if (!ok) return 0.0;
      auto n = p.size();
      auto i = static_cast<std::size_t>(u * static_cast<double>(n));
      return p[i < n ? i : n - 1];
    }
    case DistKind::Dirac: return p[0];
  }
  return 0.0;
}

double density(DistKind k, std::span<const double> p, double x) {
  if (!params_valid(k, p)) return x == 0.0 ? 1.0 : 0.0;
  switch (k) {
    case DistKind::Bernoulli:
      if (x == 1.0) return p[0];
      if (x == 0.0) return 1.0 - p[0];
      return 0.0;
    case DistKind::Uniform: return (x >= p[0] && x <= p[1]) ? 1.0 / (p[1] - p[0]) : 0.0;
    case DistKind::Normal: {
      double sd = std::fabs(p[1]);
      if (!finite(x)) return 0.0;
      return phi((x - p[0]) / sd) / sd;
    }
    case DistKind::TruncNormal: {
      double sd = std::fabs(p[3]);
      if (x < p[0] || x > p[1] || !finite(x)) return 0.0;
      double mass = normal_mass((p[0] - p[2]) / sd, (p[1] - p[2]) / sd);
      return ext::Div{}(phi((x - p[2]) / sd) / sd, mass);
    }
    case DistKind::DiscreteUniform: {
      double hits = 0;
      for (double v : p) hits += (v == x);
      return hits / static_cast<double>(p.size());
    }
    case DistKind::Dirac: return x == p[0] ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace ppgsmc
