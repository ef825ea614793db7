#pragma once

#include <cmath>
#include <limits>

namespace ppgsmc {

/// Arithmetic on R ∪ {±inf} with the conventions
///   0 * (±inf) = 0,  x / 0 = sign(x) * inf,  0 / 0 = 0,
/// and every other NaN-producing case (inf - inf, inf / inf, sqrt(-1), ...)
/// collapsed to 0. The same functors drive the scalar and the columnwise
/// evaluator so both paths round identically.
namespace ext {

inline constexpr double inf = std::numeric_limits<double>::infinity();

inline double clean(double x) { return std::isnan(x) ? 0.0 : x; }
inline double truth(bool b) { return b ? 1.0 : 0.0; }

struct Add { double operator()(double a, double b) const { return clean(a + b); } };
struct Sub { double operator()(double a, double b) const { return clean(a - b); } };
struct Mul {
  double operator()(double a, double b) const {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
  }
};
struct Div {
  double operator()(double a, double b) const {
    if (b == 0.0) {
      if (a == 0.0) return 0.0;
      return a > 0.0 ? inf : -inf;
    }
    return clean(a / b);
  }
};
struct Min { double operator()(double a, double b) const { return b < a ? b : a; } };
struct Max { double operator()(double a, double b) const { return a < b ? b : a; } };

struct Lt { double operator()(double a, double b) const { return truth(a < b); } };
struct Le { double operator()(double a, double b) const { return truth(a <= b); } };
struct Eq { double operator()(double a, double b) const { return truth(a == b); } };
struct Ne { double operator()(double a, double b) const { return truth(a != b); } };
struct Ge { double operator()(double a, double b) const { return truth(a >= b); } };
struct Gt { double operator()(double a, double b) const { return truth(a > b); } };
struct And { double operator()(double a, double b) const { return truth(a != 0.0 && b != 0.0); } };
struct Or { double operator()(double a, double b) const { return truth(a != 0.0 || b != 0.0); } };

struct Neg { double operator()(double a) const { return -a; } };
struct Abs { double operator()(double a) const { return std::fabs(a); } };
struct Not { double operator()(double a) const { return truth(a == 0.0); } };
struct Iverson { double operator()(double a) const { return truth(a != 0.0); } };
struct Sqrt { double operator()(double a) const { return a < 0.0 ? 0.0 : std::sqrt(a); } };
struct Exp { double operator()(double a) const { return std::exp(a); } };
struct Log {
  double operator()(double a) const {
    if (a < 0.0) return 0.0;
    return std::log(a);  // log(0) = -inf
  }
};

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace ext
}  // namespace ppgsmc
