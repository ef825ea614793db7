#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ppgsmc/estimator.hpp"
#include "ppgsmc/ppg.hpp"

namespace ppgsmc {

using Rational = boost::multiprecision::cpp_rational;

/// Exact value of a finite double.
Rational exact_from_double(double x);
/// "3", "-0.25", "1e-3", "1/3".
Rational parse_rational(const std::string& text);
double to_double(const Rational& q);
std::string to_string(const Rational& q);

/// Exact evaluation; infinities and transcendental operators are outside
/// the enumerable fragment and throw NotEnumerable.
template <>
struct ScalarOps<Rational> {
  static Rational literal(const Expr& e);
  static Rational load(double v);
  static Rational binary(Op op, const Rational& a, const Rational& b);
  static Rational unary(Op op, const Rational& a);
};

struct ExactRow {
  Store store;
  Checkpoint checkpoint = 0;
  Rational probability;
  Rational weight;  // w_t along the path, in [0,1]
};

/// Rows of mu^t for a finite discrete program, merged on identical
/// (store, checkpoint, weight).
struct ExactTable {
  int horizon = 1;
  Checkpoint nil = 0;
  std::vector<std::string> var_names;
  std::vector<ExactRow> rows;

  Rational total_probability() const;
};

ExactTable enumerate(const PPG& g, Checkpoint s0, int t, std::size_t max_rows = 4'000'000);

struct ExactBounds {
  Rational payoff;             // [S]^t f_t 1_T w_t
  Rational total_weight;       // [S]^t w_t
  Rational terminated_weight;  // [S]^t 1_T w_t
  Rational beta_L;
  std::optional<Rational> beta_U;  // empty = +inf
  Rational alpha_t;
};

/// Trace form: ratios of path expectations over mu^t.
ExactBounds exact_semantics(const ExactTable& table, const TargetFunction& target);

struct FilteringAtom {
  Store store;
  Checkpoint checkpoint = 0;
  Rational mass;
};

/// Normalized time-t filtering distribution, merged by state.
std::vector<FilteringAtom> exact_filtering(const ExactTable& table);

/// Same bounds computed from the filtering distribution.
ExactBounds exact_filtering_bounds(const ExactTable& table, const TargetFunction& target);

/// Columns: variables, checkpoint, p_num, p_den, w_num, w_den.
void write_exact_csv(std::ostream& os, const ExactTable& table);

}  // namespace ppgsmc
