#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ppgsmc/extended_real.hpp"

namespace ppgsmc {

enum class Op : std::uint8_t {
  Literal, Var,
  Add, Sub, Mul, Div, Min, Max,
  Lt, Le, Eq, Ne, Ge, Gt, And, Or,
  Neg, Abs, Not, Iverson, Sqrt, Exp, Log
};

/// Expression tree over store variables. Value type; children owned.
struct Expr {
  Op op = Op::Literal;
  double value = 0.0;  // Literal
  std::string text;    // Literal spelling, used by exact arithmetic when present
  int var = -1;        // Var
  std::vector<Expr> args;

  bool operator==(const Expr&) const = default;
};

int arity(Op op);
const char* op_name(Op op);
bool is_predicate(const Expr& e);
void collect_vars(const Expr& e, std::set<int>& out);
std::set<int> vars_read(const Expr& e);
int max_var(const Expr& e);  // -1 if none

Expr lit(double v);
Expr lit(const std::string& spelling);  // decimal or a/b
Expr var(int i);
Expr apply(Op op, Expr a);
Expr apply(Op op, Expr a, Expr b);

inline Expr operator+(Expr a, Expr b) { return apply(Op::Add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return apply(Op::Sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return apply(Op::Mul, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return apply(Op::Div, std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return apply(Op::Neg, std::move(a)); }
inline Expr operator<(Expr a, Expr b) { return apply(Op::Lt, std::move(a), std::move(b)); }
inline Expr operator<=(Expr a, Expr b) { return apply(Op::Le, std::move(a), std::move(b)); }
inline Expr operator>(Expr a, Expr b) { return apply(Op::Gt, std::move(a), std::move(b)); }
inline Expr operator>=(Expr a, Expr b) { return apply(Op::Ge, std::move(a), std::move(b)); }
inline Expr operator&&(Expr a, Expr b) { return apply(Op::And, std::move(a), std::move(b)); }
inline Expr operator||(Expr a, Expr b) { return apply(Op::Or, std::move(a), std::move(b)); }
inline Expr operator!(Expr a) { return apply(Op::Not, std::move(a)); }
inline Expr eq(Expr a, Expr b) { return apply(Op::Eq, std::move(a), std::move(b)); }
inline Expr ne(Expr a, Expr b) { return apply(Op::Ne, std::move(a), std::move(b)); }
inline Expr abs(Expr a) { return apply(Op::Abs, std::move(a)); }
inline Expr min(Expr a, Expr b) { return apply(Op::Min, std::move(a), std::move(b)); }
inline Expr max(Expr a, Expr b) { return apply(Op::Max, std::move(a), std::move(b)); }
inline Expr iverson(Expr a) { return apply(Op::Iverson, std::move(a)); }
inline Expr truth() { return lit(1.0); }

/// Coerce to a 0/1 expression (wraps non-predicates in [e != 0]).
Expr as_predicate(Expr e);

/// Infix rendering; names may be empty (then x0, x1, ...).
std::string to_string(const Expr& e, const std::vector<std::string>& names = {});

/// Number-type hooks for evaluate_as. Specialized for double here and for
/// the exact rational type in oracle.hpp.
template <typename Scalar>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static double literal(const Expr& e) { return e.value; }
  static double load(double v) { return v; }
  static double binary(Op op, double a, double b) {
    switch (op) {
      case Op::Add: return ext::Add{}(a, b);
      case Op::Sub: return ext::Sub{}(a, b);
      case Op::Mul: return ext::Mul{}(a, b);
      case Op::Div: return ext::Div{}(a, b);
      case Op::Min: return ext::Min{}(a, b);
      case Op::Max: return ext::Max{}(a, b);
      case Op::Lt: return ext::Lt{}(a, b);
      case Op::Le: return ext::Le{}(a, b);
      case Op::Eq: return ext::Eq{}(a, b);
      case Op::Ne: return ext::Ne{}(a, b);
      case Op::Ge: return ext::Ge{}(a, b);
      case Op::Gt: return ext::Gt{}(a, b);
      case Op::And: return ext::And{}(a, b);
      case Op::Or: return ext::Or{}(a, b);
      default: return 0.0;
    }
  }
  static double unary(Op op, double a) {
    switch (op) {
      case Op::Neg: return ext::Neg{}(a);
      case Op::Abs: return ext::Abs{}(a);
      case Op::Not: return ext::Not{}(a);
      case Op::Iverson: return ext::Iverson{}(a);
      case Op::Sqrt: return ext::Sqrt{}(a);
      case Op::Exp: return ext::Exp{}(a);
      case Op::Log: return ext::Log{}(a);
      default: return 0.0;
    }
  }
};

/// Evaluate on any indexable store (Eigen vector, matrix row, std::vector).
template <typename Scalar, typename Store>
Scalar evaluate_as(const Expr& e, const Store& v) {
  using O = ScalarOps<Scalar>;
  switch (e.op) {
    case Op::Literal: return O::literal(e);
    case Op::Var: return O::load(static_cast<double>(v[e.var]));
    default: break;
  }
  if (e.args.size() == 1) return O::unary(e.op, evaluate_as<Scalar>(e.args[0], v));
  return O::binary(e.op, evaluate_as<Scalar>(e.args[0], v), evaluate_as<Scalar>(e.args[1], v));
}

template <typename Store>
double evaluate(const Expr& e, const Store& v) {
  return evaluate_as<double>(e, v);
}

/// Columnwise evaluation over the rows of V; bit-identical to evaluate()
/// applied row by row.
Eigen::ArrayXd evaluate_columns(const Expr& e, const Eigen::Ref<const Eigen::MatrixXd>& V);

}  // namespace ppgsmc
