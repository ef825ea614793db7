#include "ppgsmc/expr.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "ppgsmc/errors.hpp"

namespace ppgsmc {

int arity(Op op) {
  switch (op) {
    case Op::Literal:
    case Op::Var: return 0;
    case Op::Neg:
    case Op::Abs:
    case Op::Not:
    case Op::Iverson:
    case Op::Sqrt:
    case Op::Exp:
    case Op::Log: return 1;
    default: return 2;
  }
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Literal: return "lit";
    case Op::Var: return "x";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Min: return "min";
    case Op::Max: return "max";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Ge: return ">=";
    case Op::Gt: return ">";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Neg: return "neg";
    case Op::Abs: return "abs";
    case Op::Not: return "!";
    case Op::Iverson: return "iverson";
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
  }
  return "?";
}

bool is_predicate(const Expr& e) {
  switch (e.op) {
    case Op::Lt: case Op::Le: case Op::Eq: case Op::Ne: case Op::Ge: case Op::Gt:
    case Op::And: case Op::Or: case Op::Not: case Op::Iverson:
      return true;
    case Op::Literal:
      return e.value == 0.0 || e.value == 1.0;
    default:
      return false;
  }
}

void collect_vars(const Expr& e, std::set<int>& out) {
  if (e.op == Op::Var) out.insert(e.var);
  for (const auto& a : e.args) collect_vars(a, out);
}

std::set<int> vars_read(const Expr& e) {
  std::set<int> s;
  collect_vars(e, s);
  return s;
}

int max_var(const Expr& e) {
  int m = e.op == Op::Var ? e.var : -1;
  for (const auto& a : e.args) m = std::max(m, max_var(a));
  return m;
}

Expr lit(double v) {
  Expr e;
  e.value = v;
  return e;
}

Expr lit(const std::string& spelling) {
  Expr e;
  e.text = spelling;
  auto slash = spelling.find('/');
  if (slash == std::string::npos) {
    e.value = std::strtod(spelling.c_str(), nullptr);
  } else {
    e.value = ext::Div{}(std::strtod(spelling.substr(0, slash).c_str(), nullptr),
                         std::strtod(spelling.substr(slash + 1).c_str(), nullptr));
  }
  return e;
}

Expr var(int i) {
  Expr e;
  e.op = Op::Var;
  e.var = i;
  return e;
}

Expr apply(Op op, Expr a) {
  if (arity(op) != 1) throw StructureError(std::string("operator ") + op_name(op) + " is not unary");
  Expr e;
  e.op = op;
  e.args.push_back(std::move(a));
  return e;
}

Expr apply(Op op, Expr a, Expr b) {
  if (arity(op) != 2) throw StructureError(std::string("operator ") + op_name(op) + " is not binary");
  Expr e;
  e.op = op;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

Expr as_predicate(Expr e) {
  if (is_predicate(e)) return e;
  return ne(std::move(e), lit(0.0));
}

namespace {

int precedence(Op op) {
  switch (op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Lt: case Op::Le: case Op::Eq: case Op::Ne: case Op::Ge: case Op::Gt: return 3;
    case Op::Add: case Op::Sub: return 4;
    case Op::Mul: case Op::Div: return 5;
    case Op::Neg: case Op::Not: return 6;
    default: return 7;
  }
}

std::string literal_text(const Expr& e) {
  if (!e.text.empty()) return e.text;
  if (e.value == ext::inf) return "inf";
  if (e.value == -ext::inf) return "-inf";
  std::ostringstream os;
  os.precision(17);
  os << e.value;
  return os.str();
}

void render(const Expr& e, const std::vector<std::string>& names, std::ostream& os, int parent) {
  int p = precedence(e.op);
  switch (e.op) {
    case Op::Literal: os << literal_text(e); return;
    case Op::Var:
      if (e.var >= 0 && e.var < static_cast<int>(names.size()) && !names[e.var].empty())
        os << names[e.var];
      else
        os << 'x' << e.var;
      return;
    case Op::Abs: os << '|'; render(e.args[0], names, os, 0); os << '|'; return;
    case Op::Iverson: os << '['; render(e.args[0], names, os, 0); os << ']'; return;
    case Op::Min: case Op::Max: case Op::Sqrt: case Op::Exp: case Op::Log:
      os << op_name(e.op) << '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        render(e.args[i], names, os, 0);
      }
      os << ')';
      return;
    case Op::Neg: case Op::Not:
      os << (e.op == Op::Neg ? "-" : "!");
      render(e.args[0], names, os, p);
      return;
    default: break;
  }
  bool paren = p <= parent;
  if (paren) os << '(';
  render(e.args[0], names, os, p - 1);
  os << ' ' << op_name(e.op) << ' ';
  render(e.args[1], names, os, p);
  if (paren) os << ')';
}

}  // namespace

std::string to_string(const Expr& e, const std::vector<std::string>& names) {
  std::ostringstream os;
  render(e, names, os, 0);
  return os.str();
}

Eigen::ArrayXd evaluate_columns(const Expr& e, const Eigen::Ref<const Eigen::MatrixXd>& V) {
  const Eigen::Index n = V.rows();
  switch (e.op) {
    case Op::Literal: return Eigen::ArrayXd::Constant(n, e.value);
    case Op::Var: return V.col(e.var).array();
    default: break;
  }
  if (e.args.size() == 1) {
    Eigen::ArrayXd a = evaluate_columns(e.args[0], V);
    switch (e.op) {
      case Op::Neg: return a.unaryExpr(ext::Neg{});
      case Op::Abs: return a.unaryExpr(ext::Abs{});
      case Op::Not: return a.unaryExpr(ext::Not{});
      case Op::Iverson: return a.unaryExpr(ext::Iverson{});
      case Op::Sqrt: return a.unaryExpr(ext::Sqrt{});
      case Op::Exp: return a.unaryExpr(ext::Exp{});
      case Op::Log: return a.unaryExpr(ext::Log{});
      default: break;
    }
    return a;
  }
  Eigen::ArrayXd a = evaluate_columns(e.args[0], V);
  Eigen::ArrayXd b = evaluate_columns(e.args[1], V);
  switch (e.op) {
    case Op::Add: return a.binaryExpr(b, ext::Add{});
    case Op::Sub: return a.binaryExpr(b, ext::Sub{});
    case Op::Mul: return a.binaryExpr(b, ext::Mul{});
    case Op::Div: return a.binaryExpr(b, ext::Div{});
    case Op::Min: return a.binaryExpr(b, ext::Min{});
    case Op::Max: return a.binaryExpr(b, ext::Max{});
    case Op::Lt: return a.binaryExpr(b, ext::Lt{});
    case Op::Le: return a.binaryExpr(b, ext::Le{});
    case Op::Eq: return a.binaryExpr(b, ext::Eq{});
    case Op::Ne: return a.binaryExpr(b, ext::Ne{});
    case Op::Ge: return a.binaryExpr(b, ext::Ge{});
    case Op::Gt: return a.binaryExpr(b, ext::Gt{});
    case Op::And: return a.binaryExpr(b, ext::And{});
    case Op::Or: return a.binaryExpr(b, ext::Or{});
    default: break;
  }
  return a;
}

}  // namespace ppgsmc
