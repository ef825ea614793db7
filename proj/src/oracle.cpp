#include "ppgsmc/oracle.hpp"

#include <cmath>
#include <map>
#include <ostream>

namespace ppgsmc {

using boost::multiprecision::cpp_int;

Rational exact_from_double(double x) {
  if (!std::isfinite(x)) throw NotEnumerable("infinite value");
  if (x == 0.0) return Rational(0);
  int e = 0;
  double m = std::frexp(x, &e);
  auto mant = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  cpp_int num = mant;
  if (e >= 0) return Rational(num << e);
  cpp_int den = 1;
  den <<= -e;
  return Rational(num, den);
}

namespace {

Rational parse_decimal(std::string s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s = s.substr(1);
  }
  long exp10 = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string::npos) {
    exp10 = std::stol(s.substr(epos + 1));
    s = s.substr(0, epos);
  }
  auto dot = s.find('.');
  std::string digits = s;
  if (dot != std::string::npos) {
    digits = s.substr(0, dot) + s.substr(dot + 1);
    exp10 -= static_cast<long>(s.size() - dot - 1);
  }
  if (digits.empty()) throw Error("bad numeric literal");
  for (char c : digits)
    if (c < '0' || c > '9') throw Error("bad numeric literal '" + s + "'");
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));  // no octal
  cpp_int n(digits);
  cpp_int p = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::labs(exp10)));
  Rational q = exp10 >= 0 ? Rational(n * p) : Rational(n, p);
  return neg ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  Rational den = parse_decimal(text.substr(slash + 1));
  Rational num = parse_decimal(text.substr(0, slash));
  if (den == 0) {
    if (num == 0) return Rational(0);
    throw NotEnumerable("division by zero yields infinity");
  }
  return num / den;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

Rational ScalarOps<Rational>::literal(const Expr& e) {
  if (!e.text.empty()) return parse_rational(e.text);
  return exact_from_double(e.value);
}

Rational ScalarOps<Rational>::load(double v) { return exact_from_double(v); }

Rational ScalarOps<Rational>::binary(Op op, const Rational& a, const Rational& b) {
  auto t = [](bool x) { return Rational(x ? 1 : 0); };
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (b == 0) {
        if (a == 0) return Rational(0);
        throw NotEnumerable("division by zero yields infinity");
      }
      return a / b;
    case Op::Min: return b < a ? b : a;
    case Op::Max: return a < b ? b : a;
    case Op::Lt: return t(a < b);
    case Op::Le: return t(a <= b);
    case Op::Eq: return t(a == b);
    case Op::Ne: return t(a != b);
    case Op::Ge: return t(a >= b);
    case Op::Gt: return t(a > b);
    case Op::And: return t(a != 0 && b != 0);
    case Op::Or: return t(a != 0 || b != 0);
    default: break;
  }
  throw NotEnumerable(std::string("operator ") + op_name(op));
}

Rational ScalarOps<Rational>::unary(Op op, const Rational& a) {
  switch (op) {
    case Op::Neg: return -a;
    case Op::Abs: return a < 0 ? Rational(-a) : a;
    case Op::Not: return Rational(a == 0 ? 1 : 0);
    case Op::Iverson: return Rational(a != 0 ? 1 : 0);
    default: break;
  }
  throw NotEnumerable(std::string("operator ") + op_name(op) + " has no exact value");
}

Rational ExactTable::total_probability() const {
  Rational s = 0;
  for (const auto& r : rows) s += r.probability;
  return s;
}

namespace {

struct Branch {
  Store store;
  Rational prob;
};

// All outcomes of a kernel on one store, with exact probabilities.
void expand_kernel(const KernelAction& k, std::size_t i, Store v, const Rational& p, std::vector<Branch>& out) {
  if (i == k.steps.size()) {
    out.push_back({std::move(v), p});
    return;
  }
  const KernelStep& st = k.steps[i];
  if (st.kind == KernelStep::Kind::Assign) {
    v[st.target] = evaluate(st.value, v);
    expand_kernel(k, i + 1, std::move(v), p, out);
    return;
  }
  const auto& d = st.dist;
  if (!is_discrete(d.kind)) throw NotEnumerable(std::string("continuous distribution ") + dist_name(d.kind));
  std::vector<double> params(d.params.size());
  for (std::size_t j = 0; j < params.size(); ++j) params[j] = evaluate(d.params[j], v);
  auto branch = [&](double value, const Rational& q) {
    if (q == 0) return;
    Store w = v;
    w[st.target] = value;
    expand_kernel(k, i + 1, std::move(w), p * q, out);
  };
  if (!params_valid(d.kind, params)) {
    branch(0.0, Rational(1));
    return;
  }
  switch (d.kind) {
    case DistKind::Bernoulli: {
      Rational q = evaluate_as<Rational>(d.params[0], v);
      if (q < 0 || q > 1) {
        branch(0.0, Rational(1));
        return;
      }
      branch(1.0, q);
      branch(0.0, 1 - q);
      return;
    }
    case DistKind::DiscreteUniform: {
      Rational q(1, static_cast<long long>(params.size()));
      for (double x : params) branch(x, q);
      return;
    }
    case DistKind::Dirac: branch(params[0], Rational(1)); return;
    default: throw NotEnumerable();
  }
}

Rational exact_density(DistKind k, const std::vector<Rational>& p, const Rational& x) {
  switch (k) {
    case DistKind::Bernoulli:
      if (p[0] < 0 || p[0] > 1) return Rational(x == 0 ? 1 : 0);
      if (x == 1) return p[0];
      if (x == 0) return 1 - p[0];
      return Rational(0);
    case DistKind::DiscreteUniform: {
      long long hits = 0;
      for (const auto& v : p) hits += (v == x);
      return Rational(hits, static_cast<long long>(p.size()));
    }
    case DistKind::Dirac: return Rational(x == p[0] ? 1 : 0);
    default: throw NotEnumerable(std::string("continuous density ") + dist_name(k));
  }
}

Rational clamp01(const Rational& x) {
  if (x < 0) return Rational(0);
  if (x > 1) return Rational(1);
  return x;
}

Rational exact_score(const ScoreSpec& s, const Store& v) {
  switch (s.kind) {
    case ScoreSpec::Kind::One: return Rational(1);
    case ScoreSpec::Kind::Pred:
    case ScoreSpec::Kind::Clamped: return clamp01(evaluate_as<Rational>(s.expr, v));
    case ScoreSpec::Kind::DensityRatio: {
      std::vector<Rational> p;
      for (const auto& e : s.dist.params) p.push_back(evaluate_as<Rational>(e, v));
      Rational num = exact_density(s.dist.kind, p, evaluate_as<Rational>(s.expr, v));
      return clamp01(ScalarOps<Rational>::binary(Op::Div, num, evaluate_as<Rational>(s.normalizer, v)));
    }
    case ScoreSpec::Kind::Product: {
      Rational x = 1;
      for (const auto& f : s.factors) x *= exact_score(f, v);
      return x;
    }
  }
  return Rational(1);
}

struct StoreLess {
  bool operator()(const Store& a, const Store& b) const {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (b[i] < a[i]) return false;
    }
    return false;
  }
};

struct RowKey {
  Store store;
  Checkpoint checkpoint;
  Rational weight;
};

struct RowKeyLess {
  bool operator()(const RowKey& a, const RowKey& b) const {
    if (a.checkpoint != b.checkpoint) return a.checkpoint < b.checkpoint;
    StoreLess sl;
    if (sl(a.store, b.store)) return true;
    if (sl(b.store, a.store)) return false;
    return a.weight < b.weight;
  }
};

Rational exact_score_at(const PPG& g, Checkpoint s, const Store& v) {
  if (s == g.nil) return Rational(1);
  return exact_score(g.scores[s], v);
}

}  // namespace

ExactTable enumerate(const PPG& g, Checkpoint s0, int t, std::size_t max_rows) {
  check_structure(g);
  if (t < 1) throw Error("horizon must be at least 1");
  if (s0 < 0 || s0 >= g.size()) throw StructureError("start checkpoint out of range");
  const auto out = outgoing(g);
  ExactTable table;
  table.horizon = t;
  table.nil = g.nil;
  table.var_names = g.var_names;
  Store zero = Store::Zero(g.var_count);
  table.rows.push_back({zero, s0, Rational(1), exact_score_at(g, s0, zero)});

  for (int k = 2; k <= t; ++k) {
    std::map<RowKey, Rational, RowKeyLess> next;
    std::vector<Branch> branches;
    for (const auto& row : table.rows) {
      int chosen = -1;
      for (auto e : out[row.checkpoint]) {
        if (evaluate(g.transitions[e].guard, row.store) != 0.0) {
          chosen = static_cast<int>(e);
          break;
        }
      }
      Checkpoint target = row.checkpoint;
      branches.clear();
      if (chosen < 0) {
        branches.push_back({row.store, Rational(1)});
      } else {
        expand_kernel(g.transitions[chosen].kernel, 0, row.store, Rational(1), branches);
        target = g.transitions[chosen].target;
      }
      for (auto& b : branches) {
        Rational w = row.weight;
        if (w != 0) w *= exact_score_at(g, target, b.store);
        next[RowKey{std::move(b.store), target, w}] += row.probability * b.prob;
        if (next.size() > max_rows) throw Error("enumeration exceeded row limit");
      }
    }
    table.rows.clear();
    for (auto& [key, p] : next) table.rows.push_back({key.store, key.checkpoint, p, key.weight});
  }
  return table;
}

namespace {

ExactBounds finish(Rational payoff, Rational total, Rational terminated, const TargetFunction& target, bool signed_h) {
  if (terminated == 0) throw EstimationError("no terminated weight at horizon t; increase t");
  ExactBounds b;
  b.payoff = payoff;
  b.total_weight = total;
  b.terminated_weight = terminated;
  b.alpha_t = total / terminated;
  if (signed_h && b.alpha_t != 1)
    throw EstimationError("target takes negative values and terminated mass < 1; bounds need h >= 0");
  b.beta_L = payoff / total;
  if (b.alpha_t == 1)
    b.beta_U = b.beta_L;
  else if (std::isfinite(target.bound))
    b.beta_U = b.beta_L * b.alpha_t + exact_from_double(target.bound) * (b.alpha_t - 1);
  return b;
}

}  // namespace

ExactBounds exact_semantics(const ExactTable& table, const TargetFunction& target) {
  Rational payoff = 0, total = 0, terminated = 0;
  bool signed_h = false;
  for (const auto& r : table.rows) {
    Rational pw = r.probability * r.weight;
    total += pw;
    if (r.checkpoint != table.nil || pw == 0) continue;
    terminated += pw;
    Rational h = evaluate_as<Rational>(target.h, r.store);
    if (h < 0) signed_h = true;
    if (std::isfinite(target.bound) && h > exact_from_double(target.bound))
      throw EstimationError("target value exceeds declared bound M");
    payoff += pw * h;
  }
  if (total == 0) throw EstimationError("no terminated weight at horizon t; increase t");
  return finish(payoff, total, terminated, target, signed_h);
}

std::vector<FilteringAtom> exact_filtering(const ExactTable& table) {
  Rational total = 0;
  for (const auto& r : table.rows) total += r.probability * r.weight;
  if (total == 0) throw EstimationError("all paths have zero weight");
  std::map<std::pair<Checkpoint, Store>, Rational, bool (*)(const std::pair<Checkpoint, Store>&,
                                                            const std::pair<Checkpoint, Store>&)>
      acc([](const std::pair<Checkpoint, Store>& a, const std::pair<Checkpoint, Store>& b) {
        if (a.first != b.first) return a.first < b.first;
        return StoreLess{}(a.second, b.second);
      });
  for (const auto& r : table.rows) {
    Rational pw = r.probability * r.weight;
    if (pw == 0) continue;
    acc[{r.checkpoint, r.store}] += pw / total;
  }
  std::vector<FilteringAtom> atoms;
  for (auto& [k, m] : acc) atoms.push_back({k.second, k.first, m});
  return atoms;
}

ExactBounds exact_filtering_bounds(const ExactTable& table, const TargetFunction& target) {
  Rational expect_h = 0, expect_term = 0;
  bool signed_h = false;
  for (const auto& a : exact_filtering(table)) {
    if (a.checkpoint != table.nil) continue;
    Rational h = evaluate_as<Rational>(target.h, a.store);
    if (h < 0) signed_h = true;
    expect_h += a.mass * h;
    expect_term += a.mass;
  }
  // E_phi[h] and E_phi[1_T] are the trace ratios with [S]^t w_t factored out
  ExactBounds b = finish(expect_h, Rational(1), expect_term, target, signed_h);
  b.payoff = expect_h;
  return b;
}

void write_exact_csv(std::ostream& os, const ExactTable& table) {
  const auto m = table.rows.empty() ? Eigen::Index(table.var_names.size()) : table.rows[0].store.size();
  for (Eigen::Index i = 0; i < m; ++i)
    os << (i < static_cast<Eigen::Index>(table.var_names.size()) ? table.var_names[i] : "x" + std::to_string(i))
       << ',';
  os << "checkpoint,p_num,p_den,w_num,w_den\n";
  auto old = os.precision(17);
  for (const auto& r : table.rows) {
    for (Eigen::Index i = 0; i < r.store.size(); ++i) os << r.store[i] << ',';
    os << r.checkpoint << ',' << numerator(r.probability) << ',' << denominator(r.probability) << ','
       << numerator(r.weight) << ',' << denominator(r.weight) << '\n';
  }
  os.precision(old);
}

}  // namespace ppgsmc
