#include "ppgsmc/ppg.hpp"

#include <sstream>

#include "ppgsmc/errors.hpp"

namespace ppgsmc {

ScoreSpec score_pred(Expr p) {
  ScoreSpec s;
  s.kind = ScoreSpec::Kind::Pred;
  s.expr = as_predicate(std::move(p));
  return s;
}

ScoreSpec score_clamped(Expr e) {
  ScoreSpec s;
  s.kind = ScoreSpec::Kind::Clamped;
  s.expr = std::move(e);
  return s;
}

ScoreSpec score_density_ratio(DistributionSpec d, Expr at, Expr normalizer) {
  ScoreSpec s;
  s.kind = ScoreSpec::Kind::DensityRatio;
  s.dist = std::move(d);
  s.expr = std::move(at);
  s.normalizer = std::move(normalizer);
  return s;
}

ScoreSpec score_product(std::vector<ScoreSpec> factors) {
  std::vector<ScoreSpec> flat;
  for (auto& f : factors) {
    if (f.kind == ScoreSpec::Kind::One) continue;
    if (f.kind == ScoreSpec::Kind::Product) {
      for (auto& g : f.factors) flat.push_back(std::move(g));
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (flat.empty()) return score_one();
  if (flat.size() == 1) return std::move(flat[0]);
  ScoreSpec s;
  s.kind = ScoreSpec::Kind::Product;
  s.factors = std::move(flat);
  return s;
}

std::set<int> vars_read(const ScoreSpec& s) {
  std::set<int> out;
  switch (s.kind) {
    case ScoreSpec::Kind::One: break;
    case ScoreSpec::Kind::Pred:
    case ScoreSpec::Kind::Clamped: collect_vars(s.expr, out); break;
    case ScoreSpec::Kind::DensityRatio:
      collect_vars(s.expr, out);
      collect_vars(s.normalizer, out);
      for (const auto& p : s.dist.params) collect_vars(p, out);
      break;
    case ScoreSpec::Kind::Product:
      for (const auto& f : s.factors) {
        auto v = vars_read(f);
        out.insert(v.begin(), v.end());
      }
      break;
  }
  return out;
}

namespace {

void check_expr(const Expr& e, int m, const std::string& where) {
  if (e.op == Op::Var && (e.var < 0 || e.var >= m))
    throw StructureError(where + ": variable index " + std::to_string(e.var) + " out of range");
  if (static_cast<int>(e.args.size()) != arity(e.op))
    throw StructureError(where + ": operator " + op_name(e.op) + " has wrong arity");
  for (const auto& a : e.args) check_expr(a, m, where);
}

void check_dist(const DistributionSpec& d, int m, const std::string& where) {
  int n = param_count(d.kind);
  if ((n >= 0 && static_cast<int>(d.params.size()) != n) || (n < 0 && d.params.empty()))
    throw StructureError(where + ": " + dist_name(d.kind) + " has wrong parameter count");
  for (const auto& p : d.params) check_expr(p, m, where);
}

void check_score(const ScoreSpec& s, int m, const std::string& where) {
  switch (s.kind) {
    case ScoreSpec::Kind::One: break;
    case ScoreSpec::Kind::Pred:
    case ScoreSpec::Kind::Clamped: check_expr(s.expr, m, where); break;
    case ScoreSpec::Kind::DensityRatio:
      check_dist(s.dist, m, where);
      check_expr(s.expr, m, where);
      check_expr(s.normalizer, m, where);
      break;
    case ScoreSpec::Kind::Product:
      for (const auto& f : s.factors) check_score(f, m, where);
      break;
  }
}

double clamp_counted(double x, Diagnostics* diag) {
  if (x < 0.0 || x > 1.0) {
    if (diag) ++diag->score_clamps;
    return ext::clamp01(x);
  }
  return x;
}

thread_local std::vector<double> param_buf;

}  // namespace

void check_structure(const PPG& g) {
  const int n = g.size();
  const int m = g.var_count;
  if (n < 1) throw StructureError("PPG has no checkpoints");
  if (m < 0) throw StructureError("negative variable count");
  if (!g.var_names.empty() && static_cast<int>(g.var_names.size()) != m)
    throw StructureError("var_names length differs from var_count");
  if (g.nil < 0 || g.nil >= n) throw StructureError("nil index out of range");
  if (static_cast<int>(g.scores.size()) != n) throw StructureError("score map size differs from checkpoint count");
  for (int s = 0; s < n; ++s) check_score(g.scores[s], m, "score of checkpoint " + std::to_string(s));
  for (std::size_t i = 0; i < g.transitions.size(); ++i) {
    const auto& t = g.transitions[i];
    std::string where = "transition " + std::to_string(i);
    if (t.source < 0 || t.source >= n || t.target < 0 || t.target >= n)
      throw StructureError(where + ": checkpoint index out of range");
    check_expr(t.guard, m, where);
    if (!is_predicate(t.guard)) throw StructureError(where + ": guard is not predicate-typed");
    for (const auto& st : t.kernel.steps) {
      if (st.target < 0 || st.target >= m) throw StructureError(where + ": kernel target out of range");
      if (st.kind == KernelStep::Kind::Assign)
        check_expr(st.value, m, where);
      else
        check_dist(st.dist, m, where);
    }
  }
}

std::vector<std::vector<std::size_t>> outgoing(const PPG& g) {
  std::vector<std::vector<std::size_t>> out(g.size());
  for (std::size_t i = 0; i < g.transitions.size(); ++i) out[g.transitions[i].source].push_back(i);
  return out;
}

Store kernel_step(const KernelAction& k, const Store& v, RngStream& rng, Diagnostics* diag) {
  Store w = v;
  for (const auto& st : k.steps) {
    if (st.kind == KernelStep::Kind::Assign) {
      w[st.target] = evaluate(st.value, w);
      continue;
    }
    auto& buf = param_buf;
    buf.resize(st.dist.params.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = evaluate(st.dist.params[i], w);
    bool defaulted = false;
    w[st.target] = sample(st.dist.kind, buf, rng, &defaulted);
    if (defaulted && diag) ++diag->default_distributions;
  }
  return w;
}

void apply_kernel_columns(const KernelAction& k, Eigen::Ref<Eigen::MatrixXd> V,
                          std::span<RngStream> rngs, Diagnostics* diag) {
  const Eigen::Index n = V.rows();
  for (const auto& st : k.steps) {
    if (st.kind == KernelStep::Kind::Assign) {
      V.col(st.target) = evaluate_columns(st.value, V).matrix();
      continue;
    }
    const std::size_t np = st.dist.params.size();
    Eigen::ArrayXXd P(n, static_cast<Eigen::Index>(np));
    for (std::size_t i = 0; i < np; ++i) P.col(static_cast<Eigen::Index>(i)) = evaluate_columns(st.dist.params[i], V);
    auto& buf = param_buf;
    buf.resize(np);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (std::size_t i = 0; i < np; ++i) buf[i] = P(r, static_cast<Eigen::Index>(i));
      bool defaulted = false;
      V(r, st.target) = sample(st.dist.kind, buf, rngs[static_cast<std::size_t>(r)], &defaulted);
      if (defaulted && diag) ++diag->default_distributions;
    }
  }
}

double score_raw(const ScoreSpec& s, const Store& v) {
  switch (s.kind) {
    case ScoreSpec::Kind::One: return 1.0;
    case ScoreSpec::Kind::Pred:
    case ScoreSpec::Kind::Clamped: return evaluate(s.expr, v);
    case ScoreSpec::Kind::DensityRatio: {
      std::vector<double> p(s.dist.params.size());
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = evaluate(s.dist.params[i], v);
      return ext::Div{}(density(s.dist.kind, p, evaluate(s.expr, v)), evaluate(s.normalizer, v));
    }
    case ScoreSpec::Kind::Product: {
      double x = 1.0;
      for (const auto& f : s.factors) x = ext::Mul{}(x, score_raw(f, v));
      return x;
    }
  }
  return 1.0;
}

double score_value(const ScoreSpec& s, const Store& v, Diagnostics* diag) {
  if (s.kind == ScoreSpec::Kind::Product) {
    double x = 1.0;
    for (const auto& f : s.factors) x = ext::Mul{}(x, score_value(f, v, diag));
    return x;
  }
  if (s.kind == ScoreSpec::Kind::One) return 1.0;
  return clamp_counted(score_raw(s, v), diag);
}

double score_at(const PPG& g, Checkpoint s, const Store& v, Diagnostics* diag) {
  if (s < 0 || s >= g.size()) throw StructureError("checkpoint index out of range");
  if (s == g.nil) return 1.0;
  return score_value(g.scores[s], v, diag);
}

Eigen::ArrayXd score_columns(const ScoreSpec& s, const Eigen::Ref<const Eigen::MatrixXd>& V, Diagnostics* diag) {
  const Eigen::Index n = V.rows();
  switch (s.kind) {
    case ScoreSpec::Kind::One: return Eigen::ArrayXd::Ones(n);
    case ScoreSpec::Kind::Product: {
      Eigen::ArrayXd x = Eigen::ArrayXd::Ones(n);
      for (const auto& f : s.factors) x = x.binaryExpr(score_columns(f, V, diag), ext::Mul{});
      return x;
    }
    case ScoreSpec::Kind::Pred:
    case ScoreSpec::Kind::Clamped: {
      Eigen::ArrayXd x = evaluate_columns(s.expr, V);
      for (Eigen::Index r = 0; r < n; ++r) x[r] = clamp_counted(x[r], diag);
      return x;
    }
    case ScoreSpec::Kind::DensityRatio: {
      const std::size_t np = s.dist.params.size();
      Eigen::ArrayXXd P(n, static_cast<Eigen::Index>(np));
      for (std::size_t i = 0; i < np; ++i) P.col(static_cast<Eigen::Index>(i)) = evaluate_columns(s.dist.params[i], V);
      Eigen::ArrayXd at = evaluate_columns(s.expr, V);
      Eigen::ArrayXd norm = evaluate_columns(s.normalizer, V);
      Eigen::ArrayXd x(n);
      std::vector<double> p(np);
      for (Eigen::Index r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < np; ++i) p[i] = P(r, static_cast<Eigen::Index>(i));
        x[r] = clamp_counted(ext::Div{}(density(s.dist.kind, p, at[r]), norm[r]), diag);
      }
      return x;
    }
  }
  return Eigen::ArrayXd::Ones(n);
}

std::string to_string(const DistributionSpec& d, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << dist_name(d.kind) << '(';
  for (std::size_t i = 0; i < d.params.size(); ++i) {
    if (i) os << ", ";
    os << to_string(d.params[i], names);
  }
  os << ')';
  return os.str();
}

std::string to_string(const KernelAction& k, const std::vector<std::string>& names) {
  if (k.empty()) return "id";
  std::ostringstream os;
  for (std::size_t i = 0; i < k.steps.size(); ++i) {
    const auto& st = k.steps[i];
    if (i) os << "; ";
    std::string t = st.target < static_cast<int>(names.size()) ? names[st.target] : "x" + std::to_string(st.target);
    if (st.kind == KernelStep::Kind::Assign)
      os << t << " := " << to_string(st.value, names);
    else
      os << t << " ~ " << to_string(st.dist, names);
  }
  return os.str();
}

std::string to_string(const ScoreSpec& s, const std::vector<std::string>& names) {
  switch (s.kind) {
    case ScoreSpec::Kind::One: return "1";
    case ScoreSpec::Kind::Pred: return "[" + to_string(s.expr, names) + "]";
    case ScoreSpec::Kind::Clamped: return "clamp(" + to_string(s.expr, names) + ")";
    case ScoreSpec::Kind::DensityRatio:
      return "density_ratio(" + to_string(s.dist, names) + ", " + to_string(s.expr, names) + ", " +
             to_string(s.normalizer, names) + ")";
    case ScoreSpec::Kind::Product: {
      std::string out;
      for (std::size_t i = 0; i < s.factors.size(); ++i) {
        if (i) out += " * ";
        out += to_string(s.factors[i], names);
      }
      return out;
    }
  }
  return "?";
}

}  // namespace ppgsmc
