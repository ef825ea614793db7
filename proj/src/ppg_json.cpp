#include "ppgsmc/ppg_json.hpp"

#include <cmath>

#include <json.hpp>

#include "ppgsmc/errors.hpp"

namespace ppgsmc {

using nlohmann::json;

namespace {

json expr_json(const Expr& e) {
  switch (e.op) {
    case Op::Literal:
      if (!e.text.empty()) return json::array({"lit", e.text});
      if (std::isinf(e.value)) return json::array({"lit", e.value > 0 ? "inf" : "-inf"});
      return e.value;
    case Op::Var: return json::array({"x", e.var});
    default: break;
  }
  json a = json::array({op_name(e.op)});
  for (const auto& c : e.args) a.push_back(expr_json(c));
  return a;
}

Op op_from_name(const std::string& s) {
  for (int i = static_cast<int>(Op::Add); i <= static_cast<int>(Op::Log); ++i)
    if (s == op_name(static_cast<Op>(i))) return static_cast<Op>(i);
  throw StructureError("unknown operator '" + s + "'");
}

Expr expr_from(const json& j) {
  if (j.is_number()) return lit(j.get<double>());
  if (!j.is_array() || j.empty() || !j[0].is_string()) throw StructureError("malformed expression " + j.dump());
  std::string head = j[0].get<std::string>();
  if (head == "lit") {
    if (j.size() != 2 || !j[1].is_string()) throw StructureError("malformed literal " + j.dump());
    std::string t = j[1].get<std::string>();
    if (t == "inf") return lit(ext::inf);
    if (t == "-inf") return lit(-ext::inf);
    return lit(t);
  }
  if (head == "x") {
    if (j.size() != 2 || !j[1].is_number_integer()) throw StructureError("malformed variable " + j.dump());
    return var(j[1].get<int>());
  }
  Op op = op_from_name(head);
  if (static_cast<int>(j.size()) - 1 != arity(op)) throw StructureError("wrong arity in " + j.dump());
  if (arity(op) == 1) return apply(op, expr_from(j[1]));
  return apply(op, expr_from(j[1]), expr_from(j[2]));
}

json dist_json(const DistributionSpec& d) {
  json p = json::array();
  for (const auto& e : d.params) p.push_back(expr_json(e));
  return {{"dist", dist_name(d.kind)}, {"params", p}};
}

DistributionSpec dist_from(const json& j) {
  std::string name = j.at("dist").get<std::string>();
  for (int k = 0; k <= static_cast<int>(DistKind::Dirac); ++k) {
    if (name != dist_name(static_cast<DistKind>(k))) continue;
    std::vector<Expr> params;
    for (const auto& p : j.at("params")) params.push_back(expr_from(p));
    return make_dist(static_cast<DistKind>(k), std::move(params));
  }
  throw StructureError("unknown distribution '" + name + "'");
}

json score_json(const ScoreSpec& s) {
  switch (s.kind) {
    case ScoreSpec::Kind::One: return {{"kind", "one"}};
    case ScoreSpec::Kind::Pred: return {{"kind", "pred"}, {"expr", expr_json(s.expr)}};
    case ScoreSpec::Kind::Clamped: return {{"kind", "clamped"}, {"expr", expr_json(s.expr)}};
    case ScoreSpec::Kind::DensityRatio:
      return {{"kind", "density_ratio"},
              {"dist", dist_json(s.dist)},
              {"at", expr_json(s.expr)},
              {"normalizer", expr_json(s.normalizer)}};
    case ScoreSpec::Kind::Product: {
      json f = json::array();
      for (const auto& x : s.factors) f.push_back(score_json(x));
      return {{"kind", "product"}, {"factors", f}};
    }
  }
  return {};
}

ScoreSpec score_from(const json& j) {
  std::string k = j.at("kind").get<std::string>();
  if (k == "one") return score_one();
  if (k == "pred") {
    ScoreSpec s;
    s.kind = ScoreSpec::Kind::Pred;
    s.expr = expr_from(j.at("expr"));
    return s;
  }
  if (k == "clamped") return score_clamped(expr_from(j.at("expr")));
  if (k == "density_ratio")
    return score_density_ratio(dist_from(j.at("dist")), expr_from(j.at("at")), expr_from(j.at("normalizer")));
  if (k == "product") {
    ScoreSpec s;
    s.kind = ScoreSpec::Kind::Product;
    for (const auto& f : j.at("factors")) s.factors.push_back(score_from(f));
    return s;
  }
  throw StructureError("unknown score kind '" + k + "'");
}

}  // namespace

std::string ppg_to_json(const PPG& g, int indent) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["var_count"] = g.var_count;
  j["var_names"] = g.var_names;
  j["checkpoints"] = g.checkpoints;
  j["nil"] = g.nil;
  json scores = json::array();
  for (const auto& s : g.scores) scores.push_back(score_json(s));
  j["scores"] = scores;
  json ts = json::array();
  for (const auto& t : g.transitions) {
    json k = json::array();
    for (const auto& st : t.kernel.steps) {
      if (st.kind == KernelStep::Kind::Assign)
        k.push_back({{"assign", st.target}, {"value", expr_json(st.value)}});
      else
        k.push_back({{"sample", st.target}, {"dist", dist_json(st.dist)}});
    }
    json tj = json::object();
    tj["source"] = t.source;
    tj["guard"] = expr_json(t.guard);
    tj["kernel"] = k;
    tj["target"] = t.target;
    ts.push_back(tj);
  }
  j["transitions"] = ts;
  return j.dump(indent);
}

PPG ppg_from_json(const std::string& text) {
  PPG g;
  try {
    json j = json::parse(text);
    g.var_count = j.at("var_count").get<int>();
    if (j.contains("var_names")) g.var_names = j.at("var_names").get<std::vector<std::string>>();
    g.checkpoints = j.at("checkpoints").get<std::vector<std::string>>();
    g.nil = j.at("nil").get<int>();
    for (const auto& s : j.at("scores")) g.scores.push_back(score_from(s));
    for (const auto& t : j.at("transitions")) {
      Transition tr;
      tr.source = t.at("source").get<int>();
      tr.target = t.at("target").get<int>();
      tr.guard = expr_from(t.at("guard"));
      for (const auto& st : t.at("kernel")) {
        if (st.contains("assign"))
          tr.kernel.steps.push_back(assign(st.at("assign").get<int>(), expr_from(st.at("value"))));
        else
          tr.kernel.steps.push_back(sample_into(st.at("sample").get<int>(), dist_from(st.at("dist"))));
      }
      g.transitions.push_back(std::move(tr));
    }
  } catch (const json::exception& e) {
    throw StructureError(std::string("malformed PPG JSON: ") + e.what());
  }
  check_structure(g);
  return g;
}

}  // namespace ppgsmc
