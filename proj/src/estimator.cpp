#include "ppgsmc/estimator.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace ppgsmc {

TargetFunction make_target(Expr h, std::optional<double> bound, std::string label) {
  TargetFunction t;
  t.bound = bound ? *bound : (is_predicate(h) ? 1.0 : ext::inf);
  t.h = std::move(h);
  t.label = std::move(label);
  return t;
}

namespace {

Eigen::ArrayXd effective_weights(const ParticleEnsemble& ens, Diagnostics* diag) {
  check_weights(ens.W);
  if (pairwise_sum(ens.W) == 0.0) {
    if (diag) ++diag->zero_weight_steps;
    return Eigen::ArrayXd::Ones(ens.size());
  }
  return ens.W.array();
}

}  // namespace

double filtering_expectation(const ParticleEnsemble& ens, const Expr& h, Diagnostics* diag) {
  Eigen::ArrayXd w = effective_weights(ens, diag);
  Eigen::ArrayXd hv = evaluate_columns(h, ens.V);
  return pairwise_sum(w.binaryExpr(hv, ext::Mul{}).eval()) / pairwise_sum(w);
}

double termination_mass(const ParticleEnsemble& ens, Checkpoint nil) {
  Eigen::ArrayXd w = effective_weights(ens, nullptr);
  Eigen::ArrayXd mask = (ens.Z.array() == nil).cast<double>();
  return pairwise_sum((w * mask).eval()) / pairwise_sum(w);
}

SummaryStat summarize(const std::vector<double>& xs) {
  SummaryStat s;
  if (xs.empty()) return s;
  double sum = 0;
  s.min = s.max = xs[0];
  for (double x : xs) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::isfinite(s.mean) ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  }
  return s;
}

EstimateReport bounds(const ParticleEnsemble& ens, Checkpoint nil, const TargetFunction& target) {
  EstimateReport r;
  r.diag = ens.diag;
  r.n_particles = ens.size();
  r.horizon = ens.step;
  r.bound = target.bound;
  r.target = target.label.empty() ? to_string(target.h) : target.label;

  Eigen::ArrayXd w = effective_weights(ens, &r.diag);
  Eigen::ArrayXd term = (ens.Z.array() == nil).cast<double>();
  Eigen::ArrayXd wt = w * term;
  const double total = pairwise_sum(w);
  const double terminated = pairwise_sum(wt);
  r.termination_mass = terminated / total;
  r.ess = ess(w);
  if (terminated == 0.0) throw EstimationError("no terminated weight at horizon t; increase t");

  Eigen::ArrayXd hv = evaluate_columns(target.h, ens.V);
  r.alpha_t = total / terminated;
  bool signed_h = false;
  for (Eigen::Index j = 0; j < hv.size(); ++j) {
    if (wt[j] == 0.0) continue;
    if (hv[j] < 0.0) signed_h = true;
    if (hv[j] > target.bound) {
      std::ostringstream os;
      os << "target value " << hv[j] << " exceeds declared bound M = " << target.bound;
      throw EstimationError(os.str());
    }
  }
  if (signed_h && r.alpha_t != 1.0)
    throw EstimationError("target takes negative values and terminated mass < 1; bounds need h >= 0");

  r.beta_L = pairwise_sum(wt.binaryExpr(hv, ext::Mul{}).eval()) / total;
  if (r.alpha_t == 1.0)
    r.beta_U = r.beta_L;
  else
    r.beta_U = ext::Add{}(r.beta_L * r.alpha_t, ext::Mul{}(target.bound, r.alpha_t - 1.0));
  return r;
}

EstimateReport run_once(const RunSpec& spec) {
  auto t0 = std::chrono::steady_clock::now();
  ParticleEnsemble ens = vpf_run(*spec.graph, spec.start, spec.horizon, spec.particles, spec.scheme, spec.seed, spec.engine);
  EstimateReport r = bounds(ens, spec.graph->nil, spec.target);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.seed = spec.seed;
  r.scheme = spec.scheme;
  r.model = spec.model;
  return r;
}

std::uint64_t replicate_seed(std::uint64_t seed, int r) {
  if (r == 0) return seed;
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(r)));
}

EstimateReport replicate(const RunSpec& spec, int reps) {
  if (reps < 1) throw Error("replicates must be at least 1");
  if (reps == 1) return run_once(spec);
  std::vector<EstimateReport> runs;
  for (int i = 0; i < reps; ++i) {
    RunSpec s = spec;
    s.seed = replicate_seed(spec.seed, i);
    runs.push_back(run_once(s));
  }
  EstimateReport agg = runs[0];
  agg.seed = spec.seed;
  agg.diag = Diagnostics{};
  agg.wall_time = 0;
  std::vector<double> bl, bu, al, es, tm;
  for (const auto& r : runs) {
    agg.replicates.push_back({r.seed, r.beta_L, r.beta_U, r.alpha_t, r.ess, r.termination_mass, r.wall_time});
    agg.diag += r.diag;
    agg.wall_time += r.wall_time;
    bl.push_back(r.beta_L);
    bu.push_back(r.beta_U);
    al.push_back(r.alpha_t);
    es.push_back(r.ess);
    tm.push_back(r.termination_mass);
  }
  EstimateReport::Stats st{summarize(bl), summarize(bu), summarize(al), summarize(es)};
  agg.beta_L = st.beta_L.mean;
  agg.beta_U = st.beta_U.mean;
  agg.alpha_t = st.alpha_t.mean;
  agg.ess = st.ess.mean;
  agg.termination_mass = summarize(tm).mean;
  agg.stats = st;
  return agg;
}

namespace {

nlohmann::json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

nlohmann::json stat_json(const SummaryStat& s) {
  return {{"mean", num(s.mean)}, {"sd", num(s.sd)}, {"min", num(s.min)}, {"max", num(s.max)}};
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

std::string to_json(const EstimateReport& r, bool with_wall_time) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["model"] = r.model;
  j["target"] = r.target;
  j["bound"] = num(r.bound);
  j["beta_L"] = num(r.beta_L);
  j["beta_U"] = num(r.beta_U);
  j["alpha_t"] = num(r.alpha_t);
  j["ess"] = num(r.ess);
  j["termination_mass"] = num(r.termination_mass);
  j["n_particles"] = r.n_particles;
  j["horizon"] = r.horizon;
  j["seed"] = r.seed;
  j["scheme"] = to_string(r.scheme);
  if (with_wall_time) j["wall_time"] = r.wall_time;
  j["diagnostics"] = {{"score_clamps", r.diag.score_clamps},
                      {"default_distributions", r.diag.default_distributions},
                      {"zero_weight_steps", r.diag.zero_weight_steps},
                      {"mask_violations", r.diag.mask_violations}};
  if (r.stats) {
    j["replicate_stats"] = {{"beta_L", stat_json(r.stats->beta_L)},
                            {"beta_U", stat_json(r.stats->beta_U)},
                            {"alpha_t", stat_json(r.stats->alpha_t)},
                            {"ess", stat_json(r.stats->ess)}};
    auto arr = nlohmann::ordered_json::array();
    for (const auto& rep : r.replicates) {
      nlohmann::ordered_json e;
      e["seed"] = rep.seed;
      e["beta_L"] = num(rep.beta_L);
      e["beta_U"] = num(rep.beta_U);
      e["alpha_t"] = num(rep.alpha_t);
      e["ess"] = num(rep.ess);
      e["termination_mass"] = num(rep.termination_mass);
      if (with_wall_time) e["wall_time"] = rep.wall_time;
      arr.push_back(e);
    }
    j["replicates"] = arr;
  }
  return j.dump(2);
}

std::string csv_header() {
  return "model,n_particles,horizon,seed,scheme,replicates,wall_time,beta_L,beta_U,midpoint,halfwidth,alpha_t,ess,"
         "termination_mass";
}

std::string to_csv_row(const EstimateReport& r) {
  std::ostringstream os;
  double mid = std::isinf(r.beta_U) ? ext::inf : 0.5 * (r.beta_L + r.beta_U);
  double half = std::isinf(r.beta_U) ? ext::inf : 0.5 * (r.beta_U - r.beta_L);
  os << r.model << ',' << r.n_particles << ',' << r.horizon << ',' << r.seed << ',' << to_string(r.scheme) << ','
     << (r.replicates.empty() ? 1 : r.replicates.size()) << ',' << fmt(r.wall_time) << ',' << fmt(r.beta_L) << ','
     << fmt(r.beta_U) << ',' << fmt(mid) << ',' << fmt(half) << ',' << fmt(r.alpha_t) << ',' << fmt(r.ess) << ','
     << fmt(r.termination_mass);
  return os.str();
}

}  // namespace ppgsmc
