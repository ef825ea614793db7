// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "../common/properties.hpp"
#include "ppgsmc/dsl/zoo.hpp"
#include "ppgsmc/estimator.hpp"
#include "ppgsmc/oracle.hpp"

using namespace ppgsmc;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

struct Program {
  PPG graph;
  TargetFunction target;
};

Program program(const std::string& stem) {
  auto ast = dsl::parse(dsl::embedded_sources().at(stem));
  return {dsl::compile(ast), make_target(*ast.result)};
}

// Point estimates use the engine default (systematic), as `ppg-smc run` does.
EstimateReport run_zoo(const std::string& spec, Eigen::Index n, std::uint64_t seed, int reps = 1,
                       ResamplingScheme scheme = ResamplingScheme::Systematic) {
  dsl::ZooModel z = dsl::load_zoo(spec);
  RunSpec r;
  r.graph = &z.graph;
  r.start = z.start;
  r.horizon = z.horizon;
  r.particles = n;
  r.scheme = scheme;
  r.seed = seed;
  r.target = z.target;
  r.model = spec;
  return replicate(r, reps);
}

Outcome a1() {
  auto t0 = Clock::now();
  Program with = program("fig1"), without = program("fig1_noobs");
  ExactBounds a = exact_semantics(enumerate(with.graph, 0, 4), with.target);
  ExactBounds b = exact_semantics(enumerate(without.graph, 0, 4), without.target);
  double dt = seconds_since(t0);
  bool ok = a.beta_L == Rational(1, 3) && a.beta_U && *a.beta_U == Rational(1, 3) && b.beta_L == Rational(1, 2) &&
            b.beta_U && *b.beta_U == Rational(1, 2) && dt < 1.0;
  return {ok, "observed " + to_string(a.beta_L) + ", unobserved " + to_string(b.beta_L) + fmt(", %.3f s", dt)};
}

Outcome a2() {
  Program p = program("fig1");
  auto t0 = Clock::now();
  double sum = 0;
  bool alpha_one = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto e = vpf_run(p.graph, 0, 4, 100000, ResamplingScheme::Multinomial, seed);
    EstimateReport r = bounds(e, p.graph.nil, p.target);
    sum += r.beta_L;
    alpha_one &= r.alpha_t == 1.0;
  }
  double dt = seconds_since(t0), mean = sum / 10;
  bool ok = std::abs(mean - 1.0 / 3) <= 0.01 && alpha_one && dt < 5.0;
  return {ok, fmt("mean beta_L %.5f, alpha_t = 1 in all runs: %s, %.2f s", mean, alpha_one ? "yes" : "no", dt)};
}

Outcome a3() {
  Program p = program("fig1");
  auto e = vpf_run(p.graph, 0, 4, 100000, ResamplingScheme::Multinomial, 1);
  Eigen::ArrayXd w = normalize_weights(e.W);
  double m00 = 0, m11 = 0;
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    if (e.Z[j] != p.graph.nil) continue;
    if (e.V(j, 0) == 0 && e.V(j, 1) == 0) m00 += w[j];
    if (e.V(j, 0) == 1 && e.V(j, 1) == 1) m11 += w[j];
  }
  bool ok = std::abs(m00 - 2.0 / 3) <= 0.01 && std::abs(m11 - 1.0 / 3) <= 0.01;
  return {ok, fmt("mass at (0,0) %.5f, at (1,1) %.5f", m00, m11)};
}

Outcome a4() {
  EstimateReport r = run_zoo("niid", 100000, 1);
  Program p = program("niid");
  double exact = to_double(exact_semantics(enumerate(p.graph, 0, 40), p.target).beta_L);
  bool ok = std::abs(r.beta_L - 24.0 / 7) <= 0.09 && std::abs(exact - 24.0 / 7) < 1e-3;
  return {ok, fmt("VPF beta_L %.4f (horizon %d), oracle t=40 %.7f, 24/7 = %.7f", r.beta_L, r.horizon, exact, 24.0 / 7)};
}

Outcome in_range(const std::string& spec, double lo, double hi) {
  EstimateReport r = run_zoo(spec, 100000, 1);
  EstimateReport m = run_zoo(spec, 100000, 1, 1, ResamplingScheme::Multinomial);
  bool ok = r.beta_L >= lo && r.beta_U <= hi && r.alpha_t == 1.0;
  return {ok, fmt("beta_L %.5f, beta_U %.5f, alpha_t %.4f, target [%.3f, %.3f] (multinomial: %.5f)", r.beta_L,
                  r.beta_U, r.alpha_t, lo, hi, m.beta_L)};
}

Outcome a8() {
  EstimateReport r = run_zoo("dmm", 10000, 1, 10);
  bool ok = r.beta_L <= 0.494 && 0.494 <= r.beta_U && r.alpha_t <= 1.2;
  return {ok, fmt("mean interval [%.4f, %.4f], mean alpha_t %.4f, reference 0.494", r.beta_L, r.beta_U, r.alpha_t)};
}

Outcome a9() {
  std::vector<double> all;
  std::ostringstream os;
  for (const char* lambda : {"0", "0.5", "0.9999"}) {
    os << "lambda " << lambda << ":";
    for (int k = 0; k < 3; ++k) {
      EstimateReport r = run_zoo(std::string("rw2:lambda=") + lambda, 100000, static_cast<std::uint64_t>(k));
      all.push_back(r.wall_time);
      os << fmt(" %.3f", r.wall_time);
    }
    os << " s; ";
  }
  double ratio = *std::max_element(all.begin(), all.end()) / *std::min_element(all.begin(), all.end());
  os << fmt("max/min %.3f", ratio);
  return {ratio <= 1.3, os.str()};
}

Outcome a10() {
  int compared = 0;
  std::string bad;
  std::vector<std::string> models = dsl::zoo_names();
  for (const char* v : {"zc.1", "zc.2", "rw2.1", "rw2.2"}) models.push_back(v);
  for (const auto& name : models) {
    dsl::ZooModel z = dsl::load_zoo(name);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      for (auto scheme : {ResamplingScheme::Systematic, ResamplingScheme::Multinomial}) {
        auto a = vpf_run(z.graph, z.start, 20, 1000, scheme, seed);
        auto b = scalar_pf_run(z.graph, z.start, 20, 1000, scheme, seed);
        ++compared;
        if (!identical(a, b) && bad.empty()) bad = name + " seed " + std::to_string(seed);
      }
    }
  }
  return {bad.empty(), bad.empty() ? fmt("%d ensemble pairs bit-identical", compared) : "differs: " + bad};
}

Outcome a11() {
  const Eigen::Index n = 10000;
  const int draws = 1000;
  std::ostringstream os;
  bool ok = true;
  for (std::vector<long> w : {std::vector<long>{1, 3}, std::vector<long>{1, 1, 1, 7}}) {
    long total = 0;
    for (long x : w) total += x;
    Eigen::VectorXd W = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < w.size(); ++i) W[static_cast<Eigen::Index>(i)] = static_cast<double>(w[i]);
    for (auto scheme : {ResamplingScheme::Multinomial, ResamplingScheme::Systematic}) {
      std::vector<double> mean(w.size(), 0.0);
      bool within_floor_ceil = true;
      RngStream root(static_cast<std::uint64_t>(w.size()) * 7 + static_cast<std::uint64_t>(scheme));
      for (int d = 0; d < draws; ++d) {
        std::vector<long> c(w.size(), 0);
        for (auto i : resample(scheme, W, root.split(static_cast<std::uint64_t>(d)))) {
          if (i >= static_cast<Eigen::Index>(w.size())) {
            ok = false;
            continue;
          }
          ++c[static_cast<std::size_t>(i)];
        }
        for (std::size_t i = 0; i < w.size(); ++i) {
          mean[i] += static_cast<double>(c[i]) / draws;
          long lo = n * w[i] / total, hi = (n * w[i] + total - 1) / total;
          within_floor_ceil &= c[i] >= lo && c[i] <= hi;
        }
      }
      for (std::size_t i = 0; i < w.size(); ++i) {
        double p = static_cast<double>(w[i]) / static_cast<double>(total);
        double expect = static_cast<double>(n) * p;
        double sigma = std::sqrt(static_cast<double>(n) * p * (1 - p) / draws);
        ok &= std::abs(mean[i] - expect) <= 4 * sigma;
      }
      if (scheme == ResamplingScheme::Systematic) ok &= within_floor_ceil;
      os << (scheme == ResamplingScheme::Systematic ? "systematic" : "multinomial") << " W=(";
      for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
      os << ") mean count[0] " << fmt("%.2f", mean[0]) << "; ";
    }
  }
  return {ok, os.str()};
}

Outcome a12() {
  std::vector<std::pair<std::string, std::function<std::string()>>> suites = {
      {"guard partition",
       [] {
         for (const auto& [stem, src] : dsl::embedded_sources())
           if (auto m = props::guard_partition(dsl::compile_source(src), 10000, 1); !m.empty()) return stem + ": " + m;
         return std::string();
       }},
      {"score range",
       [] {
         for (const auto& [stem, src] : dsl::embedded_sources())
           if (auto m = props::score_range(dsl::compile_source(src), 10000, 2); !m.empty()) return stem + ": " + m;
         return std::string();
       }},
      {"ess", [] { return props::ess_properties(2000, 3); }},
      {"bound order", [] { return props::bound_order(2000, 4); }},
      {"probability conservation", [] { return props::probability_conservation(); }},
      {"compile/validate round trip", [] { return props::compile_round_trip(); }},
  };
  std::ostringstream os;
  bool ok = true;
  for (auto& [name, fn] : suites) {
    std::string m = fn();
    ok &= m.empty();
    os << name << (m.empty() ? " ok" : " FAILED (" + m + ")") << "; ";
  }
  return {ok, os.str()};
}

}  // namespace

int main() {
  retain_freed_memory();
  std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"A1", a1},
      {"A2", a2},
      {"A3", a3},
      {"A4", a4},
      {"A5", [] { return in_range("rw1", 0.31, 0.35); }},
      {"A6", [] { return in_range("brp", 0.018, 0.030); }},
      {"A7", [] { return in_range("zc.2", 0.46, 0.50); }},
      {"A8", a8},
      {"A9", a9},
      {"A10", a10},
      {"A11", a11},
      {"A12", a12},
  };
  int failed = 0;
  for (auto& [id, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << id << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
