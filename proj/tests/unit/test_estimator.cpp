#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ppgsmc/estimator.hpp"

using namespace ppgsmc;

namespace {

// rows (c, d) at checkpoints z with weights w; m = 2
ParticleEnsemble make(std::vector<std::array<double, 2>> rows, std::vector<int> z, std::vector<double> w) {
  ParticleEnsemble e;
  const auto n = static_cast<Eigen::Index>(rows.size());
  e.V.resize(n, 2);
  e.Z.resize(n);
  e.W.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    e.V(i, 0) = rows[i][0];
    e.V(i, 1) = rows[i][1];
    e.Z[i] = z[i];
    e.W[i] = w[i];
  }
  return e;
}

}  // namespace

TEST_CASE("constant target") {
  auto e = make({{0, 0}, {1, 1}, {5, 2}}, {2, 2, 1}, {0.2, 0.5, 1.0});
  CHECK(filtering_expectation(e, lit(4.0)) == doctest::Approx(4.0));
}

TEST_CASE("two-atom filtering distribution") {
  // mass 2/3 at (0, 0, nil) and 1/3 at (1, 1, nil)
  auto e = make({{0, 0}, {0, 0}, {1, 1}}, {2, 2, 2}, {1, 1, 1});
  CHECK(filtering_expectation(e, var(0)) == doctest::Approx(1.0 / 3));
  CHECK(termination_mass(e, 2) == 1.0);
  EstimateReport r = bounds(e, 2, make_target(var(0)));
  CHECK(r.beta_L == doctest::Approx(1.0 / 3));
  CHECK(r.beta_U == r.beta_L);
  CHECK(r.alpha_t == 1.0);
}

TEST_CASE("termination mass extremes") {
  CHECK(termination_mass(make({{0, 0}, {1, 0}}, {2, 2}, {1, 3}), 2) == 1.0);
  CHECK(termination_mass(make({{0, 0}, {1, 0}}, {0, 1}, {1, 3}), 2) == 0.0);
  CHECK(termination_mass(make({{0, 0}, {1, 0}}, {2, 1}, {1, 3}), 2) == 0.25);
}

TEST_CASE("upper bound formula") {
  // termination mass 1 / 1.029, E[h 1_T] = 0.768, M = 2
  const double alpha = 1.029, tm = 1 / alpha;
  auto e = make({{0.768 / tm, 0}, {0, 0}}, {2, 0}, {tm, 1 - tm});
  EstimateReport r = bounds(e, 2, make_target(var(0), 2.0));
  CHECK(r.beta_L == doctest::Approx(0.768));
  CHECK(r.alpha_t == doctest::Approx(1.029));
  CHECK(r.beta_U == doctest::Approx(0.768 * 1.029 + 2 * 0.029));
  CHECK(r.beta_U == doctest::Approx(0.848).epsilon(0.001));
}

TEST_CASE("vacuous upper bound without M") {
  auto e = make({{1, 0}, {0, 0}}, {2, 0}, {1, 1});
  EstimateReport r = bounds(e, 2, make_target(var(0)));
  CHECK(r.beta_L == 0.5);
  CHECK(r.alpha_t == 2.0);
  CHECK(std::isinf(r.beta_U));
}

TEST_CASE("predicates get M = 1") {
  CHECK(make_target(var(0) > lit(0.0)).bound == 1.0);
  CHECK(std::isinf(make_target(var(0)).bound));
  CHECK(make_target(var(0) > lit(0.0), 3.0).bound == 3.0);
}

TEST_CASE("errors") {
  auto none = make({{1, 0}}, {0}, {1});
  CHECK_THROWS_WITH_AS(bounds(none, 2, make_target(var(0))), "no terminated weight at horizon t; increase t",
                       EstimationError);
  auto big = make({{5, 0}}, {2}, {1});
  CHECK_THROWS_AS(bounds(big, 2, make_target(var(0), 2.0)), EstimationError);
  auto neg = make({{-1, 0}, {0, 0}}, {2, 0}, {1, 1});
  CHECK_THROWS_AS(bounds(neg, 2, make_target(var(0))), EstimationError);
  // exact case tolerates signed targets
  auto neg_exact = make({{-1, 0}, {3, 0}}, {2, 2}, {1, 1});
  CHECK(bounds(neg_exact, 2, make_target(var(0))).beta_L == 1.0);
}

TEST_CASE("linearity, monotonicity and weight scale invariance") {
  auto e = make({{0, 1}, {2, 3}, {4, -1}}, {2, 2, 2}, {0.1, 0.7, 0.2});
  double a = filtering_expectation(e, var(0)), b = filtering_expectation(e, var(1));
  CHECK(filtering_expectation(e, lit(2.0) * var(0) + lit(3.0) * var(1)) == doctest::Approx(2 * a + 3 * b));
  CHECK(filtering_expectation(e, var(0)) <= filtering_expectation(e, var(0) + lit(0.5)));
  auto scaled = e;
  scaled.W *= 1e-7;
  CHECK(filtering_expectation(scaled, var(0)) == doctest::Approx(a));
}

TEST_CASE("replicates") {
  PPG g = testing::two_coins();
  RunSpec spec;
  spec.graph = &g;
  spec.horizon = 4;
  spec.particles = 100000;
  spec.seed = 3;
  spec.target = make_target(var(0));
  EstimateReport one = replicate(spec, 1);
  EstimateReport direct = run_once(spec);
  CHECK(one.beta_L == direct.beta_L);
  CHECK(one.replicates.empty());
  CHECK_FALSE(one.stats);
  EstimateReport ten = replicate(spec, 10);
  REQUIRE(ten.stats);
  CHECK(ten.replicates.size() == 10);
  CHECK(ten.stats->beta_L.sd < 0.01);
  CHECK(std::abs(ten.beta_L - 1.0 / 3) < 0.005);
  CHECK(ten.replicates[0].seed == 3);
  CHECK(ten.replicates[1].seed != 3);
}

TEST_CASE("report serialization") {
  PPG g = testing::two_coins();
  RunSpec spec;
  spec.graph = &g;
  spec.horizon = 4;
  spec.particles = 1000;
  spec.target = make_target(var(0), std::nullopt, "c");
  spec.model = "two-coins";
  EstimateReport r = run_once(spec);
  std::string j = to_json(r, false);
  CHECK(j.find("\"schema_version\"") != std::string::npos);
  CHECK(j.find("wall_time") == std::string::npos);
  CHECK(to_json(r).find("wall_time") != std::string::npos);
  std::string row = to_csv_row(r), head = csv_header();
  CHECK(std::count(row.begin(), row.end(), ',') == std::count(head.begin(), head.end(), ','));
}
