#include <doctest.h>

#include "helpers.hpp"
#include "ppgsmc/dsl/zoo.hpp"
#include "ppgsmc/estimator.hpp"

using namespace ppgsmc;
using namespace ppgsmc::dsl;

TEST_CASE("eight base models") {
  CHECK(zoo_names().size() == 8);
  auto zoo = model_zoo();
  CHECK(zoo.size() == 8);
  for (const auto& n : {"at", "dmm", "ht", "brp", "niid", "rw1", "zc", "rw2"}) CHECK(zoo.count(n) == 1);
}

TEST_CASE("default targets") {
  ZooModel niid = load_zoo("niid");
  CHECK(niid.target.label == "n");
  CHECK(niid.target.h == var(4));
  CHECK(niid.graph.var_names[4] == "n");
  ZooModel at = load_zoo("at");
  CHECK(at.target.label == "x");
  CHECK(std::isinf(at.target.bound));
  CHECK(load_zoo("dmm").target.label == "r");
  CHECK(load_zoo("dmm").target.bound == 1.0);
  CHECK(load_zoo("ht").target.label == "hare");
  CHECK(load_zoo("brp").target.bound == 1.0);
}

TEST_CASE("truncation horizons") {
  CHECK(load_zoo("dmm").iterations == 1000);
  CHECK(load_zoo("ht").iterations == 100);
  CHECK(load_zoo("niid").iterations == 100);
  CHECK(load_zoo("niid").horizon == zoo_horizon("niid", 100));
  CHECK(load_zoo("niid:iterations=10").horizon == zoo_horizon("niid", 10));
}

TEST_CASE("variants and parameters") {
  CHECK(load_zoo("zc.1").params.at("lambda") == "0.99");
  CHECK(load_zoo("zc.2").params.at("lambda") == "0.5");
  CHECK(load_zoo("rw2.2").params.at("lambda") == "0.9999");
  CHECK(load_zoo("rw2:lambda=0").params.at("lambda") == "0");
  CHECK_THROWS_AS(load_zoo("nope"), Error);
  CHECK_THROWS_AS(load_zoo("zc:lambda"), Error);
  CHECK_THROWS_AS(load_zoo("zc:mu=1"), Error);
}

TEST_CASE("bounded models terminate by their default horizon") {
  for (const char* name : {"at", "brp", "rw1", "rw2", "zc", "zc.1", "zc.2", "rw2.2"}) {
    CAPTURE(name);
    ZooModel z = load_zoo(name);
    auto e = vpf_run(z.graph, z.start, z.horizon, 1000, ResamplingScheme::Systematic, 17);
    CHECK(termination_mass(e, z.graph.nil) == 1.0);
    EstimateReport r = bounds(e, z.graph.nil, z.target);
    CHECK(r.alpha_t == 1.0);
    CHECK(r.beta_L == r.beta_U);
  }
}

TEST_CASE("unbounded loops nearly finish by their truncation horizon") {
  for (const char* name : {"ht", "niid"}) {
    CAPTURE(name);
    ZooModel z = load_zoo(name);
    auto e = vpf_run(z.graph, z.start, z.horizon, 2000, ResamplingScheme::Systematic, 3);
    CHECK(termination_mass(e, z.graph.nil) > 0.99);
  }
}

TEST_CASE("drunk man and mouse interval narrows with the horizon") {
  ZooModel z = load_zoo("dmm");
  RunSpec spec;
  spec.graph = &z.graph;
  spec.particles = 10000;
  spec.target = make_target(var(0), 2.0, "d");
  spec.seed = 1;
  auto width = [&](int t) {
    spec.horizon = t;
    EstimateReport r = replicate(spec, 10);
    std::vector<double> w;
    for (const auto& x : r.replicates) w.push_back(x.beta_U - x.beta_L);
    return summarize(w);
  };
  SummaryStat w60 = width(60), w120 = width(120);
  double se = std::sqrt((w60.sd * w60.sd + w120.sd * w120.sd) / 10);
  CHECK(w120.mean <= w60.mean + 2 * se);
  // t = 60 from a separate forward simulation of 1e6 runs:
  // E[d 1_T] = 0.743, alpha = 1.104
  spec.horizon = 60;
  EstimateReport r = replicate(spec, 10);
  CHECK(std::abs(r.beta_L - 0.743) < 0.02);
  CHECK(std::abs(r.alpha_t - 1.104) < 0.02);
  CHECK(r.beta_U == doctest::Approx(r.beta_L * r.alpha_t + 2 * (r.alpha_t - 1)).epsilon(0.01));
}
