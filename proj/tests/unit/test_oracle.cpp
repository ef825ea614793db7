#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "ppgsmc/dsl/compiler.hpp"
#include "ppgsmc/oracle.hpp"

using namespace ppgsmc;

namespace {

Rational q(const char* s) { return parse_rational(s); }

const ExactRow* find(const ExactTable& t, double c, double d, Checkpoint z) {
  for (const auto& r : t.rows)
    if (r.store[0] == c && r.store[1] == d && r.checkpoint == z) return &r;
  return nullptr;
}

// exact bounds of the non-iid loop at t = 10, 12, 20, 40, from a separate
// program-level enumeration
struct NiidRow {
  int t;
  const char* beta_L;
};
const NiidRow kNiid[] = {
    {10, "56080/19603"},
    {12, "969920/304713"},
    {20, "67205089408/19640044521"},
    {40, "74015856254181273573984/21587961331833455166889"},
};

}  // namespace

TEST_CASE("rationals") {
  CHECK(parse_rational("1/3") * 3 == 1);
  CHECK(parse_rational("-0.25") == Rational(-1, 4));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(exact_from_double(0.1) != Rational(1, 10));
  CHECK(to_double(exact_from_double(0.1)) == 0.1);
  CHECK(to_string(Rational(2, 6)) == "1/3");
}

TEST_CASE("two coins table at t = 4") {
  ExactTable t = enumerate(testing::two_coins(), 0, 4);
  CHECK(t.rows.size() == 3);
  const ExactRow* a = find(t, 0, 0, 2);
  const ExactRow* b = find(t, 1, 1, 2);
  const ExactRow* c = find(t, 1, 0, 2);
  REQUIRE(a);
  REQUIRE(b);
  REQUIRE(c);
  CHECK(a->probability == q("1/2"));
  CHECK(a->weight == 1);
  CHECK(b->probability == q("1/4"));
  CHECK(b->weight == 1);
  CHECK(c->probability == q("1/4"));
  CHECK(c->weight == 0);
}

TEST_CASE("horizon one") {
  PPG g = testing::two_coins();
  ExactTable t = enumerate(g, 0, 1);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].checkpoint == 0);
  CHECK(t.rows[0].probability == 1);
  CHECK(t.rows[0].weight == 1);
  CHECK(t.rows[0].store.isZero());
}

TEST_CASE("two coins semantics") {
  ExactBounds b = exact_semantics(enumerate(testing::two_coins(), 0, 4), make_target(var(0)));
  CHECK(b.payoff == q("1/4"));
  CHECK(b.total_weight == q("3/4"));
  CHECK(b.terminated_weight == q("3/4"));
  CHECK(b.alpha_t == 1);
  CHECK(b.beta_L == q("1/3"));
  REQUIRE(b.beta_U);
  CHECK(*b.beta_U == q("1/3"));
  ExactBounds free = exact_semantics(enumerate(testing::two_coins(false), 0, 4), make_target(var(0)));
  CHECK(free.beta_L == q("1/2"));
  CHECK(*free.beta_U == q("1/2"));
}

TEST_CASE("compiled source agrees with the hand-built graph") {
  auto ast = dsl::parse(testing::read_model("fig1"));
  PPG g = dsl::compile(ast);
  ExactBounds b = exact_semantics(enumerate(g, 0, 4), make_target(*ast.result));
  CHECK(b.beta_L == q("1/3"));
  CHECK(*b.beta_U == q("1/3"));
}

TEST_CASE("too early a horizon") {
  CHECK_THROWS_WITH_AS(exact_semantics(enumerate(testing::two_coins(), 0, 2), make_target(var(0))),
                       "no terminated weight at horizon t; increase t", EstimationError);
}

TEST_CASE("continuous models are refused") {
  PPG g = dsl::compile_source("x ~ N(0, 1); observe(x > 0)");
  CHECK_THROWS_AS(enumerate(g, 0, 3), NotEnumerable);
}

TEST_CASE("non-iid loop") {
  auto ast = dsl::parse(testing::read_model("niid"));
  PPG g = dsl::compile(ast);
  TargetFunction h = make_target(*ast.result);
  CHECK(enumerate(g, 0, 12).total_probability() == 1);
  Rational prev_L = -1;
  std::optional<Rational> prev_alpha;
  for (const auto& row : kNiid) {
    ExactTable tab = enumerate(g, 0, row.t);
    CHECK(tab.total_probability() == 1);
    ExactBounds b = exact_semantics(tab, h);
    CHECK(b.beta_L == q(row.beta_L));
    CHECK_FALSE(b.beta_U);
    CHECK(b.beta_L >= prev_L);
    if (prev_alpha) CHECK(b.alpha_t <= *prev_alpha);
    prev_L = b.beta_L;
    prev_alpha = b.alpha_t;
    ExactBounds f = exact_filtering_bounds(tab, h);
    CHECK(f.beta_L == b.beta_L);
    CHECK(f.alpha_t == b.alpha_t);
  }
  CHECK(abs(to_double(prev_L) - 24.0 / 7) < 1e-3);
}

TEST_CASE("upper bound on the non-iid loop with an artificial M tightens") {
  auto ast = dsl::parse(testing::read_model("niid"));
  PPG g = dsl::compile(ast);
  TargetFunction h = make_target(min(*ast.result, lit(50.0)), 50.0);
  Rational prev = 1000;
  for (int t : {10, 20, 40}) {
    ExactBounds b = exact_semantics(enumerate(g, 0, t), h);
    REQUIRE(b.beta_U);
    CHECK(*b.beta_U <= prev);
    CHECK(b.beta_L <= *b.beta_U);
    prev = *b.beta_U;
  }
}

TEST_CASE("small retransmission instance") {
  auto ast = dsl::parse(testing::read_model("brp_mini"));
  PPG g = dsl::compile(ast);
  ExactBounds b = exact_semantics(enumerate(g, 0, 14), make_target(*ast.result));
  CHECK(b.alpha_t == 1);
  CHECK(b.beta_L == q("1/25"));
  ExactBounds early = exact_semantics(enumerate(g, 0, 10), make_target(*ast.result));
  CHECK(early.alpha_t == q("25/17"));
}

TEST_CASE("filtering atoms of the two coins") {
  auto atoms = exact_filtering(enumerate(testing::two_coins(), 0, 4));
  REQUIRE(atoms.size() == 2);
  Rational sum = 0;
  for (const auto& a : atoms) {
    sum += a.mass;
    if (a.store[0] == 0) CHECK(a.mass == q("2/3"));
    if (a.store[0] == 1) CHECK(a.mass == q("1/3"));
  }
  CHECK(sum == 1);
}

TEST_CASE("table csv") {
  std::ostringstream os;
  write_exact_csv(os, enumerate(testing::two_coins(), 0, 4));
  std::string s = os.str();
  CHECK(s.rfind("c,d,checkpoint,p_num,p_den,w_num,w_den\n", 0) == 0);
  CHECK(s.find("1,1,2,1,4,1,1") != std::string::npos);
}
