#include <cstring>

#include <doctest.h>

#include "helpers.hpp"
#include "ppgsmc/expr.hpp"

using namespace ppgsmc;
using testing::store;

TEST_CASE("iverson bracket at its boundary") {
  CHECK(evaluate(iverson(var(0) >= lit(1.0)), store({1.0, 5.0})) == 1.0);
  CHECK(evaluate(iverson(var(0) >= lit(1.0)), store({0.999, 5.0})) == 0.0);
}

TEST_CASE("arithmetic") {
  CHECK(evaluate(abs(var(0) - var(1)), store({-1, 1})) == 2.0);
  CHECK(evaluate(min(var(0), var(1)) * lit(3.0), store({-1, 1})) == -3.0);
  CHECK(evaluate(max(var(0), var(1)) / lit(4.0), store({-1, 1})) == 0.25);
}

TEST_CASE("extended real conventions") {
  const double inf = ext::inf;
  CHECK(evaluate(var(0) / var(1), store({1, 0})) == inf);
  CHECK(evaluate(var(0) / var(1), store({-2, 0})) == -inf);
  CHECK(evaluate(var(0) / var(1), store({0, 0})) == 0.0);
  CHECK(evaluate(var(0) * var(1), store({0, inf})) == 0.0);
  CHECK(evaluate(var(0) * var(1), store({-inf, 0})) == 0.0);
  CHECK(evaluate(var(0) - var(1), store({inf, inf})) == 0.0);
  CHECK(evaluate(var(0) + var(1), store({inf, 1})) == inf);
  CHECK(evaluate(var(0) < var(1), store({-inf, inf})) == 1.0);
}

TEST_CASE("predicates are 0 or 1") {
  Store v = store({3, -2});
  for (const Expr& p : {var(0) < var(1), var(0) > var(1), eq(var(0), lit(3.0)), !(var(0) < lit(0.0)),
                        (var(0) > lit(0.0)) && (var(1) > lit(0.0)), (var(0) > lit(0.0)) || (var(1) > lit(0.0))}) {
    CHECK(is_predicate(p));
    double x = evaluate(p, v);
    CHECK((x == 0.0 || x == 1.0));
  }
  CHECK_FALSE(is_predicate(var(0) + lit(1.0)));
  CHECK(evaluate(as_predicate(var(0)), v) == 1.0);
  CHECK(evaluate(as_predicate(var(0) - lit(3.0)), v) == 0.0);
}

TEST_CASE("literal spellings") {
  CHECK(lit("1/2").value == 0.5);
  CHECK(lit("2.5e-1").value == 0.25);
  CHECK(lit("1/3").text == "1/3");
}

TEST_CASE("columnwise evaluation matches row by row bitwise") {
  Eigen::MatrixXd V(6, 2);
  V << 0, 0, 1, -1, ext::inf, 0, -3.5, 2.25, 0.1, 0.7, -ext::inf, -ext::inf;
  std::vector<Expr> es = {var(0) / var(1), abs(var(0) - var(1)) <= lit(3.0), var(0) * var(1) + lit("1/3"),
                          min(var(0), lit(0.5)) - max(var(1), lit(-1.0)), -var(0) / (var(1) * var(1))};
  for (const auto& e : es) {
    Eigen::ArrayXd col = evaluate_columns(e, V);
    for (Eigen::Index r = 0; r < V.rows(); ++r) {
      double s = evaluate(e, V.row(r));
      CHECK(std::memcmp(&s, &col[r], sizeof(double)) == 0);
    }
  }
}

TEST_CASE("variables read") {
  Expr e = abs(var(0) - var(3)) + lit(1.0);
  CHECK(vars_read(e) == std::set<int>{0, 3});
  CHECK(max_var(e) == 3);
  CHECK(max_var(lit(2.0)) == -1);
}

TEST_CASE("rendering") {
  CHECK(to_string(abs(var(0) - var(1)) <= lit(3.0), {"x", "y"}) == "|x - y| <= 3");
}
