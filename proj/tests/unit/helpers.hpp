#pragma once
#include <fstream>
#include <sstream>
#include <string>

#include "ppgsmc/dsl/compiler.hpp"
#include "ppgsmc/errors.hpp"
#include "ppgsmc/ppg.hpp"

namespace testing {

inline std::string read_model(const std::string& stem) {
  std::ifstream in(std::string(PPGSMC_SOURCE_DIR) + "/models/" + stem + ".pp");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Two coins by hand: 0 start, 1 branch on c, 2 nil, 3 scored [d == 1].
inline ppgsmc::PPG two_coins(bool observe = true) {
  using namespace ppgsmc;
  PPG g;
  g.var_count = 2;
  g.var_names = {"c", "d"};
  g.checkpoints = {"start", "branch", "nil", "scored"};
  g.nil = 2;
  g.scores = {score_one(), score_one(), score_one(),
              observe ? score_pred(eq(var(1), lit(1.0))) : score_one()};
  g.transitions = {
      {0, truth(), {{sample_into(0, bernoulli(lit("1/2")))}}, 1},
      {1, ne(var(0), lit(0.0)), {{sample_into(1, bernoulli(lit("1/2")))}}, 3},
      {1, eq(var(0), lit(0.0)), {}, 2},
      {3, truth(), {}, 2},
      {2, truth(), {}, 2},
  };
  return g;
}

inline ppgsmc::Store store(std::initializer_list<double> xs) {
  ppgsmc::Store v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace testing
