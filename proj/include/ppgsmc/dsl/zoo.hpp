#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ppgsmc/dsl/ast.hpp"
#include "ppgsmc/estimator.hpp"

namespace ppgsmc::dsl {

struct ZooModel {
  std::string name;          // "zc", "rw2", ...
  std::string source_name;   // shipped .pp file stem
  ParamMap params;
  PPG graph;
  Checkpoint start = 0;
  TargetFunction target;
  int iterations = 0;        // loop iterations covered by the default horizon
  int horizon = 1;
};

/// The eight base models: at, dmm, ht, brp, niid, rw1, zc, rw2.
const std::vector<std::string>& zoo_names();
std::map<std::string, ZooModel> model_zoo();

/// "niid", "zc.2", "rw2:lambda=0.9999", "dmm:iterations=500".
/// Variants: zc.1 (lambda .99), zc.2 (lambda .5), rw2.1 (.5), rw2.2 (.9999).
ZooModel load_zoo(const std::string& spec);

/// Horizon reaching nil after `iterations` loop iterations.
int zoo_horizon(const std::string& name, int iterations);

/// Sources embedded at build time, keyed by file stem (includes fig1 etc.).
const std::map<std::string, std::string_view>& embedded_sources();

}  // namespace ppgsmc::dsl
