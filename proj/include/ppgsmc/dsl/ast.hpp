#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppgsmc/ppg.hpp"

namespace ppgsmc::dsl {

using ParamMap = std::map<std::string, std::string>;  // name -> literal spelling

struct Stmt {
  enum class Kind { Assign, Sample, Observe, Score, If, While, Skip, Block };
  Kind kind = Kind::Skip;
  int line = 0, column = 0;
  int target = -1;         // Assign / Sample
  Expr expr;               // Assign value, If/While condition
  DistributionSpec dist;   // Sample
  ScoreSpec score;         // Observe / Score
  std::vector<Stmt> body;  // If-then, While body, Block
  std::vector<Stmt> orelse;
};

struct ProgramAst {
  std::vector<std::string> var_names;  // index = store slot, first-use order
  std::vector<Stmt> body;
  std::optional<Expr> result;          // trailing `return e`
  ParamMap params;                     // declared params with their final values
};

/// Parses source; `overrides` replaces declared `param` values.
/// Throws ParseError with 1-based line/column.
ProgramAst parse(std::string_view source, const ParamMap& overrides = {});

/// A single expression over existing variable names (unknown names are an
/// error); used for command-line target overrides.
Expr parse_expression(std::string_view text, const std::vector<std::string>& var_names);

bool is_distribution_name(std::string_view name);

}  // namespace ppgsmc::dsl
