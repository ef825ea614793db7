#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppgsmc/ppg.hpp"

namespace ppgsmc {

struct Violation {
  enum class Kind { NilSelfLoop, NilScore, ScoreRange, GuardPartition };
  Kind kind;
  Checkpoint checkpoint;
  std::string message;
  std::optional<Store> witness;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<bool> partition_exact;  // per checkpoint: proved syntactically

  bool ok() const { return violations.empty(); }
};

/// Random store for property checks: mixes small integers, uniform reals
/// in [-10, 10], and the occasional infinity.
Store random_store(int m, RngStream& rng);

/// True when the guards are decided complementary by syntax alone
/// (a single `true`, or an if/else tree over phi / !phi literals).
bool guards_syntactically_partition(const std::vector<Expr>& guards);

/// Malformed indices throw StructureError; everything else is reported.
ValidationReport validate_ppg(const PPG& g, std::size_t samples = 10000, std::uint64_t seed = 0);

std::string to_string(const Violation& v);

}  // namespace ppgsmc
