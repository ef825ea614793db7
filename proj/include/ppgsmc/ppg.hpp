#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ppgsmc/distribution.hpp"
#include "ppgsmc/expr.hpp"
#include "ppgsmc/rng.hpp"

namespace ppgsmc {

using Checkpoint = int;
using Store = Eigen::VectorXd;

/// Counters for silent fallbacks. Summed in a fixed order across workers.
struct Diagnostics {
  std::uint64_t score_clamps = 0;          // score outside [0,1] clamped
  std::uint64_t default_distributions = 0; // bad parameters -> Dirac(0)
  std::uint64_t zero_weight_steps = 0;     // all-zero weights, uniform fallback
  std::uint64_t mask_violations = 0;       // rows with != 1 active transition

  Diagnostics& operator+=(const Diagnostics& o) {
    score_clamps += o.score_clamps;
    default_distributions += o.default_distributions;
    zero_weight_steps += o.zero_weight_steps;
    mask_violations += o.mask_violations;
    return *this;
  }
  bool operator==(const Diagnostics&) const = default;
};

struct KernelStep {
  enum class Kind { Assign, Sample };
  Kind kind = Kind::Assign;
  int target = 0;
  Expr value;             // Assign
  DistributionSpec dist;  // Sample

  bool operator==(const KernelStep&) const = default;
};

inline KernelStep assign(int target, Expr e) { return {KernelStep::Kind::Assign, target, std::move(e), {}}; }
inline KernelStep sample_into(int target, DistributionSpec d) { return {KernelStep::Kind::Sample, target, {}, std::move(d)}; }

/// Steps run top to bottom; later steps see earlier results. Empty = identity.
struct KernelAction {
  std::vector<KernelStep> steps;

  bool empty() const { return steps.empty(); }
  bool operator==(const KernelAction&) const = default;
};

struct ScoreSpec {
  enum class Kind { One, Pred, DensityRatio, Clamped, Product };
  Kind kind = Kind::One;
  Expr expr;                       // Pred / Clamped value, DensityRatio point
  Expr normalizer;                 // DensityRatio
  DistributionSpec dist;           // DensityRatio
  std::vector<ScoreSpec> factors;  // Product

  bool operator==(const ScoreSpec&) const = default;
};

inline ScoreSpec score_one() { return {}; }
ScoreSpec score_pred(Expr p);
ScoreSpec score_clamped(Expr e);
ScoreSpec score_density_ratio(DistributionSpec d, Expr at, Expr normalizer);
ScoreSpec score_product(std::vector<ScoreSpec> factors);  // flattens, drops One

std::set<int> vars_read(const ScoreSpec& s);

struct Transition {
  Checkpoint source = 0;
  Expr guard = truth();
  KernelAction kernel;
  Checkpoint target = 0;

  bool operator==(const Transition&) const = default;
};

struct PPG {
  int var_count = 0;
  std::vector<std::string> var_names;
  std::vector<std::string> checkpoints;
  std::vector<Transition> transitions;
  Checkpoint nil = 0;
  std::vector<ScoreSpec> scores;

  int size() const { return static_cast<int>(checkpoints.size()); }
  bool operator==(const PPG&) const = default;
};

/// Hard structural checks: indices in range, arities, predicate guards.
void check_structure(const PPG& g);

/// out[s] = indices of transitions leaving s, in declaration order.
std::vector<std::vector<std::size_t>> outgoing(const PPG& g);

/// Forward-sample a kernel on one store. v is not modified.
Store kernel_step(const KernelAction& k, const Store& v, RngStream& rng, Diagnostics* diag = nullptr);

/// Same kernel over the rows of V, row r using rngs[r]. Bit-identical to
/// kernel_step row by row.
void apply_kernel_columns(const KernelAction& k, Eigen::Ref<Eigen::MatrixXd> V,
                          std::span<RngStream> rngs, Diagnostics* diag = nullptr);

/// Unclamped score value (validation looks at this).
double score_raw(const ScoreSpec& s, const Store& v);
/// Score clamped into [0,1]; clamps counted.
double score_value(const ScoreSpec& s, const Store& v, Diagnostics* diag = nullptr);
double score_at(const PPG& g, Checkpoint s, const Store& v, Diagnostics* diag = nullptr);
Eigen::ArrayXd score_columns(const ScoreSpec& s, const Eigen::Ref<const Eigen::MatrixXd>& V,
                             Diagnostics* diag = nullptr);

std::string to_string(const KernelAction& k, const std::vector<std::string>& names = {});
std::string to_string(const ScoreSpec& s, const std::vector<std::string>& names = {});
std::string to_string(const DistributionSpec& d, const std::vector<std::string>& names = {});

}  // namespace ppgsmc
