#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppgsmc/engine.hpp"

namespace ppgsmc {

/// Payoff h on terminated stores, with an optional bound M (h <= M).
struct TargetFunction {
  Expr h;
  double bound = ext::inf;
  std::string label;
};

/// Target for a predicate-typed h gets M = 1 automatically.
TargetFunction make_target(Expr h, std::optional<double> bound = std::nullopt, std::string label = {});

/// sum_j W_j h(row_j) / sum_j W_j; all-zero weights fall back to uniform.
double filtering_expectation(const ParticleEnsemble& ens, const Expr& h, Diagnostics* diag = nullptr);

/// Normalized weight sitting at nil.
double termination_mass(const ParticleEnsemble& ens, Checkpoint nil);

struct SummaryStat {
  double mean = 0, sd = 0, min = 0, max = 0;
};

SummaryStat summarize(const std::vector<double>& xs);

struct ReplicateRecord {
  std::uint64_t seed = 0;
  double beta_L = 0, beta_U = 0, alpha_t = 1, ess = 0, termination_mass = 0, wall_time = 0;
};

struct EstimateReport {
  double beta_L = 0;
  double beta_U = 0;
  double alpha_t = 1;
  double ess = 0;
  double termination_mass = 0;
  Eigen::Index n_particles = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
  ResamplingScheme scheme = ResamplingScheme::Systematic;
  double wall_time = 0;
  std::string model;
  std::string target;
  double bound = ext::inf;
  Diagnostics diag;

  std::vector<ReplicateRecord> replicates;  // filled when reps > 1
  struct Stats {
    SummaryStat beta_L, beta_U, alpha_t, ess;
  };
  std::optional<Stats> stats;
};

/// beta_L = E[h 1_nil], alpha_t = 1 / E[1_nil],
/// beta_U = beta_L alpha_t + M (alpha_t - 1), and beta_U = beta_L when the
/// terminated mass is exactly 1. Throws EstimationError when no weight has
/// terminated, when h exceeds M, or when h < 0 with alpha_t > 1.
EstimateReport bounds(const ParticleEnsemble& ens, Checkpoint nil, const TargetFunction& target);

struct RunSpec {
  const PPG* graph = nullptr;
  Checkpoint start = 0;
  int horizon = 1;
  Eigen::Index particles = 1000;
  ResamplingScheme scheme = ResamplingScheme::Systematic;
  std::uint64_t seed = 0;
  TargetFunction target;
  EngineOptions engine;
  std::string model;
};

EstimateReport run_once(const RunSpec& spec);

/// Seed of replicate r; replicate 0 uses the base seed.
std::uint64_t replicate_seed(std::uint64_t seed, int r);

/// reps independent runs; reps == 1 is run_once unchanged.
EstimateReport replicate(const RunSpec& spec, int reps);

std::string to_json(const EstimateReport& r, bool with_wall_time = true);
std::string csv_header();
std::string to_csv_row(const EstimateReport& r);

}  // namespace ppgsmc
