#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ppgsmc/ppg.hpp"
#include "ppgsmc/weights.hpp"

namespace ppgsmc {

/// Structure-of-arrays particle set: V (N x m stores), Z (checkpoints),
/// W (weights of the current step), step = time index k.
struct ParticleEnsemble {
  Eigen::MatrixXd V;
  Eigen::VectorXi Z;
  Eigen::VectorXd W;
  int step = 1;
  Diagnostics diag;

  Eigen::Index size() const { return Z.size(); }
};

/// Bitwise equality of V, Z, W and step.
bool identical(const ParticleEnsemble& a, const ParticleEnsemble& b);

struct EngineOptions {
  int threads = 0;  // 0 = sequential reference mode
  bool check_masks = false;
};

/// Substream layout. Every draw made while producing time index k for
/// particle j comes from root.split(k).split(j); resampling before k uses
/// root.split(k).split(kResampleStream).
inline constexpr std::uint64_t kResampleStream = 0xFFFFFFFFFFFFFFFFull;

ParticleEnsemble vpf_init(const PPG& g, Checkpoint s0, Eigen::Index n, const RngStream& rng);
ParticleEnsemble vpf_step(const PPG& g, const ParticleEnsemble& ens, ResamplingScheme scheme,
                          const RngStream& rng, const EngineOptions& opt = {});
ParticleEnsemble vpf_run(const PPG& g, Checkpoint s0, int t, Eigen::Index n, ResamplingScheme scheme,
                         std::uint64_t seed, const EngineOptions& opt = {});

/// Particle-by-particle reference loop sharing the substream layout above.
ParticleEnsemble scalar_pf_run(const PPG& g, Checkpoint s0, int t, Eigen::Index n,
                               ResamplingScheme scheme, std::uint64_t seed);

/// Keeps large freed blocks in the heap instead of returning them to the OS.
/// Steps allocate and drop multi-megabyte temporaries; without this each one
/// costs fresh page faults. No-op outside glibc.
void retain_freed_memory();

/// CSV: one column per variable (named), then z, w. Header line first.
void write_snapshot_csv(std::ostream& os, const PPG& g, const ParticleEnsemble& ens);

}  // namespace ppgsmc
