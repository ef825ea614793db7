#include "ppgsmc/engine.hpp"

#include <algorithm>
#include <cstring>
#include <ostream>
#include <thread>

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace ppgsmc {

bool identical(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  if (a.step != b.step || a.V.rows() != b.V.rows() || a.V.cols() != b.V.cols() || a.Z.size() != b.Z.size() ||
      a.W.size() != b.W.size())
    return false;
  auto same = [](double x, double y) { return std::memcmp(&x, &y, sizeof(double)) == 0; };
  for (Eigen::Index i = 0; i < a.V.size(); ++i)
    if (!same(a.V.data()[i], b.V.data()[i])) return false;
  for (Eigen::Index i = 0; i < a.W.size(); ++i)
    if (!same(a.W[i], b.W[i])) return false;
  return a.Z == b.Z;
}

namespace {

using Rows = std::vector<Eigen::Index>;

// Moves rows [offset, offset + V.rows()) one transition forward and scores
// them.
void advance_block(const PPG& g, const std::vector<std::vector<std::size_t>>& out,
                   Eigen::Ref<Eigen::MatrixXd> V, Eigen::Ref<Eigen::VectorXi> Z, Eigen::Ref<Eigen::VectorXd> W,
                   Eigen::Index offset, const RngStream& step_rng, Diagnostics& diag) {
  const Eigen::Index n = V.rows();
  const int ncp = g.size();

  std::vector<Rows> at(ncp);
  for (Eigen::Index r = 0; r < n; ++r) at[Z[r]].push_back(r);

  // masks M_{s,phi} = phi(V) * (Z == s), evaluated on the rows sitting at s
  std::vector<Rows> active(g.transitions.size());
  for (int s = 0; s < ncp; ++s) {
    const Rows& rows = at[s];
    if (rows.empty()) continue;
    const bool whole = static_cast<Eigen::Index>(rows.size()) == n;  // rows == 0..n-1, no gather needed
    Eigen::MatrixXd sub;
    if (!whole) sub = V(rows, Eigen::all);
    std::vector<int> chosen(rows.size(), -1);
    for (auto e : out[s]) {
      const Expr& guard = g.transitions[e].guard;
      bool always = guard.op == Op::Literal && guard.value == 1.0;
      Eigen::ArrayXd mask = always  ? Eigen::ArrayXd::Ones(static_cast<Eigen::Index>(rows.size()))
                            : whole ? evaluate_columns(guard, V)
                                    : evaluate_columns(guard, sub);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (mask[static_cast<Eigen::Index>(i)] == 0.0) continue;
        if (chosen[i] < 0)
          chosen[i] = static_cast<int>(e);
        else
          ++diag.mask_violations;
      }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (chosen[i] < 0)
        ++diag.mask_violations;
      else
        active[chosen[i]].push_back(rows[i]);
    }
  }

  std::vector<RngStream> rngs;
  rngs.reserve(static_cast<std::size_t>(n));
  for (std::size_t e = 0; e < active.size(); ++e) {
    const Rows& rows = active[e];
    if (rows.empty()) continue;
    const Transition& tr = g.transitions[e];
    if (!tr.kernel.empty()) {
      rngs.clear();
      for (auto r : rows) rngs.push_back(step_rng.split(static_cast<std::uint64_t>(offset + r)));
      if (static_cast<Eigen::Index>(rows.size()) == n) {
        apply_kernel_columns(tr.kernel, V, rngs, &diag);
      } else {
        Eigen::MatrixXd sub = V(rows, Eigen::all);
        apply_kernel_columns(tr.kernel, sub, rngs, &diag);
        V(rows, Eigen::all) = sub;
      }
    }
    for (auto r : rows) Z[r] = tr.target;
  }

  for (auto& rows : at) rows.clear();
  for (Eigen::Index r = 0; r < n; ++r) at[Z[r]].push_back(r);
  for (int s = 0; s < ncp; ++s) {
    const Rows& rows = at[s];
    if (rows.empty()) continue;
    if (s == g.nil || g.scores[s].kind == ScoreSpec::Kind::One) {
      for (auto r : rows) W[r] = 1.0;
      continue;
    }
    if (static_cast<Eigen::Index>(rows.size()) == n) {
      W = score_columns(g.scores[s], V, &diag).matrix();
      continue;
    }
    Eigen::MatrixXd sub = V(rows, Eigen::all);
    Eigen::ArrayXd w = score_columns(g.scores[s], sub, &diag);
    for (std::size_t i = 0; i < rows.size(); ++i) W[rows[i]] = w[static_cast<Eigen::Index>(i)];
  }
}

}  // namespace

ParticleEnsemble vpf_init(const PPG& g, Checkpoint s0, Eigen::Index n, const RngStream&) {
  check_structure(g);
  if (s0 < 0 || s0 >= g.size()) throw StructureError("start checkpoint out of range");
  if (n < 1) throw Error("particle count must be at least 1");
  ParticleEnsemble ens;
  ens.V = Eigen::MatrixXd::Zero(n, g.var_count);
  ens.Z = Eigen::VectorXi::Constant(n, s0);
  if (s0 == g.nil)
    ens.W = Eigen::VectorXd::Ones(n);
  else
    ens.W = score_columns(g.scores[s0], ens.V, &ens.diag).matrix();
  ens.step = 1;
  return ens;
}

ParticleEnsemble vpf_step(const PPG& g, const ParticleEnsemble& ens, ResamplingScheme scheme, const RngStream& rng,
                          const EngineOptions& opt) {
  const Eigen::Index n = ens.size();
  const int k = ens.step + 1;
  const RngStream step_rng = rng.split(static_cast<std::uint64_t>(k));

  ParticleEnsemble next;
  next.step = k;
  next.diag = ens.diag;
  if (pairwise_sum(ens.W) == 0.0) ++next.diag.zero_weight_steps;
  auto idx = resample(scheme, ens.W, step_rng.split(kResampleStream));
  next.V = ens.V(idx, Eigen::all);
  next.Z = ens.Z(idx);
  next.W.resize(n);

  const auto out = outgoing(g);
  int workers = std::max(1, opt.threads);
  workers = static_cast<int>(std::min<Eigen::Index>(workers, n));
  if (workers <= 1) {
    advance_block(g, out, next.V, next.Z, next.W, 0, step_rng, next.diag);
  } else {
    std::vector<Diagnostics> local(workers);
    std::vector<std::thread> pool;
    Eigen::Index chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      Eigen::Index lo = w * chunk, len = std::min(chunk, n - lo);
      if (len <= 0) break;
      pool.emplace_back([&, lo, len, w] {
        advance_block(g, out, next.V.middleRows(lo, len), next.Z.segment(lo, len), next.W.segment(lo, len), lo,
                      step_rng, local[w]);
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& d : local) next.diag += d;
  }
  if (opt.check_masks && next.diag.mask_violations != ens.diag.mask_violations)
    throw StructureError("guard partition violated during step " + std::to_string(k));
  return next;
}

ParticleEnsemble vpf_run(const PPG& g, Checkpoint s0, int t, Eigen::Index n, ResamplingScheme scheme,
                         std::uint64_t seed, const EngineOptions& opt) {
  if (t < 1) throw Error("horizon must be at least 1");
  RngStream root(seed);
  ParticleEnsemble ens = vpf_init(g, s0, n, root);
  for (int k = 2; k <= t; ++k) ens = vpf_step(g, ens, scheme, root, opt);
  return ens;
}

ParticleEnsemble scalar_pf_run(const PPG& g, Checkpoint s0, int t, Eigen::Index n, ResamplingScheme scheme,
                               std::uint64_t seed) {
  if (t < 1) throw Error("horizon must be at least 1");
  check_structure(g);
  if (s0 < 0 || s0 >= g.size()) throw StructureError("start checkpoint out of range");
  if (n < 1) throw Error("particle count must be at least 1");
  const RngStream root(seed);
  const auto out = outgoing(g);
  const int m = g.var_count;

  ParticleEnsemble ens;
  ens.V = Eigen::MatrixXd::Zero(n, m);
  ens.Z = Eigen::VectorXi::Constant(n, s0);
  ens.W.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) ens.W[j] = score_at(g, s0, Store::Zero(m), &ens.diag);

  for (int k = 2; k <= t; ++k) {
    const RngStream step_rng = root.split(static_cast<std::uint64_t>(k));
    if (pairwise_sum(ens.W) == 0.0) ++ens.diag.zero_weight_steps;
    auto idx = resample(scheme, ens.W, step_rng.split(kResampleStream));
    Eigen::MatrixXd V(n, m);
    Eigen::VectorXi Z(n);
    Eigen::VectorXd W(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Store x = ens.V.row(idx[j]).transpose();
      Checkpoint z = ens.Z[idx[j]];
      int chosen = -1;
      for (auto e : out[z]) {
        if (evaluate(g.transitions[e].guard, x) == 0.0) continue;
        if (chosen < 0)
          chosen = static_cast<int>(e);
        else
          ++ens.diag.mask_violations;
      }
      if (chosen < 0) {
        ++ens.diag.mask_violations;
      } else {
        const Transition& tr = g.transitions[chosen];
        if (!tr.kernel.empty()) {
          RngStream r = step_rng.split(static_cast<std::uint64_t>(j));
          x = kernel_step(tr.kernel, x, r, &ens.diag);
        }
        z = tr.target;
      }
      V.row(j) = x.transpose();
      Z[j] = z;
      W[j] = score_at(g, z, x, &ens.diag);
    }
    ens.V = std::move(V);
    ens.Z = std::move(Z);
    ens.W = std::move(W);
    ens.step = k;
  }
  return ens;
}

void retain_freed_memory() {
#ifdef __GLIBC__
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

void write_snapshot_csv(std::ostream& os, const PPG& g, const ParticleEnsemble& ens) {
  for (int i = 0; i < g.var_count; ++i)
    os << (i < static_cast<int>(g.var_names.size()) ? g.var_names[i] : "x" + std::to_string(i)) << ',';
  os << "z,w\n";
  auto old = os.precision(17);
  for (Eigen::Index j = 0; j < ens.size(); ++j) {
    for (int i = 0; i < g.var_count; ++i) os << ens.V(j, i) << ',';
    os << ens.Z[j] << ',' << ens.W[j] << '\n';
  }
  os.precision(old);
}

}  // namespace ppgsmc
