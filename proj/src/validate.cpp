#include "ppgsmc/validate.hpp"

#include <cmath>
#include <sstream>

namespace ppgsmc {

Store random_store(int m, RngStream& rng) {
  Store v(m);
  for (int i = 0; i < m; ++i) {
    double kind = rng.uniform();
    double u = rng.uniform();
    if (kind < 0.45)
      v[i] = std::floor(u * 7.0) - 2.0;  // -2..4
    else if (kind < 0.95)
      v[i] = -10.0 + 20.0 * u;
    else
      v[i] = u < 0.5 ? -ext::inf : ext::inf;
  }
  return v;
}

namespace {

using Conj = std::vector<Expr>;

// Comparisons written as the complement of another (!=, >=, >) become a
// negated ==, <, <=. Stores hold no NaN, so these are exact complements.
Expr canonical(const Expr& e) {
  switch (e.op) {
    case Op::Ne: return !apply(Op::Eq, e.args[0], e.args[1]);
    case Op::Ge: return !apply(Op::Lt, e.args[0], e.args[1]);
    case Op::Gt: return !apply(Op::Le, e.args[0], e.args[1]);
    case Op::Not: {
      Expr inner = canonical(e.args[0]);
      if (inner.op == Op::Not) return inner.args[0];
      return !inner;
    }
    default: return e;
  }
}

void split_and(const Expr& e, Conj& out) {
  if (e.op == Op::And) {
    split_and(e.args[0], out);
    split_and(e.args[1], out);
  } else if (!(e.op == Op::Literal && e.value == 1.0)) {
    out.push_back(canonical(e));
  }
}

bool is_negation_of(const Expr& lit, const Expr& atom) {
  return lit.op == Op::Not && lit.args[0] == atom;
}

bool decide(std::vector<Conj> gs) {
  if (gs.empty()) return false;
  if (gs.size() == 1) return gs[0].empty();
  for (const auto& g : gs)
    if (g.empty()) return false;  // an unconditional guard next to others overlaps
  Expr atom = gs[0][0];
  if (atom.op == Op::Not) atom = atom.args[0];
  std::vector<Conj> pos, neg;
  for (auto& g : gs) {
    bool placed = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] == atom || is_negation_of(g[i], atom)) {
        bool positive = g[i] == atom;
        Conj rest = g;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        (positive ? pos : neg).push_back(std::move(rest));
        placed = true;
        break;
      }
    }
    if (!placed) return false;
  }
  return decide(std::move(pos)) && decide(std::move(neg));
}

}  // namespace

bool guards_syntactically_partition(const std::vector<Expr>& guards) {
  std::vector<Conj> gs;
  for (const auto& g : guards) {
    Conj c;
    split_and(g, c);
    if (g.op == Op::Literal && g.value == 0.0) return false;
    gs.push_back(std::move(c));
  }
  return decide(std::move(gs));
}

ValidationReport validate_ppg(const PPG& g, std::size_t samples, std::uint64_t seed) {
  check_structure(g);
  ValidationReport rep;
  const int n = g.size();
  rep.partition_exact.assign(n, false);
  auto out = outgoing(g);

  const auto& nil_out = out[g.nil];
  bool nil_ok = nil_out.size() == 1;
  if (nil_ok) {
    const auto& t = g.transitions[nil_out[0]];
    nil_ok = t.target == g.nil && t.kernel.empty() && t.guard.op == Op::Literal && t.guard.value == 1.0;
  }
  if (!nil_ok)
    rep.violations.push_back({Violation::Kind::NilSelfLoop, g.nil, "nil must self-loop", std::nullopt});
  if (g.scores[g.nil].kind != ScoreSpec::Kind::One)
    rep.violations.push_back({Violation::Kind::NilScore, g.nil, "score of nil must be the constant 1", std::nullopt});

  RngStream root(seed);
  for (int s = 0; s < n; ++s) {
    RngStream rng = root.split(static_cast<std::uint64_t>(s));
    std::vector<Expr> guards;
    for (auto i : out[s]) guards.push_back(g.transitions[i].guard);
    bool exact = guards_syntactically_partition(guards);
    rep.partition_exact[s] = exact;
    bool partition_reported = false, range_reported = false;
    if (guards.empty()) {
      rep.violations.push_back({Violation::Kind::GuardPartition, s, "checkpoint has no outgoing transition", std::nullopt});
      partition_reported = true;
    }
    for (std::size_t k = 0; k < samples && !(partition_reported && range_reported); ++k) {
      Store v = random_store(g.var_count, rng);
      if (!range_reported) {
        double x = score_raw(g.scores[s], v);
        if (!(x >= 0.0 && x <= 1.0)) {
          std::ostringstream os;
          os << "score " << x << " outside [0,1]";
          rep.violations.push_back({Violation::Kind::ScoreRange, s, os.str(), v});
          range_reported = true;
        }
      }
      if (!exact && !partition_reported) {
        double sum = 0.0;
        for (const auto& gd : guards) sum += evaluate(gd, v);
        if (sum != 1.0) {
          std::ostringstream os;
          os << "guards sum to " << sum << " instead of 1";
          rep.violations.push_back({Violation::Kind::GuardPartition, s, os.str(), v});
          partition_reported = true;
        }
      }
    }
  }
  return rep;
}

std::string to_string(const Violation& v) {
  std::ostringstream os;
  os << "checkpoint " << v.checkpoint << ": " << v.message;
  if (v.witness) {
    os << " at store (";
    for (Eigen::Index i = 0; i < v.witness->size(); ++i) os << (i ? ", " : "") << (*v.witness)[i];
    os << ')';
  }
  return os.str();
}

}  // namespace ppgsmc
