#include <cmath>

#include "segrekin/collision.hpp"
#include "segrekin/error.hpp"
#include "segrekin/parallel.hpp"

namespace segrekin {

void bgk_targets(std::span<const double> fr, std::span<const double> fb, const VelocityGrid& vg,
                 std::span<double> m_mix, double& n_r, double& n_b, std::array<double, 5>* warm) {
  const std::size_t N = vg.size();
  std::vector<double> tot(N);
  double sr = 0.0, sb = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    sr += fr[k];
    sb += fb[k];
    tot[k] = fr[k] + fb[k];
  }
  n_r = sr * vg.weight;
  n_b = sb * vg.weight;
  Moments m = moments(tot, vg);
  if (!m.defined || !(m.T > 0.0)) {
    std::fill(m_mix.begin(), m_mix.end(), 0.0);
    n_r = n_b = 0.0;
    return;
  }
  discrete_maxwellian_into(MaxwellianParams{1.0, m.u, m.T}, vg, m_mix, warm);
  double s = 0.0;
  for (double v : m_mix) s += v;
  s *= vg.weight;
  for (double& v : m_mix) v /= s;
}

CollisionSlabs bgk_relax(const SpeciesDistributions& state, double nu_collision) {
  if (!(nu_collision > 0.0)) throw Error(ErrorCode::InvalidArgument, "collision rate must be positive");
  const std::size_t N = state.nv();
  const std::size_t C = state.grid.size();
  CollisionSlabs out;
  out.r.assign(C * N, 0.0);
  out.b.assign(C * N, 0.0);
  parallel_for(C, 8, [&](std::size_t b, std::size_t e) {
    std::vector<double> M(N);
    for (std::size_t c = b; c < e; ++c) {
      double nr, nb;
      bgk_targets(state.slice_r(c), state.slice_b(c), state.vgrid, M, nr, nb);
      if (nr + nb == 0.0) continue;
      auto fr = state.slice_r(c);
      auto fb = state.slice_b(c);
      for (std::size_t k = 0; k < N; ++k) {
        out.r[c * N + k] = nu_collision * (nr * M[k] - fr[k]);
        out.b[c * N + k] = nu_collision * (nb * M[k] - fb[k]);
      }
    }
  });
  return out;
}

namespace {

double floored_log(double x, bool& floored) {
  if (x < kLogFloor) {
    floored = true;
    return std::log(kLogFloor);
  }
  return std::log(x);
}

double minus_weighted_log(std::span<const double> q, std::span<const double> f, double w, bool& floored) {
  double s = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) s += q[k] * floored_log(f[k], floored);
  return -s * w;
}

}  // namespace

EntropyProduction entropy_production_cell(std::span<const double> f1, std::span<const double> f2,
                                          const VelocityGrid& vg, CollisionModel model,
                                          const CollisionLattice* lattice, double nu_collision) {
  for (std::size_t k = 0; k < f1.size(); ++k)
    if (!(f1[k] >= 0.0) || !(f2[k] >= 0.0))
      throw Error(ErrorCode::Positivity, "entropy production needs nonnegative slices");
  EntropyProduction ep;
  const std::size_t N = vg.size();
  if (model == CollisionModel::ExactJ) {
    if (!lattice) throw Error(ErrorCode::InvalidArgument, "exact entropy production needs a collision lattice");
    std::vector<std::vector<double>> J;
    lattice->apply({{f1, f1}, {f1, f2}, {f2, f1}, {f2, f2}}, J);
    ep.N1 = minus_weighted_log(J[0], f1, vg.weight, ep.floored);
    ep.N2 = minus_weighted_log(J[3], f2, vg.weight, ep.floored);
    ep.Ncross = minus_weighted_log(J[1], f1, vg.weight, ep.floored) +
                minus_weighted_log(J[2], f2, vg.weight, ep.floored);
    return ep;
  }
  std::vector<double> Mmix(N), q(N);
  double n1, n2;
  bgk_targets(f1, f2, vg, Mmix, n1, n2);
  double total = 0.0;
  auto self = [&](std::span<const double> f) {
    Moments m = moments(f, vg);
    if (!m.defined) return 0.0;
    auto Ms = discrete_maxwellian(MaxwellianParams{m.n, m.u, m.T}, vg);
    for (std::size_t k = 0; k < N; ++k) q[k] = nu_collision * (Ms[k] - f[k]);
    return minus_weighted_log(q, f, vg.weight, ep.floored);
  };
  ep.N1 = self(f1);
  ep.N2 = self(f2);
  for (std::size_t k = 0; k < N; ++k) q[k] = nu_collision * (n1 * Mmix[k] - f1[k]);
  total += minus_weighted_log(q, f1, vg.weight, ep.floored);
  for (std::size_t k = 0; k < N; ++k) q[k] = nu_collision * (n2 * Mmix[k] - f2[k]);
  total += minus_weighted_log(q, f2, vg.weight, ep.floored);
  ep.Ncross = total - ep.N1 - ep.N2;
  return ep;
}

std::vector<EntropyProduction> entropy_production(const SpeciesDistributions& state, CollisionModel model,
                                                  const CollisionLattice* lattice, double nu_collision) {
  std::vector<EntropyProduction> out(state.grid.size());
  bool floored = false;
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = entropy_production_cell(state.slice_r(c), state.slice_b(c), state.vgrid, model, lattice, nu_collision);
    floored = floored || out[c].floored;
  }
  if (floored) emit_warning("entropy production: log floor activated in at least one cell");
  return out;
}

}  // namespace segrekin
