#include <cmath>
#include <sstream>

#include "segrekin/collision.hpp"
#include "segrekin/error.hpp"

namespace segrekin {

TransportCoefficients transport_bgk_analytic(const MaxwellianParams& p, double nu_collision, int dim_v) {
  if (!(nu_collision > 0.0)) throw Error(ErrorCode::InvalidArgument, "collision rate must be positive");
  if (!(p.n > 0.0) || !(p.T > 0.0)) throw Error(ErrorCode::InvalidArgument, "density and temperature must be positive");
  TransportCoefficients tc;
  double base = p.n * p.T / nu_collision;
  tc.nu_visc = base;
  tc.kappa = 0.5 * (dim_v + 2) * base;
  tc.D_diff = base;
  tc.method = TransportMethod::BgkAnalytic;
  return tc;
}

namespace {

void refuse_truncated(const LinearCollisionOperator& op) {
  double frac = boundary_mass_fraction(op.M, op.vgrid);
  if (frac > kBoundaryMassTolerance) {
    std::ostringstream os;
    os << "velocity grid truncates the Maxwellian (boundary mass fraction " << frac << " > "
       << kBoundaryMassTolerance << "); refusing numeric transport coefficients";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

}  // namespace

TransportCoefficients transport_numeric(const LinearCollisionOperator& L, const LinearCollisionOperator& Gamma) {
  if (L.kind != OperatorKind::L || Gamma.kind != OperatorKind::Gamma)
    throw Error(ErrorCode::InvalidArgument, "transport_numeric expects (L, Gamma)");
  const VelocityGrid& vg = L.vgrid;
  if (vg.dim_v < 2) throw Error(ErrorCode::InvalidArgument, "shear viscosity needs velocity dim >= 2");
  refuse_truncated(L);
  refuse_truncated(Gamma);
  const std::size_t N = vg.size();
  const int d = vg.dim_v;
  const double T = L.params.T;
  std::vector<double> a12(N), b1(N), c1(N);
  std::vector<double> s_nu(N), s_k(N), s_d(N);
  for (std::size_t k = 0; k < N; ++k) {
    auto v = vg.velocity(k);
    double w[3], w2 = 0.0;
    for (int a = 0; a < d; ++a) {
      w[a] = v[a] - L.params.u[a];
      w2 += w[a] * w[a];
    }
    a12[k] = w[0] * w[1];
    b1[k] = (0.5 * w2 - 0.5 * (d + 2) * T) * w[0] / (T * T);
    c1[k] = w[0];
    s_nu[k] = L.M[k] * a12[k] / T;
    s_k[k] = L.M[k] * b1[k];
    s_d[k] = Gamma.M[k] * c1[k];
  }
  auto x_nu = solve_orthogonal(L, s_nu).x;
  auto x_k = solve_orthogonal(L, s_k).x;
  auto x_d = solve_orthogonal(Gamma, s_d).x;
  TransportCoefficients tc;
  tc.method = TransportMethod::NumericOperator;
  for (std::size_t k = 0; k < N; ++k) {
    tc.nu_visc -= a12[k] * x_nu[k];
    tc.kappa -= b1[k] * x_k[k];
    tc.D_diff -= c1[k] * x_d[k];
  }
  tc.nu_visc *= vg.weight;
  tc.kappa *= vg.weight * T * T;
  tc.D_diff *= vg.weight;
  return tc;
}

TransportCoefficients transport_coefficients(TransportMethod method, const MaxwellianParams& p, double nu_collision,
                                             const VelocityGrid* vg, const CrossSection* cs) {
  if (method == TransportMethod::BgkAnalytic) return transport_bgk_analytic(p, nu_collision, vg ? vg->dim_v : 3);
  if (!vg) throw Error(ErrorCode::InvalidArgument, "numeric transport coefficients need a velocity grid");
  if (!cs) {
    auto L = build_bgk_linearized(OperatorKind::L, p, *vg, nu_collision);
    auto G = build_bgk_linearized(OperatorKind::Gamma, p, *vg, nu_collision);
    return transport_numeric(L, G);
  }
  CollisionLattice lat(*vg, *cs);
  auto L = build_linearized(OperatorKind::L, p, lat);
  auto G = build_linearized(OperatorKind::Gamma, p, lat);
  return transport_numeric(L, G);
}

}  // namespace segrekin
