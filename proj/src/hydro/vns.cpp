#include <algorithm>
#include <cmath>
#include <sstream>

#include "segrekin/error.hpp"
#include "segrekin/hydro.hpp"
#include "spectral.hpp"

namespace segrekin {

ScalarField HydroState::pressure() const {
  ScalarField P(grid);
  for (std::size_t i = 0; i < P.size(); ++i) P[i] = rho[i] * T[i];
  return P;
}

void HydroState::check_positivity(const char* where) const {
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0) || !(T[i] > 0.0) || !(std::abs(phi[i]) <= rho[i] * (1.0 + 1e-12))) {
      std::ostringstream os;
      os << where << ": positivity violated at cell " << i << " (rho=" << rho[i] << ", T=" << T[i]
         << ", phi=" << phi[i] << ")";
      throw Error(ErrorCode::Positivity, os.str());
    }
  }
}

double hydro_multiplier(const KacKernel& kernel, std::size_t idx) { return 0.5 * kernel.multipliers[idx]; }

VectorField hydro_force(const KacKernel& kernel, const ScalarField& g) { return grad_convolve(kernel, g, -0.5); }

ScalarField hydro_convolve(const KacKernel& kernel, const ScalarField& g) {
  ScalarField out = convolve(kernel, g);
  for (double& v : out.values) v *= 0.5;
  return out;
}

std::array<double, 3> TransportModel::local(double rho, double T) const {
  double f = scale_with_state ? rho * T / (n_ref * T_ref) : 1.0;
  return {coeffs.nu_visc * f, coeffs.kappa * f, coeffs.D_diff * f};
}

namespace {

std::vector<double> grad(const SpatialGrid& g, std::span<const double> v, int axis, GradientMethod m) {
  if (axis >= g.dim) return std::vector<double>(v.size(), 0.0);
  return m == GradientMethod::Spectral ? detail::derivative(g, v, axis) : detail::centered_derivative(g, v, axis);
}

}  // namespace

FluxQ compute_Q(const HydroState& s, const KacKernel& kernel, GradientMethod method) {
  s.check_positivity("compute_Q");
  const SpatialGrid& g = s.grid;
  const std::size_t N = g.size();
  FluxQ out{VectorField(g, g.dim), VectorField(g, g.dim), VectorField(g, g.dim)};
  std::vector<double> c(N);
  for (std::size_t i = 0; i < N; ++i) c[i] = s.phi[i] / s.rho[i];
  VectorField Kphi = hydro_force(kernel, s.phi);
  for (int a = 0; a < g.dim; ++a) {
    auto dc = grad(g, c, a, method);
    for (std::size_t i = 0; i < N; ++i) {
      double r2 = s.rho[i] * s.rho[i];
      double v = (r2 - s.phi[i] * s.phi[i]) / (r2 * s.T[i]) * Kphi.comp(a)[i];
      out.gradient_part.comp(a)[i] = dc[i];
      out.vlasov_part.comp(a)[i] = v;
      out.q.comp(a)[i] = dc[i] + v;
    }
  }
  return out;
}

double HydroRhs::max_abs() const {
  return std::max({drho.max_abs(), du.max_abs(), dT.max_abs(), dphi.max_abs()});
}

HydroRhs vns_rhs(const HydroState& s, const KacKernel& kernel, const TransportModel* coeffs, double eps,
                 GradientMethod method) {
  if (eps < 0.0) throw Error(ErrorCode::InvalidArgument, "eps must be nonnegative");
  if (eps > 0.0 && !coeffs) throw Error(ErrorCode::InvalidArgument, "eps > 0 needs transport coefficients");
  require_same_grid(kernel.grid, s.grid, "vns_rhs");
  s.check_positivity("vns_rhs");
  const SpatialGrid& g = s.grid;
  const std::size_t N = g.size();
  const int d = s.dof;
  const int dim = g.dim;
  HydroRhs r{ScalarField(g), VectorField(g, d), ScalarField(g), ScalarField(g)};
  ScalarField P = s.pressure();
  VectorField Krho = hydro_force(kernel, s.rho);
  VectorField Kphi = hydro_force(kernel, s.phi);

  std::vector<std::vector<double>> G(d * d, std::vector<double>(N, 0.0));  // G[i*d+j] = d_i u_j
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < d; ++j) G[i * d + j] = grad(g, s.u.comp(j), i, method);
  std::vector<double> divu(N, 0.0);
  for (int i = 0; i < dim; ++i)
    for (std::size_t c = 0; c < N; ++c) divu[c] += G[i * d + i][c];

  std::vector<double> flux(N);
  for (int a = 0; a < dim; ++a) {
    for (std::size_t c = 0; c < N; ++c) flux[c] = s.rho[c] * s.u.comp(a)[c];
    auto df = grad(g, flux, a, method);
    for (std::size_t c = 0; c < N; ++c) r.drho[c] -= df[c];
    for (std::size_t c = 0; c < N; ++c) flux[c] = s.phi[c] * s.u.comp(a)[c];
    df = grad(g, flux, a, method);
    for (std::size_t c = 0; c < N; ++c) r.dphi[c] -= df[c];
  }

  std::vector<std::array<double, 3>> loc(N, {0.0, 0.0, 0.0});
  FluxQ Q;
  bool dissipative = eps > 0.0;
  if (dissipative) {
    for (std::size_t c = 0; c < N; ++c) loc[c] = coeffs->local(s.rho[c], s.T[c]);
    Q = compute_Q(s, kernel, method);
    for (int a = 0; a < dim; ++a) {
      for (std::size_t c = 0; c < N; ++c) flux[c] = loc[c][2] * Q.q.comp(a)[c];
      auto df = grad(g, flux, a, method);
      for (std::size_t c = 0; c < N; ++c) r.dphi[c] += eps * df[c];
    }
  }

  // sigma_ij = -nu (d_i u_j + d_j u_i - (2/d) delta_ij div u)
  std::vector<std::vector<double>> sigma(d * d, std::vector<double>(N, 0.0));
  if (dissipative)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (std::size_t c = 0; c < N; ++c)
          sigma[i * d + j][c] =
              -loc[c][0] * (G[i * d + j][c] + G[j * d + i][c] - (i == j ? 2.0 / d * divu[c] : 0.0));

  for (int j = 0; j < d; ++j) {
    auto du = r.du.comp(j);
    for (int a = 0; a < dim; ++a)
      for (std::size_t c = 0; c < N; ++c) du[c] -= s.u.comp(a)[c] * G[a * d + j][c];
    if (j < dim) {
      auto dP = grad(g, P.values, j, method);
      for (std::size_t c = 0; c < N; ++c)
        du[c] += (-dP[c] + s.rho[c] * Krho.comp(j)[c] - s.phi[c] * Kphi.comp(j)[c]) / s.rho[c];
    }
    if (dissipative)
      for (int i = 0; i < dim; ++i) {
        auto ds = grad(g, sigma[i * d + j], i, method);
        for (std::size_t c = 0; c < N; ++c) du[c] -= eps * ds[c] / s.rho[c];
      }
  }

  std::vector<double> heat(N, 0.0);
  for (int a = 0; a < dim; ++a) {
    auto dT = grad(g, s.T.values, a, method);
    for (std::size_t c = 0; c < N; ++c) r.dT[c] -= s.u.comp(a)[c] * dT[c];
    if (dissipative) {
      for (std::size_t c = 0; c < N; ++c) flux[c] = loc[c][1] * dT[c];
      auto dq = grad(g, flux, a, method);
      for (std::size_t c = 0; c < N; ++c) heat[c] += dq[c];
    }
  }
  for (std::size_t c = 0; c < N; ++c) {
    double src = -P[c] * divu[c];
    if (dissipative) {
      double sg = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) sg += sigma[i * d + j][c] * G[i * d + j][c];
      double work = 0.0;
      for (int a = 0; a < dim; ++a) work += Kphi.comp(a)[c] * loc[c][2] * Q.q.comp(a)[c];
      src += eps * heat[c] - eps * sg - eps * work;
    }
    r.dT[c] += 2.0 / (d * s.rho[c]) * src;
  }
  return r;
}

HydroTotals hydro_totals(const HydroState& s) {
  HydroTotals t;
  double dV = s.grid.cell_volume();
  for (std::size_t c = 0; c < s.grid.size(); ++c) {
    t.mass += s.rho[c] * dV;
    t.phi += s.phi[c] * dV;
    double u2 = 0.0;
    for (int j = 0; j < s.dof; ++j) {
      double u = s.u.comp(j)[c];
      if (j < 3) t.momentum[j] += s.rho[c] * u * dV;
      u2 += u * u;
    }
    t.energy += (0.5 * s.rho[c] * u2 + 0.5 * s.dof * s.rho[c] * s.T[c]) * dV;
  }
  return t;
}

double vns_admissible_dt(const HydroState& s, const TransportModel* coeffs, double eps, const VnsOptions& opt) {
  const SpatialGrid& g = s.grid;
  double gam = s.gamma();
  double dt = 1e300;
  for (int a = 0; a < g.dim; ++a) {
    double smax = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c)
      smax = std::max(smax, std::abs(s.u.comp(a)[c]) + std::sqrt(gam * std::max(s.T[c], 0.0)));
    if (smax > 0.0) dt = std::min(dt, opt.cfl * g.spacing[a] / smax);
  }
  if (eps > 0.0 && coeffs) {
    double diff = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
      auto l = coeffs->local(s.rho[c], s.T[c]);
      diff = std::max({diff, l[0] / s.rho[c], 2.0 * l[1] / (s.dof * s.rho[c]), l[2] / s.rho[c]});
    }
    if (diff > 0.0)
      for (int a = 0; a < g.dim; ++a)
        dt = std::min(dt, opt.viscous_cfl * g.spacing[a] * g.spacing[a] / (g.dim * eps * diff));
  }
  return dt;
}

namespace {

double limited_slope(double dl, double dr, SlopeLimiter lim) {
  switch (lim) {
    case SlopeLimiter::None: return 0.5 * (dl + dr);
    case SlopeLimiter::Minmod:
      if (dl * dr <= 0.0) return 0.0;
      return std::abs(dl) < std::abs(dr) ? dl : dr;
    case SlopeLimiter::MC: {
      if (dl * dr <= 0.0) return 0.0;
      double m = std::min({2.0 * std::abs(dl), 2.0 * std::abs(dr), 0.5 * std::abs(dl + dr)});
      return dl > 0.0 ? m : -m;
    }
  }
  return 0.0;
}

// Conserved layout: [rho, m_0..m_{d-1}, E, phi].
struct Conserved {
  int d;
  std::size_t N;
  std::vector<double> v;
  Conserved(int d_, std::size_t N_) : d(d_), N(N_), v((3 + d_) * N_, 0.0) {}
  double* var(int k) { return v.data() + k * N; }
  const double* var(int k) const { return v.data() + k * N; }
};

Conserved to_conserved(const HydroState& s) {
  Conserved U(s.dof, s.grid.size());
  for (std::size_t c = 0; c < U.N; ++c) {
    double rho = s.rho[c], u2 = 0.0;
    U.var(0)[c] = rho;
    for (int j = 0; j < s.dof; ++j) {
      double u = s.u.comp(j)[c];
      U.var(1 + j)[c] = rho * u;
      u2 += u * u;
    }
    U.var(1 + s.dof)[c] = 0.5 * rho * u2 + 0.5 * s.dof * rho * s.T[c];
    U.var(2 + s.dof)[c] = s.phi[c];
  }
  return U;
}

HydroState to_primitive(const Conserved& U, const SpatialGrid& g) {
  HydroState s(g, U.d);
  for (std::size_t c = 0; c < U.N; ++c) {
    double rho = U.var(0)[c], u2 = 0.0;
    s.rho[c] = rho;
    for (int j = 0; j < U.d; ++j) {
      double u = U.var(1 + j)[c] / rho;
      s.u.comp(j)[c] = u;
      u2 += u * u;
    }
    s.T[c] = (U.var(1 + U.d)[c] - 0.5 * rho * u2) / (0.5 * U.d * rho);
    s.phi[c] = U.var(2 + U.d)[c];
  }
  return s;
}

struct Face {
  double rho, T, c;
  double u[8];
};

void physical_flux(const Face& w, int d, int a, double* F, double& speed, double gam) {
  double rho = w.rho, P = rho * w.T, u2 = 0.0;
  for (int j = 0; j < d; ++j) u2 += w.u[j] * w.u[j];
  double ua = w.u[a];
  double E = 0.5 * rho * u2 + 0.5 * d * P;
  F[0] = rho * ua;
  for (int j = 0; j < d; ++j) F[1 + j] = rho * ua * w.u[j] + (j == a ? P : 0.0);
  F[1 + d] = (E + P) * ua;
  F[2 + d] = rho * w.c * ua;
  speed = std::abs(ua) + std::sqrt(gam * w.T);
}

void state_vector(const Face& w, int d, double* U) {
  double u2 = 0.0;
  U[0] = w.rho;
  for (int j = 0; j < d; ++j) {
    U[1 + j] = w.rho * w.u[j];
    u2 += w.u[j] * w.u[j];
  }
  U[1 + d] = 0.5 * w.rho * u2 + 0.5 * d * w.rho * w.T;
  U[2 + d] = w.rho * w.c;
}

Conserved fv_rhs(const Conserved& U, const SpatialGrid& g, const KacKernel& kernel, const TransportModel* coeffs,
                 double eps, const VnsOptions& opt) {
  HydroState s = to_primitive(U, g);
  s.check_positivity("vns_step");
  const int d = s.dof;
  const int dim = g.dim;
  const std::size_t N = g.size();
  const double gam = s.gamma();
  Conserved R(d, N);
  const int nprim = 3 + d;  // rho, u_j, T, c
  std::vector<std::vector<double>> w(nprim, std::vector<double>(N));
  for (std::size_t c = 0; c < N; ++c) {
    w[0][c] = s.rho[c];
    for (int j = 0; j < d; ++j) w[1 + j][c] = s.u.comp(j)[c];
    w[1 + d][c] = s.T[c];
    w[2 + d][c] = s.phi[c] / s.rho[c];
  }
  VectorField Krho = hydro_force(kernel, s.rho);
  VectorField Kphi = hydro_force(kernel, s.phi);
  bool dissipative = eps > 0.0 && coeffs;
  // Cell-centred gradients for tangential derivatives at faces.
  std::vector<std::vector<std::vector<double>>> cgrad;
  if (dissipative) {
    cgrad.assign(dim, std::vector<std::vector<double>>(nprim));
    for (int a = 0; a < dim; ++a)
      for (int k = 0; k < nprim; ++k) cgrad[a][k] = detail::centered_derivative(g, w[k], a);
  }
  std::vector<double> F(3 + d), FL(3 + d), FR(3 + d), UL(3 + d), UR(3 + d);
  for (int a = 0; a < dim; ++a) {
    const double h = g.spacing[a];
    for (std::size_t c = 0; c < N; ++c) {
      auto co = g.coords(c);
      auto at = [&](long off) {
        auto q = co;
        q[a] += off;
        return g.index(q[0], q[1]);
      };
      const std::size_t im = at(-1), ip = at(1), ipp = at(2);
      Face L{}, Rf{};
      double vl[16], vr[16];
      bool ok = true;
      for (int k = 0; k < nprim; ++k) {
        double sl = limited_slope(w[k][c] - w[k][im], w[k][ip] - w[k][c], opt.limiter);
        double sr = limited_slope(w[k][ip] - w[k][c], w[k][ipp] - w[k][ip], opt.limiter);
        vl[k] = w[k][c] + 0.5 * sl;
        vr[k] = w[k][ip] - 0.5 * sr;
      }
      if (!(vl[0] > 0.0) || !(vr[0] > 0.0) || !(vl[1 + d] > 0.0) || !(vr[1 + d] > 0.0) ||
          std::abs(vl[2 + d]) > 1.0 || std::abs(vr[2 + d]) > 1.0)
        ok = false;
      if (!ok)
        for (int k = 0; k < nprim; ++k) {
          vl[k] = w[k][c];
          vr[k] = w[k][ip];
        }
      L.rho = vl[0];
      Rf.rho = vr[0];
      for (int j = 0; j < d; ++j) {
        L.u[j] = vl[1 + j];
        Rf.u[j] = vr[1 + j];
      }
      L.T = vl[1 + d];
      Rf.T = vr[1 + d];
      L.c = vl[2 + d];
      Rf.c = vr[2 + d];
      double sL, sR;
      physical_flux(L, d, a, FL.data(), sL, gam);
      physical_flux(Rf, d, a, FR.data(), sR, gam);
      state_vector(L, d, UL.data());
      state_vector(Rf, d, UR.data());
      double smax = std::max(sL, sR);
      for (int k = 0; k < 3 + d; ++k) F[k] = 0.5 * (FL[k] + FR[k]) - 0.5 * smax * (UR[k] - UL[k]);

      if (dissipative) {
        double rho_f = 0.5 * (s.rho[c] + s.rho[ip]);
        double T_f = 0.5 * (s.T[c] + s.T[ip]);
        double phi_f = 0.5 * (s.phi[c] + s.phi[ip]);
        auto lc = coeffs->local(rho_f, T_f);
        // Face gradient of primitive k along axis b.
        auto fgrad = [&](int k, int b) {
          if (b >= dim) return 0.0;
          if (b == a) return (w[k][ip] - w[k][c]) / h;
          return 0.5 * (cgrad[b][k][c] + cgrad[b][k][ip]);
        };
        double uf[8];
        for (int j = 0; j < d; ++j) uf[j] = 0.5 * (w[1 + j][c] + w[1 + j][ip]);
        double divu = 0.0;
        for (int b = 0; b < dim; ++b) divu += fgrad(1 + b, b);
        double work = 0.0;
        for (int j = 0; j < d; ++j) {
          double sig = -lc[0] * (fgrad(1 + j, a) + fgrad(1 + a, j) - (j == a ? 2.0 / d * divu : 0.0));
          F[1 + j] += eps * sig;
          work += sig * uf[j];
        }
        F[1 + d] += eps * work - eps * lc[1] * fgrad(1 + d, a);
        double kf = 0.5 * (Kphi.comp(a)[c] + Kphi.comp(a)[ip]);
        double q = fgrad(2 + d, a) + (rho_f * rho_f - phi_f * phi_f) / (rho_f * rho_f * T_f) * kf;
        F[2 + d] -= eps * lc[2] * q;
      }
      for (int k = 0; k < 3 + d; ++k) {
        R.var(k)[c] -= F[k] / h;
        R.var(k)[ip] += F[k] / h;
      }
    }
  }
  FluxQ Q;
  if (dissipative) Q = compute_Q(s, kernel, GradientMethod::Spectral);
  for (std::size_t c = 0; c < N; ++c) {
    double uS = 0.0;
    for (int a = 0; a < dim; ++a) {
      double Sm = s.rho[c] * Krho.comp(a)[c] - s.phi[c] * Kphi.comp(a)[c];
      R.var(1 + a)[c] += Sm;
      uS += s.u.comp(a)[c] * Sm;
    }
    double work = 0.0;
    if (dissipative) {
      double D = coeffs->local(s.rho[c], s.T[c])[2];
      for (int a = 0; a < dim; ++a) work += Kphi.comp(a)[c] * D * Q.q.comp(a)[c];
    }
    R.var(1 + d)[c] += uS - eps * work;
  }
  return R;
}

Conserved advance(const Conserved& U0, const SpatialGrid& g, const KacKernel& kernel, const TransportModel* coeffs,
                  double eps, double dt, const VnsOptions& opt) {
  auto axpy = [](const Conserved& a, double alpha, const Conserved& b, double beta, const Conserved& r, double h) {
    Conserved out(a.d, a.N);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = alpha * a.v[i] + beta * (b.v[i] + h * r.v[i]);
    return out;
  };
  Conserved k1 = fv_rhs(U0, g, kernel, coeffs, eps, opt);
  Conserved U1 = axpy(U0, 0.0, U0, 1.0, k1, dt);
  Conserved k2 = fv_rhs(U1, g, kernel, coeffs, eps, opt);
  if (opt.rk_order == 3) {
    Conserved U2 = axpy(U0, 0.75, U1, 0.25, k2, dt);
    Conserved k3 = fv_rhs(U2, g, kernel, coeffs, eps, opt);
    return axpy(U0, 1.0 / 3.0, U2, 2.0 / 3.0, k3, dt);
  }
  return axpy(U0, 0.5, U1, 0.5, k2, dt);
}

Conserved advance_retry(const Conserved& U0, const SpatialGrid& g, const KacKernel& kernel,
                        const TransportModel* coeffs, double eps, double dt, const VnsOptions& opt, int depth) {
  try {
    Conserved U = advance(U0, g, kernel, coeffs, eps, dt, opt);
    to_primitive(U, g).check_positivity("vns_step");
    return U;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Positivity || depth >= opt.max_retries) throw;
    Conserved half = advance_retry(U0, g, kernel, coeffs, eps, 0.5 * dt, opt, depth + 1);
    return advance_retry(half, g, kernel, coeffs, eps, 0.5 * dt, opt, depth + 1);
  }
}

}  // namespace

HydroState vns_step(const HydroState& s, const KacKernel& kernel, const TransportModel* coeffs, double eps, double dt,
                    const VnsOptions& opt) {
  if (eps < 0.0) throw Error(ErrorCode::InvalidArgument, "eps must be nonnegative");
  if (eps > 0.0 && !coeffs) throw Error(ErrorCode::InvalidArgument, "eps > 0 needs transport coefficients");
  if (s.dof > 8) throw Error(ErrorCode::InvalidArgument, "at most 8 velocity components");
  require_same_grid(kernel.grid, s.grid, "vns_step");
  s.check_positivity("vns_step");
  double limit = vns_admissible_dt(s, coeffs, eps, opt);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt << " violates the hydro CFL bound; admissible dt <= " << limit;
    throw Error(ErrorCode::StabilityViolation, os.str());
  }
  Conserved U = advance_retry(to_conserved(s), s.grid, kernel, coeffs, eps, dt, opt, 0);
  return to_primitive(U, s.grid);
}

}  // namespace segrekin
