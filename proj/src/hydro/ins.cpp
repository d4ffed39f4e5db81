#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "segrekin/error.hpp"
#include "segrekin/hydro.hpp"
#include "spectral.hpp"

namespace segrekin {

namespace {

using detail::cvec;

// Wavevector with Nyquist components dropped, matching detail::derivative.
std::array<double, 2> k_eff(const SpatialGrid& g, std::size_t idx) {
  auto k = detail::wavevector(g, idx);
  for (int a = 0; a < g.dim; ++a)
    if (detail::is_nyquist(g, idx, a)) k[a] = 0.0;
  return k;
}

void project_hat(const SpatialGrid& g, std::vector<cvec>& uh) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto k = k_eff(g, i);
    double k2 = 0.0;
    std::complex<double> kv = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      k2 += k[a] * k[a];
      kv += k[a] * uh[a][i];
    }
    if (k2 == 0.0) continue;
    for (int a = 0; a < g.dim; ++a) uh[a][i] -= k[a] * kv / k2;
  }
}

double phi_rate(const SpatialGrid& g, const KacKernel& kernel, std::size_t idx, double rho_bar, double T_bar,
                double D) {
  double k2 = detail::k_squared(g, idx);
  return -D * k2 * (1.0 / rho_bar - hydro_multiplier(kernel, idx) / T_bar);
}

void check_divergence(const INSState& s, const char* where) {
  double div = ins_divergence(s);
  if (div > 1e-8) {
    std::ostringstream os;
    os << where << ": velocity is not divergence free (max |div u| = " << div << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

// Explicit part: advection and Vlasov forcing, velocity projected.
struct Nonlinear {
  std::vector<cvec> u;
  cvec phi, theta, rho;
  cvec pressure;
};

Nonlinear nonlinear(const INSState& s, const KacKernel& kernel, const INSParams& prm) {
  const SpatialGrid& g = s.grid;
  const std::size_t N = g.size();
  const int dim = g.dim;
  const bool full = prm.variant == INSVariant::Full;
  Nonlinear out;
  VectorField Kphi = hydro_force(kernel, s.phi);
  VectorField Krho = full ? hydro_force(kernel, s.rho) : VectorField(g, dim);
  std::vector<double> flux(N), adv(N);
  for (int j = 0; j < dim; ++j) {
    std::fill(adv.begin(), adv.end(), 0.0);
    for (int a = 0; a < dim; ++a) {
      auto du = detail::derivative(g, s.u.comp(j), a);
      for (std::size_t c = 0; c < N; ++c) adv[c] -= s.u.comp(a)[c] * du[c];
    }
    for (std::size_t c = 0; c < N; ++c) {
      adv[c] -= s.phi[c] * Kphi.comp(j)[c] / s.rho_bar;
      if (full) adv[c] += s.rho[c] * Krho.comp(j)[c] / s.rho_bar;
    }
    out.u.push_back(detail::forward(g, adv));
  }
  out.pressure.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    auto k = k_eff(g, i);
    double k2 = 0.0;
    std::complex<double> kv = 0.0;
    for (int a = 0; a < dim; ++a) {
      k2 += k[a] * k[a];
      kv += k[a] * out.u[a][i];
    }
    if (k2 > 0.0) out.pressure[i] = std::complex<double>(0.0, 1.0) * kv / k2;
  }
  project_hat(g, out.u);

  auto divergence_flux = [&](const ScalarField& q) {
    std::vector<double> r(N, 0.0);
    for (int a = 0; a < dim; ++a) {
      for (std::size_t c = 0; c < N; ++c) flux[c] = s.u.comp(a)[c] * q[c];
      auto d = detail::derivative(g, flux, a);
      for (std::size_t c = 0; c < N; ++c) r[c] -= d[c];
    }
    return r;
  };
  out.phi = detail::forward(g, divergence_flux(s.phi));
  if (full) {
    out.rho = detail::forward(g, divergence_flux(s.rho));
    auto th = divergence_flux(s.theta);
    for (int a = 0; a < dim; ++a)
      for (std::size_t c = 0; c < N; ++c) th[c] += 0.4 * s.u.comp(a)[c] * Krho.comp(a)[c] / s.rho_bar;
    out.theta = detail::forward(g, th);
  } else {
    out.rho.assign(N, 0.0);
    out.theta.assign(N, 0.0);
  }
  return out;
}

struct Linear {
  std::vector<double> u, phi, theta;
};

Linear linear_rates(const INSState& s, const KacKernel& kernel, const INSParams& prm) {
  const SpatialGrid& g = s.grid;
  Linear L{std::vector<double>(g.size()), std::vector<double>(g.size()), std::vector<double>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    double k2 = detail::k_squared(g, i);
    L.u[i] = -prm.nu_visc * k2;
    L.phi[i] = phi_rate(g, kernel, i, s.rho_bar, s.T_bar, prm.D_diff);
    L.theta[i] = prm.variant == INSVariant::Full ? -0.4 * prm.kappa * k2 : 0.0;
  }
  return L;
}

struct Spectral {
  std::vector<cvec> u;
  cvec phi, theta, rho;
};

Spectral to_spectral(const INSState& s) {
  Spectral h;
  for (int a = 0; a < s.grid.dim; ++a) h.u.push_back(detail::forward(s.grid, s.u.comp(a)));
  h.phi = detail::forward(s.grid, s.phi.values);
  h.theta = detail::forward(s.grid, s.theta.values);
  h.rho = detail::forward(s.grid, s.rho.values);
  return h;
}

void from_spectral(const Spectral& h, INSState& s) {
  for (int a = 0; a < s.grid.dim; ++a) {
    auto v = detail::inverse_real(s.grid, h.u[a]);
    std::copy(v.begin(), v.end(), s.u.comp(a).begin());
  }
  s.phi.values = detail::inverse_real(s.grid, h.phi);
  s.theta.values = detail::inverse_real(s.grid, h.theta);
  s.rho.values = detail::inverse_real(s.grid, h.rho);
}

}  // namespace

void project_divergence_free(VectorField& u) {
  const SpatialGrid& g = u.grid;
  std::vector<cvec> uh;
  for (int a = 0; a < g.dim; ++a) uh.push_back(detail::forward(g, u.comp(a)));
  project_hat(g, uh);
  for (int a = 0; a < g.dim; ++a) {
    auto v = detail::inverse_real(g, uh[a]);
    std::copy(v.begin(), v.end(), u.comp(a).begin());
  }
}

double ins_divergence(const INSState& s) {
  const SpatialGrid& g = s.grid;
  std::vector<double> div(g.size(), 0.0);
  for (int a = 0; a < g.dim; ++a) {
    auto d = detail::derivative(g, s.u.comp(a), a);
    for (std::size_t c = 0; c < g.size(); ++c) div[c] += d[c];
  }
  double m = 0.0;
  for (double v : div) m = std::max(m, std::abs(v));
  return m;
}

double ins_constraint_defect(const INSState& s, const KacKernel& kernel) {
  ScalarField c = hydro_convolve(kernel, s.rho);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += s.rho[i] + s.theta[i];
  double m = 0.0;
  for (int a = 0; a < s.grid.dim; ++a)
    for (double v : detail::derivative(s.grid, c.values, a)) m = std::max(m, std::abs(v));
  return m;
}

INSRhs ins_rhs(const INSState& s, const KacKernel& kernel, const INSParams& prm) {
  require_same_grid(kernel.grid, s.grid, "ins_rhs");
  check_divergence(s, "ins_rhs");
  const SpatialGrid& g = s.grid;
  Nonlinear nl = nonlinear(s, kernel, prm);
  Linear L = linear_rates(s, kernel, prm);
  Spectral h = to_spectral(s);
  INSRhs r{VectorField(g, g.dim), ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
  for (int a = 0; a < g.dim; ++a) {
    cvec t(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) t[i] = nl.u[a][i] + L.u[i] * h.u[a][i];
    auto v = detail::inverse_real(g, t);
    std::copy(v.begin(), v.end(), r.du.comp(a).begin());
  }
  auto combine = [&](const cvec& n, const std::vector<double>& l, const cvec& x) {
    cvec t(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) t[i] = n[i] + l[i] * x[i];
    return detail::inverse_real(g, t);
  };
  r.dphi.values = combine(nl.phi, L.phi, h.phi);
  r.dtheta.values = combine(nl.theta, L.theta, h.theta);
  r.drho.values = detail::inverse_real(g, nl.rho);
  r.pressure.values = detail::inverse_real(g, nl.pressure);
  return r;
}

double ins_admissible_dt(const INSState& s, double cfl) {
  double dt = 1e300;
  for (int a = 0; a < s.grid.dim; ++a) {
    double m = 0.0;
    for (double v : s.u.comp(a)) m = std::max(m, std::abs(v));
    if (m > 0.0) dt = std::min(dt, cfl * s.grid.spacing[a] / m);
  }
  return dt;
}

// Integrating-factor Heun: linear parts are integrated exactly in Fourier space.
INSState ins_step(const INSState& s, const KacKernel& kernel, const INSParams& prm, double dt) {
  require_same_grid(kernel.grid, s.grid, "ins_step");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  check_divergence(s, "ins_step");
  double limit = ins_admissible_dt(s);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt << " violates the advective CFL bound; admissible dt <= " << limit;
    throw Error(ErrorCode::StabilityViolation, os.str());
  }
  const SpatialGrid& g = s.grid;
  const std::size_t N = g.size();
  Linear L = linear_rates(s, kernel, prm);
  std::vector<double> Eu(N), Ep(N), Et(N);
  for (std::size_t i = 0; i < N; ++i) {
    Eu[i] = std::exp(L.u[i] * dt);
    Ep[i] = std::exp(L.phi[i] * dt);
    Et[i] = std::exp(L.theta[i] * dt);
  }
  Spectral h0 = to_spectral(s);
  Nonlinear n0 = nonlinear(s, kernel, prm);

  Spectral h1 = h0;
  for (std::size_t i = 0; i < N; ++i) {
    for (int a = 0; a < g.dim; ++a) h1.u[a][i] = Eu[i] * (h0.u[a][i] + dt * n0.u[a][i]);
    h1.phi[i] = Ep[i] * (h0.phi[i] + dt * n0.phi[i]);
    h1.theta[i] = Et[i] * (h0.theta[i] + dt * n0.theta[i]);
    h1.rho[i] = h0.rho[i] + dt * n0.rho[i];
  }
  project_hat(g, h1.u);
  INSState s1 = s;
  from_spectral(h1, s1);
  Nonlinear n1 = nonlinear(s1, kernel, prm);

  Spectral h2 = h0;
  for (std::size_t i = 0; i < N; ++i) {
    for (int a = 0; a < g.dim; ++a)
      h2.u[a][i] = Eu[i] * h0.u[a][i] + 0.5 * dt * (Eu[i] * n0.u[a][i] + n1.u[a][i]);
    h2.phi[i] = Ep[i] * h0.phi[i] + 0.5 * dt * (Ep[i] * n0.phi[i] + n1.phi[i]);
    h2.theta[i] = Et[i] * h0.theta[i] + 0.5 * dt * (Et[i] * n0.theta[i] + n1.theta[i]);
    h2.rho[i] = h0.rho[i] + 0.5 * dt * (n0.rho[i] + n1.rho[i]);
  }
  project_hat(g, h2.u);
  INSState out = s;
  from_spectral(h2, out);
  out.p.values = detail::inverse_real(g, n1.pressure);
  return out;
}

double dispersion_growth_rate(long m0, long m1, double rho_bar, double T_bar, double D_diff, const KacKernel& kernel) {
  if (!(rho_bar > 0.0) || !(T_bar > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho_bar and T_bar must be positive");
  const SpatialGrid& g = kernel.grid;
  double k0 = 2.0 * std::numbers::pi * m0 / g.extent[0];
  double k1 = g.dim == 2 ? 2.0 * std::numbers::pi * m1 / g.extent[1] : 0.0;
  double k2 = k0 * k0 + k1 * k1;
  return -D_diff * k2 * (1.0 / rho_bar - 0.5 * kernel.multiplier_mode(m0, m1) / T_bar);
}

double marginal_temperature(double rho_bar, const KacKernel& kernel) { return rho_bar * 0.5 * kernel.uhat0; }

}  // namespace segrekin
