#include "segrekin/equilibrium.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "segrekin/error.hpp"

namespace segrekin {

double critical_temperature(double rho, const KacKernel& kernel) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  return 0.5 * rho * kernel.uhat0;
}

double coexistence_order_parameter(double T, double rho, const KacKernel& kernel) {
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "T must be positive");
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  if (T >= critical_temperature(rho, kernel)) return 0.0;
  // 2 T atanh(x) = Uhat(0) rho x for x = phi / rho in (0, 1)
  const double a = kernel.uhat0 * rho;
  auto g = [&](double x) { return 2.0 * T * std::atanh(x) - a * x; };
  double lo = 0.0, hi = 1.0;
  // g < 0 just above 0; find a bracket strictly inside (0, 1)
  double x = 1e-3;
  while (g(x) >= 0.0 && x > 1e-300) x *= 0.5;
  lo = x;
  for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  if (!(hi - lo < 1e-14)) throw Error(ErrorCode::NotConverged, "coexistence bisection did not converge");
  return 0.5 * (lo + hi) * rho;
}

PhasePoint phase_point(double T, double rho, const KacKernel& kernel) {
  return {T, rho, coexistence_order_parameter(T, rho, kernel)};
}

double stationary_residual(const ScalarField& n1, const ScalarField& n2, double T, const KacKernel& kernel) {
  require_same_grid(n1.grid, n2.grid, "stationary_residual");
  require_same_grid(kernel.grid, n1.grid, "stationary_residual");
  for (std::size_t i = 0; i < n1.size(); ++i)
    if (!(n1[i] > 0.0) || !(n2[i] > 0.0)) throw Error(ErrorCode::Positivity, "stationary_residual: non-positive density");
  ScalarField c1 = convolve(kernel, n2), c2 = convolve(kernel, n1);
  const std::size_t N = n1.size();
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    c1[i] += T * std::log(n1[i]);
    c2[i] += T * std::log(n2[i]);
    m1 += c1[i];
    m2 += c2[i];
  }
  m1 /= N;
  m2 /= N;
  double r = 0.0;
  for (std::size_t i = 0; i < N; ++i) r = std::max(r, std::abs(c1[i] - m1) + std::abs(c2[i] - m2));
  return r;
}

namespace {

// Fixed-point map on log densities with the chemical potential pinned.
Eigen::VectorXd fixed_point_map(const Eigen::VectorXd& y, double C, double T, const KacKernel& kernel) {
  const std::size_t N = kernel.grid.size();
  ScalarField n1(kernel.grid), n2(kernel.grid);
  for (std::size_t i = 0; i < N; ++i) {
    n1[i] = std::exp(y[i]);
    n2[i] = std::exp(y[N + i]);
  }
  ScalarField u2 = convolve(kernel, n2), u1 = convolve(kernel, n1);
  Eigen::VectorXd out(2 * N);
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = (C - u2[i]) / T;
    out[N + i] = (C - u1[i]) / T;
  }
  return out;
}

}  // namespace

InterfaceProfile interface_profile(double T, double rho, const KacKernel& kernel, const InterfaceOptions& opt) {
  const SpatialGrid& g = kernel.grid;
  if (g.dim != 1) throw Error(ErrorCode::InvalidArgument, "interface_profile needs a 1D grid");
  double Tc = critical_temperature(rho, kernel);
  if (!(T > 0.0) || T >= Tc) {
    std::ostringstream os;
    os << "interface_profile: no interface at T = " << T << " (T_c = " << Tc << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  const double L = g.extent[0];
  const double range = kernel.spec.support();
  if (L / 2.0 < 20.0 * range) {
    std::ostringstream os;
    os << "interface_profile: kink separation " << L / 2.0 << " must be at least 20 kernel ranges ("
       << 20.0 * range << "); use extent >= " << 40.0 * range;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  const double phi = coexistence_order_parameter(T, rho, kernel);
  const double hi = 0.5 * (rho + phi), lo = 0.5 * (rho - phi);
  const double C = T * std::log(hi) + kernel.uhat0 * lo;
  const std::size_t N = g.size();

  Eigen::VectorXd y(2 * N);
  for (std::size_t i = 0; i < N; ++i) {
    double z = g.center(0, static_cast<long>(i)) - opt.offset;
    double zm = std::fmod(std::fmod(z, L) + L, L);
    double s;
    if (opt.seed == InterfaceSeed::Tanh) {
      double w = std::max(range, g.spacing[0]);
      s = zm < L / 2 ? std::tanh((zm - L / 4) / w) : std::tanh((3 * L / 4 - zm) / w);
    } else {
      s = (zm > L / 4 && zm < 3 * L / 4) ? 1.0 : -1.0;
    }
    y[i] = std::log(0.5 * (rho + phi * s));
    y[N + i] = std::log(0.5 * (rho - phi * s));
  }

  const int m = std::max(0, opt.anderson_depth);
  const double beta = opt.damping;
  std::deque<Eigen::VectorXd> dX, dF;
  Eigen::VectorXd y_prev, f_prev;
  Eigen::VectorXd best = y;
  double best_res = 1e300;
  InterfaceProfile out;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    Eigen::VectorXd f = fixed_point_map(y, C, T, kernel) - y;
    double res = T * f.lpNorm<Eigen::Infinity>();
    if (res < best_res) {
      best_res = res;
      best = y;
    } else if (res > 100.0 * best_res) {
      dX.clear();
      dF.clear();
      y = best;
      y_prev.resize(0);
      f = fixed_point_map(y, C, T, kernel) - y;
      res = best_res;
    }
    if (res < opt.tolerance) break;
    if (y_prev.size() && m > 0) {
      dX.push_back(y - y_prev);
      dF.push_back(f - f_prev);
      if (static_cast<int>(dX.size()) > m) {
        dX.pop_front();
        dF.pop_front();
      }
    }
    y_prev = y;
    f_prev = f;
    Eigen::VectorXd step = beta * f;
    if (!dF.empty()) {
      Eigen::MatrixXd Fm(2 * N, dF.size()), Xm(2 * N, dX.size());
      for (std::size_t k = 0; k < dF.size(); ++k) {
        Fm.col(k) = dF[k];
        Xm.col(k) = dX[k];
      }
      Eigen::VectorXd gamma = Fm.colPivHouseholderQr().solve(f);
      if (gamma.allFinite()) step -= (Xm + beta * Fm) * gamma;
    }
    y += step;
  }

  out.grid = g;
  out.n1 = ScalarField(g);
  out.n2 = ScalarField(g);
  for (std::size_t i = 0; i < N; ++i) {
    out.n1[i] = std::exp(best[i]);
    out.n2[i] = std::exp(best[N + i]);
  }
  out.T = T;
  out.rho = rho;
  out.phi_star = phi;
  out.iterations = it;
  out.residual = stationary_residual(out.n1, out.n2, T, kernel);
  out.converged = best_res < std::max(opt.tolerance, 1e-8) && out.residual < 1e-8;
  if (!out.converged) {
    std::ostringstream os;
    os << "interface_profile: not converged after " << it << " iterations (residual " << out.residual << ")";
    emit_warning(os.str());
  }
  return out;
}

}  // namespace segrekin
