#include <cmath>
#include <sstream>

#include "segrekin/collision.hpp"
#include "segrekin/error.hpp"

namespace segrekin {

std::vector<double> maxwellian(const MaxwellianParams& p, const VelocityGrid& vg) {
  if (!(p.T > 0.0)) throw Error(ErrorCode::InvalidArgument, "Maxwellian temperature must be positive");
  if (p.n < 0.0) throw Error(ErrorCode::InvalidArgument, "Maxwellian density must be nonnegative");
  double speed = 0.0;
  for (int a = 0; a < vg.dim_v; ++a) speed = std::max(speed, std::abs(p.u[a]));
  if (speed > vg.v_max - 3.0 * std::sqrt(p.T)) {
    std::ostringstream os;
    os << "Maxwellian bulk velocity " << speed << " is within 3 thermal speeds of v_max " << vg.v_max;
    emit_warning(os.str());
  }
  std::vector<double> out(vg.size(), 0.0);
  if (p.n == 0.0) return out;
  double norm = p.n * std::pow(2.0 * M_PI * p.T, -0.5 * vg.dim_v);
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto v = vg.velocity(k);
    double s = 0.0;
    for (int a = 0; a < vg.dim_v; ++a) s += (v[a] - p.u[a]) * (v[a] - p.u[a]);
    out[k] = norm * std::exp(-s / (2.0 * p.T));
  }
  return out;
}

Moments moments(std::span<const double> f, const VelocityGrid& vg) {
  Moments m;
  double n = 0.0;
  std::array<double, 3> mom{0, 0, 0};
  for (std::size_t k = 0; k < f.size(); ++k) {
    n += f[k];
    auto v = vg.velocity(k);
    for (int a = 0; a < vg.dim_v; ++a) mom[a] += v[a] * f[k];
  }
  m.n = n * vg.weight;
  if (m.n < 1e-14) return m;
  for (int a = 0; a < vg.dim_v; ++a) m.u[a] = mom[a] / n;
  double e = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    auto v = vg.velocity(k);
    double s = 0.0;
    for (int a = 0; a < vg.dim_v; ++a) s += (v[a] - m.u[a]) * (v[a] - m.u[a]);
    e += s * f[k];
  }
  m.T = e / (vg.dim_v * n);
  m.defined = true;
  return m;
}

double boundary_mass_fraction(std::span<const double> f, const VelocityGrid& vg) {
  double total = 0.0, edge = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    double a = std::abs(f[k]);
    total += a;
    if (vg.on_boundary(k)) edge += a;
  }
  return total > 0.0 ? edge / total : 0.0;
}

std::vector<double> invariant_moments(std::span<const double> q, const VelocityGrid& vg) {
  std::vector<double> m(vg.dim_v + 2, 0.0);
  for (std::size_t k = 0; k < q.size(); ++k) {
    auto v = vg.velocity(k);
    double v2 = 0.0;
    m[0] += q[k];
    for (int a = 0; a < vg.dim_v; ++a) {
      m[1 + a] += v[a] * q[k];
      v2 += v[a] * v[a];
    }
    m[vg.dim_v + 1] += v2 * q[k];
  }
  for (double& x : m) x *= vg.weight;
  return m;
}

void discrete_maxwellian_into(const MaxwellianParams& p, const VelocityGrid& vg, std::span<double> out,
                              std::array<double, 5>* state) {
  if (!(p.T > 0.0)) throw Error(ErrorCode::InvalidArgument, "Maxwellian temperature must be positive");
  const int d = vg.dim_v;
  const int m = d + 2;
  const std::size_t N = vg.size();
  if (p.n <= 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  // Exponent lambda . chi with chi = (1, v - u, |v - u|^2) and moment targets (n, 0, d n T).
  Eigen::VectorXd target = Eigen::VectorXd::Zero(m);
  target(0) = p.n;
  target(m - 1) = d * p.n * p.T;
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
  bool warm = state && (*state)[m - 1] < 0.0;
  if (warm) {
    for (int i = 0; i < m; ++i) lam(i) = (*state)[i];
  } else {
    lam(0) = std::log(p.n) - 0.5 * d * std::log(2.0 * M_PI * p.T);
    lam(m - 1) = -0.5 / p.T;
  }

  std::vector<double> chi(N * m);
  for (std::size_t k = 0; k < N; ++k) {
    auto v = vg.velocity(k);
    double s = 0.0;
    chi[k * m] = 1.0;
    for (int a = 0; a < d; ++a) {
      double c = v[a] - p.u[a];
      chi[k * m + 1 + a] = c;
      s += c * c;
    }
    chi[k * m + m - 1] = s;
  }

  auto evaluate = [&](const Eigen::VectorXd& l, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
    double phi = 0.0;
    if (grad) grad->setZero(m);
    if (hess) hess->setZero(m, m);
    for (std::size_t k = 0; k < N; ++k) {
      const double* c = &chi[k * m];
      double e = 0.0;
      for (int i = 0; i < m; ++i) e += l(i) * c[i];
      double w = std::exp(e) * vg.weight;
      phi += w;
      if (grad)
        for (int i = 0; i < m; ++i) (*grad)(i) += w * c[i];
      if (hess)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j <= i; ++j) (*hess)(i, j) += w * c[i] * c[j];
    }
    if (hess)
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) (*hess)(i, j) = (*hess)(j, i);
    if (grad) *grad -= target;
    return phi - l.dot(target);
  };

  Eigen::VectorXd g(m);
  Eigen::MatrixXd H(m, m);
  double scale = p.n * (1.0 + d * p.T);
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    double f0 = evaluate(lam, &g, &H);
    double gn = g.cwiseAbs().maxCoeff();
    if (gn < 1e-14 * scale) {
      converged = true;
      break;
    }
    Eigen::VectorXd step = H.ldlt().solve(-g);
    double t = 1.0;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd trial = lam + t * step;
      double f1 = evaluate(trial, nullptr, nullptr);
      if (std::isfinite(f1) && f1 <= f0 + 1e-4 * t * g.dot(step) + 1e-15 * std::abs(f0)) break;
      t *= 0.5;
    }
    Eigen::VectorXd next = lam + t * step;
    if ((next - lam).cwiseAbs().maxCoeff() < 1e-14 * (1.0 + lam.cwiseAbs().maxCoeff())) {
      lam = next;
      converged = true;
      break;
    }
    lam = next;
  }
  if (!converged) {
    Eigen::VectorXd gg(m);
    evaluate(lam, &gg, nullptr);
    if (gg.cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw Error(ErrorCode::NotConverged, "discrete Maxwellian moment fit did not converge");
  }
  for (std::size_t k = 0; k < N; ++k) {
    const double* c = &chi[k * m];
    double e = 0.0;
    for (int i = 0; i < m; ++i) e += lam(i) * c[i];
    out[k] = std::exp(e);
  }
  if (state)
    for (int i = 0; i < m; ++i) (*state)[i] = lam(i);
}

std::vector<double> discrete_maxwellian(const MaxwellianParams& p, const VelocityGrid& vg,
                                        std::array<double, 5>* state) {
  std::vector<double> out(vg.size());
  discrete_maxwellian_into(p, vg, out, state);
  return out;
}

}  // namespace segrekin
