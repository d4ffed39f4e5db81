#include "segrekin/kac.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "segrekin/error.hpp"
#include "spectral.hpp"

namespace segrekin {

const char* shape_name(PotentialShape s) {
  switch (s) {
    case PotentialShape::Tophat: return "tophat";
    case PotentialShape::SmoothBump: return "smooth_bump";
    case PotentialShape::Gaussian: return "gaussian";
  }
  return "tophat";
}

PotentialShape parse_shape(const std::string& name) {
  if (name == "tophat") return PotentialShape::Tophat;
  if (name == "smooth_bump") return PotentialShape::SmoothBump;
  if (name == "gaussian") return PotentialShape::Gaussian;
  throw Error(ErrorCode::InvalidArgument, "unknown potential shape '" + name + "'");
}

double PotentialSpec::support() const { return shape == PotentialShape::Gaussian ? 6.0 * width : radius; }

double PotentialSpec::evaluate(double r) const {
  switch (shape) {
    case PotentialShape::Tophat: return r <= radius ? amplitude : 0.0;
    case PotentialShape::SmoothBump: {
      if (r >= radius) return 0.0;
      double q = r / radius;
      return amplitude * std::exp(1.0 - 1.0 / (1.0 - q * q));
    }
    case PotentialShape::Gaussian:
      if (r > 6.0 * width) return 0.0;
      return amplitude * std::exp(-r * r / (2.0 * width * width));
  }
  return 0.0;
}

double KacKernel::multiplier_mode(long m0, long m1) const {
  long n0 = grid.cells[0];
  long i0 = ((m0 % n0) + n0) % n0;
  long i1 = 0;
  if (grid.dim == 2) {
    long n1 = grid.cells[1];
    i1 = ((m1 % n1) + n1) % n1;
  }
  return multipliers[grid.index(i0, i1)];
}

namespace {

double min_image(long m, long n, double h) {
  long s = m <= n / 2 ? m : m - n;
  return static_cast<double>(s) * h;
}

// Exact cell average of the indicator [|x| <= R] over [x - h/2, x + h/2].
double tophat_average_1d(double x, double h, double R) {
  double lo = std::max(x - 0.5 * h, -R);
  double hi = std::min(x + 0.5 * h, R);
  return hi > lo ? (hi - lo) / h : 0.0;
}

double tophat_average_2d(double x, double y, double hx, double hy, double R) {
  double rmin2 = 0.0, rmax2 = 0.0;
  for (double sx : {-0.5, 0.5})
    for (double sy : {-0.5, 0.5}) {
      double cx = x + sx * hx, cy = y + sy * hy;
      rmax2 = std::max(rmax2, cx * cx + cy * cy);
    }
  double dx = std::max(0.0, std::abs(x) - 0.5 * hx);
  double dy = std::max(0.0, std::abs(y) - 0.5 * hy);
  rmin2 = dx * dx + dy * dy;
  if (rmax2 <= R * R) return 1.0;
  if (rmin2 > R * R) return 0.0;
  constexpr int S = 32;
  int inside = 0;
  for (int a = 0; a < S; ++a)
    for (int b = 0; b < S; ++b) {
      double px = x + ((a + 0.5) / S - 0.5) * hx;
      double py = y + ((b + 0.5) / S - 0.5) * hy;
      if (px * px + py * py <= R * R) ++inside;
    }
  return static_cast<double>(inside) / (S * S);
}

}  // namespace

KacKernel tabulate_kernel(const PotentialSpec& spec, const SpatialGrid& grid) {
  if (spec.amplitude < 0.0) throw Error(ErrorCode::InvalidArgument, "potential amplitude must be nonnegative");
  if (spec.shape == PotentialShape::Gaussian ? !(spec.width > 0.0) : !(spec.radius > 0.0))
    throw Error(ErrorCode::InvalidArgument, "potential radius/width must be positive");
  double half = 0.5 * grid.extent[0];
  if (grid.dim == 2) half = std::min(half, 0.5 * grid.extent[1]);
  if (spec.support() >= half) {
    std::ostringstream os;
    os << "potential support " << spec.support() << " does not fit the torus; support must be below half extent "
       << half;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  KacKernel k;
  k.spec = spec;
  k.grid = grid;
  k.real_table.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto c = grid.coords(i);
    double x = min_image(c[0], grid.cells[0], grid.spacing[0]);
    double y = grid.dim == 2 ? min_image(c[1], grid.cells[1], grid.spacing[1]) : 0.0;
    double u;
    if (spec.shape == PotentialShape::Tophat) {
      u = spec.amplitude * (grid.dim == 1 ? tophat_average_1d(x, grid.spacing[0], spec.radius)
                                          : tophat_average_2d(x, y, grid.spacing[0], grid.spacing[1], spec.radius));
    } else {
      u = spec.evaluate(std::sqrt(x * x + y * y));
    }
    k.real_table[i] = u;
  }
  detail::cvec spec_values = detail::forward(grid, k.real_table);
  double dV = grid.cell_volume();
  k.multipliers.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) k.multipliers[i] = spec_values[i].real() * dV;
  double s = 0.0;
  for (double v : k.real_table) s += v;
  k.uhat0 = s * dV;
  k.multipliers[0] = k.uhat0;
  return k;
}

ScalarField convolve(const KacKernel& kernel, const ScalarField& g) {
  require_same_grid(kernel.grid, g.grid, "convolve");
  ScalarField out(g.grid);
  out.values = detail::apply_multiplier(g.grid, g.values, [&](std::size_t i) {
    return std::complex<double>(kernel.multipliers[i], 0.0);
  });
  return out;
}

VectorField grad_convolve(const KacKernel& kernel, const ScalarField& g, double scale) {
  require_same_grid(kernel.grid, g.grid, "grad_convolve");
  const SpatialGrid& grid = g.grid;
  detail::cvec gh = detail::forward(grid, g.values);
  VectorField out(grid, grid.dim);
  for (int a = 0; a < grid.dim; ++a) {
    detail::cvec d(gh.size());
    for (std::size_t i = 0; i < gh.size(); ++i) {
      if (detail::is_nyquist(grid, i, a)) continue;
      double k = detail::wavevector(grid, i)[a];
      d[i] = gh[i] * std::complex<double>(0.0, k * kernel.multipliers[i] * scale);
    }
    auto r = detail::inverse_real(grid, std::move(d));
    std::copy(r.begin(), r.end(), out.comp(a).begin());
  }
  return out;
}

KacForces forces(const KacKernel& kernel, const ScalarField& n_r, const ScalarField& n_b) {
  require_same_grid(n_r.grid, n_b.grid, "forces");
  require_same_grid(kernel.grid, n_r.grid, "forces");
  KacForces f;
  f.F_r = grad_convolve(kernel, n_b, -1.0);
  f.F_b = grad_convolve(kernel, n_r, -1.0);
  f.F = VectorField(n_r.grid, n_r.grid.dim);
  f.W = VectorField(n_r.grid, n_r.grid.dim);
  for (std::size_t i = 0; i < f.F.values.size(); ++i) {
    f.F.values[i] = f.F_r.values[i] + f.F_b.values[i];
    f.W.values[i] = f.F_r.values[i] - f.F_b.values[i];
  }
  return f;
}

ScalarField convolve_direct(const KacKernel& kernel, const ScalarField& g) {
  require_same_grid(kernel.grid, g.grid, "convolve_direct");
  const SpatialGrid& grid = g.grid;
  ScalarField out(grid);
  double dV = grid.cell_volume();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto ci = grid.coords(i);
    double s = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      auto cj = grid.coords(j);
      s += kernel.real_table[grid.index(ci[0] - cj[0], ci[1] - cj[1])] * g.values[j];
    }
    out.values[i] = s * dV;
  }
  return out;
}

}  // namespace segrekin
