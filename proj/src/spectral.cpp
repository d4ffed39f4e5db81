#include "spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace segrekin::detail {

namespace {

struct PlanCache {
  std::map<std::tuple<int, int, int, bool>, fftw_plan> plans;
  ~PlanCache() {
    for (auto& [k, p] : plans) fftw_destroy_plan(p);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

fftw_plan get_plan(const SpatialGrid& g, bool inverse) {
  auto key = std::make_tuple(g.dim, g.cells[0], g.dim == 2 ? g.cells[1] : 1, inverse);
  PlanCache& c = cache();
  std::lock_guard lk(planner_mutex());
  auto it = c.plans.find(key);
  if (it != c.plans.end()) return it->second;
  cvec scratch(g.size());
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  int sign = inverse ? FFTW_BACKWARD : FFTW_FORWARD;
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = g.dim == 1 ? fftw_plan_dft_1d(g.cells[0], p, p, sign, flags)
                              : fftw_plan_dft_2d(g.cells[0], g.cells[1], p, p, sign, flags);
  c.plans.emplace(key, plan);
  return plan;
}

}  // namespace

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void fft(const SpatialGrid& g, cvec& data, bool inverse) {
  fftw_plan plan = get_plan(g, inverse);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

cvec forward(const SpatialGrid& g, std::span<const double> values) {
  cvec d(values.begin(), values.end());
  fft(g, d, false);
  return d;
}

std::vector<double> inverse_real(const SpatialGrid& g, cvec data) {
  fft(g, data, true);
  std::vector<double> out(data.size());
  double s = 1.0 / static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real() * s;
  return out;
}

static long signed_mode(long m, long n) { return m <= n / 2 ? m : m - n; }

std::array<long, 2> modes(const SpatialGrid& g, std::size_t idx) {
  auto c = g.coords(idx);
  std::array<long, 2> m{signed_mode(c[0], g.cells[0]), 0};
  if (g.dim == 2) m[1] = signed_mode(c[1], g.cells[1]);
  return m;
}

bool is_nyquist(const SpatialGrid& g, std::size_t idx, int axis) {
  auto c = g.coords(idx);
  return g.cells[axis] % 2 == 0 && c[axis] == g.cells[axis] / 2;
}

std::array<double, 2> wavevector(const SpatialGrid& g, std::size_t idx) {
  auto m = modes(g, idx);
  std::array<double, 2> k{0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) k[a] = 2.0 * M_PI * static_cast<double>(m[a]) / g.extent[a];
  return k;
}

double k_squared(const SpatialGrid& g, std::size_t idx) {
  auto k = wavevector(g, idx);
  return k[0] * k[0] + k[1] * k[1];
}

std::vector<double> apply_multiplier(const SpatialGrid& g, std::span<const double> values,
                                     const std::function<std::complex<double>(std::size_t)>& m) {
  cvec d = forward(g, values);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= m(i);
  return inverse_real(g, std::move(d));
}

std::vector<double> derivative(const SpatialGrid& g, std::span<const double> values, int axis) {
  return apply_multiplier(g, values, [&](std::size_t i) {
    if (is_nyquist(g, i, axis)) return std::complex<double>(0.0, 0.0);
    return std::complex<double>(0.0, wavevector(g, i)[axis]);
  });
}

std::vector<double> laplacian(const SpatialGrid& g, std::span<const double> values) {
  return apply_multiplier(g, values, [&](std::size_t i) { return std::complex<double>(-k_squared(g, i), 0.0); });
}

std::vector<double> centered_derivative(const SpatialGrid& g, std::span<const double> values, int axis) {
  std::vector<double> out(values.size());
  double inv = 0.5 / g.spacing[axis];
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto c = g.coords(i);
    auto p = c, m = c;
    p[axis] += 1;
    m[axis] -= 1;
    out[i] = (values[g.index(p[0], p[1])] - values[g.index(m[0], m[1])]) * inv;
  }
  return out;
}

}  // namespace segrekin::detail
