#include <cmath>
#include <random>

#include "doctest.h"
#include "segrekin/equilibrium.hpp"
#include "segrekin/error.hpp"
#include "segrekin/hydro.hpp"
#include "support.hpp"

using namespace segrekin;

namespace {

KacKernel tophat(const SpatialGrid& g, double radius, double amplitude) {
  PotentialSpec ps;
  ps.radius = radius;
  ps.amplitude = amplitude;
  return tabulate_kernel(ps, g);
}

// Plain periodic sum against the tabulated kernel.
std::vector<double> conv(const KacKernel& k, const std::vector<double>& g) {
  const std::size_t N = g.size();
  std::vector<double> out(N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) out[i] += k.real_table[(i + N - j) % N] * g[j];
  for (double& v : out) v *= k.grid.cell_volume();
  return out;
}

// Demixing eigenvalue of the fixed-point map n_a <- exp((C - U * n_b) / T)
// at the symmetric uniform state, by central differences.
double demixing_eigenvalue(const KacKernel& k, double rho, double T) {
  const std::size_t N = k.grid.size();
  const double n0 = 0.5 * rho;
  const double C = T * std::log(n0) + k.uhat0 * n0;
  auto map = [&](double delta) {
    std::vector<double> n2(N, n0 - delta);
    auto c = conv(k, n2);
    return std::exp((C - c[0]) / T);
  };
  const double h = 1e-6;
  return (map(h) - map(-h)) / (2.0 * h);
}

double oracle_tc(const KacKernel& k, double rho) {
  double lo = 1e-3, hi = 10.0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    (demixing_eigenvalue(k, rho, mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("critical temperature from linear stability") {
  SpatialGrid g = make_spatial_grid(1, {8.0, 1.0}, {16, 1});
  KacKernel k = tophat(g, 1.0, 0.25);
  CHECK(k.uhat0 == doctest::Approx(0.5).epsilon(1e-12));
  double tc = critical_temperature(2.0, k);
  CHECK(tc == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(oracle_tc(k, 2.0) == doctest::Approx(tc).epsilon(1e-8));
  CHECK(oracle_tc(k, 4.0) == doctest::Approx(critical_temperature(4.0, k)).epsilon(1e-8));
  CHECK(critical_temperature(4.0, k) == doctest::Approx(2.0 * tc));
  KacKernel k2 = tophat(g, 1.0, 0.5);
  CHECK(critical_temperature(2.0, k2) == doctest::Approx(2.0 * tc));
  CHECK(demixing_eigenvalue(k, 2.0, 0.9 * tc) > 1.0);
  CHECK(demixing_eigenvalue(k, 2.0, 1.1 * tc) < 1.0);
}

TEST_CASE("coexistence order parameter") {
  SpatialGrid g = make_spatial_grid(1, {8.0, 1.0}, {16, 1});
  KacKernel k = tophat(g, 1.0, 0.25);
  const double rho = 2.0, tc = critical_temperature(rho, k);
  CHECK(coexistence_order_parameter(tc, rho, k) == 0.0);
  CHECK(coexistence_order_parameter(1.5 * tc, rho, k) == 0.0);
  CHECK(coexistence_order_parameter(0.1 * tc, rho, k) > 0.99 * rho);

  // two uniform phases with a common constant: phi = rho tanh(uhat0 phi / (2T))
  double T = 0.8 * tc, phi = rho;
  for (int i = 0; i < 2000; ++i) phi = rho * std::tanh(k.uhat0 * phi / (2.0 * T));
  CHECK(coexistence_order_parameter(T, rho, k) == doctest::Approx(phi).epsilon(1e-10));

  PhasePoint p = phase_point(T, rho, k);
  CHECK(p.phi_star == coexistence_order_parameter(T, rho, k));
  CHECK(p.phi_star < p.rho);

  double prev = 0.0;
  for (int i = 1; i <= 40; ++i) {
    double cur = coexistence_order_parameter(tc * (1.0 - 0.024 * i), rho, k);
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK(coexistence_order_parameter(0.9999 * tc, rho, k) < 0.05);
}

TEST_CASE("stationary residual") {
  SpatialGrid g = make_spatial_grid(1, {16.0, 1.0}, {64, 1});
  KacKernel k = tophat(g, 1.0, 0.25);
  CHECK(stationary_residual(ScalarField(g, 0.7), ScalarField(g, 1.3), 0.4, k) < 1e-14);
  std::mt19937_64 gen(1);
  ScalarField a(g), b(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    a[i] = 0.5 + testing_support::uniform(gen);
    b[i] = 0.5 + testing_support::uniform(gen);
  }
  CHECK(stationary_residual(a, b, 0.4, k) > 0.0);
  a[3] = 0.0;
  CHECK(code_of([&] { stationary_residual(a, b, 0.4, k); }) == ErrorCode::Positivity);
}

TEST_CASE("interface profile") {
  SpatialGrid g = make_spatial_grid(1, {64.0, 1.0}, {512, 1});
  KacKernel k = tophat(g, 1.0, 0.25);
  const double rho = 2.0, T = 0.35;
  InterfaceProfile p = interface_profile(T, rho, k);
  REQUIRE(p.converged);
  CHECK(p.residual < 1e-8);
  CHECK(stationary_residual(p.n1, p.n2, T, k) < 1e-8);
  double phi_star = coexistence_order_parameter(T, rho, k);
  CHECK(p.phi_star == phi_star);
  // plateaus at L/2 (n1 majority) and at 0
  std::size_t mid = g.size() / 2;
  CHECK(p.n1[mid] - p.n2[mid] == doctest::Approx(phi_star).epsilon(1e-6));
  CHECK(p.n2[0] - p.n1[0] == doctest::Approx(phi_star).epsilon(1e-6));
  CHECK(p.n1[mid] + p.n2[mid] == doctest::Approx(rho).epsilon(1e-6));

  SUBCASE("mirror images are solutions") {
    ScalarField r1(g), r2(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      r1[i] = p.n1[g.size() - 1 - i];
      r2[i] = p.n2[g.size() - 1 - i];
    }
    CHECK(std::abs(stationary_residual(r1, r2, T, k) - p.residual) < 1e-10);
    CHECK(std::abs(stationary_residual(p.n2, p.n1, T, k) - p.residual) < 1e-10);
    // species swap equals a half-period translation
    ScalarField s = shifted(p.n1, 0, static_cast<long>(mid));
    CHECK(testing_support::max_diff(s.values, p.n2.values) < 1e-6);
  }
  SUBCASE("translated seeds give translated profiles") {
    InterfaceOptions opt;
    opt.offset = 10.0 * g.spacing[0];
    InterfaceProfile q = interface_profile(T, rho, k, opt);
    REQUIRE(q.converged);
    CHECK(testing_support::max_diff(shifted(p.n1, 0, 10).values, q.n1.values) < 1e-6);
  }
  SUBCASE("step seed converges to the same profile") {
    InterfaceOptions opt;
    opt.seed = InterfaceSeed::Step;
    InterfaceProfile q = interface_profile(T, rho, k, opt);
    REQUIRE(q.converged);
    CHECK(testing_support::max_diff(p.n1.values, q.n1.values) < 1e-6);
  }
  SUBCASE("the concentration flux vanishes on the profile") {
    HydroState h(g, 1, rho, T, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      h.rho[i] = p.n1[i] + p.n2[i];
      h.phi[i] = p.n1[i] - p.n2[i];
    }
    CHECK(compute_Q(h, k).q.max_abs() < 1e-6);
  }
}

TEST_CASE("interface amplitude near the critical temperature") {
  SpatialGrid g = make_spatial_grid(1, {256.0, 1.0}, {1024, 1});
  KacKernel k = tophat(g, 1.0, 0.25);
  const double rho = 2.0, T = 0.95 * critical_temperature(rho, k);
  InterfaceProfile p = interface_profile(T, rho, k);
  CHECK(p.converged);
  double amp = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) amp = std::max(amp, p.n1[i] - p.n2[i]);
  CHECK(amp == doctest::Approx(coexistence_order_parameter(T, rho, k)).epsilon(1e-4));
}

TEST_CASE("interface preconditions") {
  SpatialGrid g = make_spatial_grid(1, {64.0, 1.0}, {256, 1});
  KacKernel k = tophat(g, 1.0, 0.25);
  CHECK(code_of([&] { interface_profile(0.5, 2.0, k); }) == ErrorCode::InvalidArgument);
  KacKernel wide = tophat(g, 2.0, 0.125);
  CHECK(code_of([&] { interface_profile(0.3, 2.0, wide); }) == ErrorCode::InvalidArgument);
  SpatialGrid g2 = make_spatial_grid(2, {64.0, 64.0}, {16, 16});
  KacKernel k2 = tophat(g2, 1.0, 0.25);
  CHECK(code_of([&] { interface_profile(0.1, 2.0, k2); }) == ErrorCode::InvalidArgument);
  InterfaceOptions few;
  few.max_iterations = 3;
  take_warnings();
  InterfaceProfile p = interface_profile(0.35, 2.0, k, few);
  CHECK_FALSE(p.converged);
  CHECK(p.residual > 1e-8);
  CHECK_FALSE(take_warnings().empty());
}
