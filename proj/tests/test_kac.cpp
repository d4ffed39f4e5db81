#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "segrekin/kac.hpp"
#include "support.hpp"

using namespace segrekin;
using testing_support::max_diff;

namespace {

ScalarField random_field(const SpatialGrid& g, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  ScalarField f(g);
  for (auto& v : f.values) v = 1.0 + testing_support::uniform(gen);
  return f;
}

}  // namespace

TEST_CASE("tophat integral on the unit torus") {
  SpatialGrid g = make_spatial_grid(1, {1.0, 1.0}, {64, 1});
  PotentialSpec ps;
  ps.radius = 0.25;
  KacKernel k = tabulate_kernel(ps, g);
  CHECK(k.uhat0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(k.multiplier_mode(0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gaussian multipliers decrease with |k| in 2D") {
  SpatialGrid g = make_spatial_grid(2, {1.0, 1.0}, {32, 32});
  PotentialSpec ps;
  ps.shape = PotentialShape::Gaussian;
  ps.width = 0.05;
  KacKernel k = tabulate_kernel(ps, g);
  CHECK(k.uhat0 == doctest::Approx(2.0 * std::numbers::pi * 0.05 * 0.05).epsilon(1e-6));
  double prev = k.multiplier_mode(0, 0);
  for (long m = 1; m < 16; ++m) {
    double cur = k.multiplier_mode(m, 0);
    CHECK(cur < prev);
    CHECK(cur > 0.0);
    CHECK(k.multiplier_mode(0, m) == doctest::Approx(cur).epsilon(1e-12));
    prev = cur;
  }
}

TEST_CASE("shape names round trip") {
  for (auto s : {PotentialShape::Tophat, PotentialShape::SmoothBump, PotentialShape::Gaussian})
    CHECK(parse_shape(shape_name(s)) == s);
  CHECK_THROWS(parse_shape("triangle"));
}

TEST_CASE("convolving a constant multiplies by the integral") {
  SpatialGrid g = make_spatial_grid(2, {1.0, 2.0}, {16, 32});
  PotentialSpec ps;
  ps.shape = PotentialShape::SmoothBump;
  ps.radius = 0.3;
  KacKernel k = tabulate_kernel(ps, g);
  ScalarField c(g, 3.0);
  ScalarField r = convolve(k, c);
  for (double v : r.values) CHECK(v == doctest::Approx(3.0 * k.uhat0).epsilon(1e-12));
}

TEST_CASE("FFT convolution agrees with the direct periodic sum") {
  for (auto shape : {PotentialShape::Tophat, PotentialShape::SmoothBump, PotentialShape::Gaussian}) {
    SpatialGrid g = make_spatial_grid(2, {1.0, 1.0}, {12, 10});
    PotentialSpec ps;
    ps.shape = shape;
    ps.radius = 0.3;
    ps.width = 0.08;
    ps.amplitude = 1.7;
    KacKernel k = tabulate_kernel(ps, g);
    ScalarField f = random_field(g, 11);
    CHECK(max_diff(convolve(k, f).values, convolve_direct(k, f).values) < 1e-12);
  }
}

TEST_CASE("a cosine mode is scaled by its multiplier") {
  SpatialGrid g = make_spatial_grid(1, {2.0, 1.0}, {64, 1});
  PotentialSpec ps;
  ps.shape = PotentialShape::SmoothBump;
  ps.radius = 0.4;
  KacKernel k = tabulate_kernel(ps, g);
  ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::cos(2.0 * std::numbers::pi * 3.0 * g.center(0, i) / 2.0);
  ScalarField r = convolve(k, f);
  double m = k.multiplier_mode(3);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(r[i] == doctest::Approx(m * f[i]).epsilon(1e-10).scale(1.0));
  // independent multiplier: dx * sum U(x) cos(k x)
  double ref = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = std::min(g.center(0, i) - 0.5 * g.spacing[0], 2.0 - (g.center(0, i) - 0.5 * g.spacing[0]));
    ref += g.spacing[0] * ps.evaluate(x) * std::cos(2.0 * std::numbers::pi * 3.0 * x / 2.0);
  }
  CHECK(m == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("convolution commutes with lattice shifts") {
  SpatialGrid g = make_spatial_grid(2, {1.0, 1.0}, {16, 16});
  PotentialSpec ps;
  ps.radius = 0.2;
  KacKernel k = tabulate_kernel(ps, g);
  ScalarField f = random_field(g, 5);
  ScalarField a = convolve(k, shifted(f, 1, 5));
  ScalarField b = shifted(convolve(k, f), 1, 5);
  CHECK(max_diff(a.values, b.values) < 1e-13);
}

TEST_CASE("forces") {
  SpatialGrid g = make_spatial_grid(1, {1.0, 1.0}, {64, 1});
  PotentialSpec ps;
  ps.radius = 0.1;
  KacKernel k = tabulate_kernel(ps, g);

  SUBCASE("uniform densities exert no force") {
    KacForces f = forces(k, ScalarField(g, 1.3), ScalarField(g, 0.7));
    CHECK(f.F.max_abs() < 1e-13);
    CHECK(f.W.max_abs() < 1e-13);
  }
  SUBCASE("swapping species swaps the partial forces") {
    ScalarField a = random_field(g, 1), b = random_field(g, 2);
    KacForces f = forces(k, a, b), s = forces(k, b, a);
    CHECK(max_diff(f.F_r.values, s.F_b.values) == 0.0);
    CHECK(max_diff(f.F.values, s.F.values) < 1e-15);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(f.W.values[i] == doctest::Approx(-s.W.values[i]));
  }
  SUBCASE("action equals reaction") {
    ScalarField a = random_field(g, 3), b = random_field(g, 4);
    KacForces f = forces(k, a, b);
    double net = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) net += a[i] * f.F_r.values[i] + b[i] * f.F_b.values[i];
    CHECK(std::abs(net) < 1e-12);
  }
  SUBCASE("equal densities give W = 0") {
    ScalarField a = random_field(g, 9);
    KacForces f = forces(k, a, a);
    CHECK(f.W.max_abs() == 0.0);
    ScalarField m(g);
    for (std::size_t i = 0; i < g.size(); ++i) m[i] = 2.0 * a[i];
    VectorField gr = grad_convolve(k, m, -1.0);
    CHECK(max_diff(gr.values, f.F.values) < 1e-13);
  }
}
