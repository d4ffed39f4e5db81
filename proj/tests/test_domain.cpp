#include <cmath>

#include "doctest.h"
#include "segrekin/domain.hpp"
#include "segrekin/error.hpp"

using namespace segrekin;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("spatial grid spacing and centres") {
  SpatialGrid g = make_spatial_grid(1, {1.0, 1.0}, {64, 1});
  CHECK(g.spacing[0] == doctest::Approx(1.0 / 64.0).epsilon(1e-15));
  CHECK(g.center(0, 0) == doctest::Approx(0.5 / 64.0));
  CHECK(g.size() == 64);
  CHECK(g.volume() == doctest::Approx(1.0));
  CHECK(g.index(-1) == 63);
  CHECK(g.index(64) == 0);

  SpatialGrid g2 = make_spatial_grid(2, {2.0, 1.0}, {8, 4});
  CHECK(g2.size() == 32);
  CHECK(g2.cell_volume() == doctest::Approx(0.25 * 0.25));
  for (std::size_t i = 0; i < g2.size(); ++i) {
    auto c = g2.coords(i);
    CHECK(g2.index(c[0], c[1]) == i);
  }
}

TEST_CASE("velocity lattice is symmetric with the expected weights") {
  VelocityGrid v = make_velocity_grid(1, 6.0, 16);
  CHECK(v.dv == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(v.axis.front() == doctest::Approx(-5.625));
  for (int i = 0; i < 16; ++i) CHECK(v.axis[i] == -v.axis[15 - i]);
  CHECK(v.total_weight() == doctest::Approx(12.0).epsilon(1e-14));

  VelocityGrid v3 = make_velocity_grid(3, 6.0, 8);
  CHECK(v3.size() == 512);
  CHECK(v3.total_weight() == doctest::Approx(12.0 * 12.0 * 12.0).epsilon(1e-14));
  for (std::size_t k = 0; k < v3.size(); ++k) CHECK(v3.flat(v3.multi(k)) == k);
  CHECK(v3.on_boundary(0));
  CHECK_FALSE(v3.on_boundary(v3.flat({3, 4, 4})));
}

TEST_CASE("odd moments of the lattice vanish exactly") {
  VelocityGrid v = make_velocity_grid(2, 5.0, 12);
  // mirror pairs summed first, as the moment routines do
  double s1 = 0.0, s3 = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 12; ++j) {
      std::size_t a = v.flat({i, j, 0}), b = v.flat({11 - i, j, 0});
      double x = v.node(a, 0), y = v.node(a, 1), xm = v.node(b, 0);
      s1 += (x + xm) * v.weight;
      s3 += (x + xm) * y * y * v.weight;
    }
  CHECK(s1 == 0.0);
  CHECK(s3 == 0.0);
}

TEST_CASE("grid constructors reject bad input") {
  CHECK(code_of([] { make_velocity_grid(1, 6.0, 15); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { make_velocity_grid(1, 6.0, 6); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { make_velocity_grid(1, -1.0, 16); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { make_velocity_grid(4, 6.0, 16); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { make_spatial_grid(1, {1.0, 1.0}, {3, 1}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { make_spatial_grid(1, {0.0, 1.0}, {8, 1}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { make_spatial_grid(3, {1.0, 1.0}, {8, 8}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("grid mismatch is reported") {
  SpatialGrid a = make_spatial_grid(1, {1.0, 1.0}, {8, 1});
  SpatialGrid b = make_spatial_grid(1, {1.0, 1.0}, {16, 1});
  CHECK(code_of([&] { require_same_grid(a, b, "test"); }) == ErrorCode::GridMismatch);
  CHECK(code_of([&] { require_same_grid(a, a, "test"); }) == ErrorCode::Ok);
}

TEST_CASE("shift by the cell count is the identity") {
  SpatialGrid g = make_spatial_grid(2, {1.0, 1.0}, {8, 6});
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(0.37 * static_cast<double>(i * i));
  CHECK(shifted(f, 0, 8).values == f.values);
  CHECK(shifted(f, 1, -6).values == f.values);
  ScalarField s = shifted(shifted(f, 0, 3), 0, -3);
  CHECK(s.values == f.values);
  ScalarField one = shifted(f, 0, 1);
  CHECK(one[g.index(1, 2)] == f[g.index(0, 2)]);
}

TEST_CASE("species combinations") {
  SpatialGrid g = make_spatial_grid(1, {1.0, 1.0}, {4, 1});
  VelocityGrid v = make_velocity_grid(1, 4.0, 8);
  SpeciesDistributions d(g, v);
  for (std::size_t i = 0; i < d.f_r.size(); ++i) {
    d.f_r[i] = 1.0 + static_cast<double>(i % 5);
    d.f_b[i] = 2.0;
  }
  auto f = d.f();
  auto phi = d.phi();
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f[i] + phi[i] == doctest::Approx(d.f_r[i]));
    CHECK(f[i] - phi[i] == doctest::Approx(d.f_b[i]));
  }
  CHECK(d.density_b(0) == doctest::Approx(2.0 * v.total_weight()));
  CHECK(d.nonnegative());
  d.f_b[3] = -1e-3;
  CHECK(d.min_value() == -1e-3);
}
