#include <cmath>
#include <random>

#include "doctest.h"
#include "segrekin/collision.hpp"
#include "segrekin/error.hpp"
#include "support.hpp"

using namespace segrekin;
using testing_support::uniform;

namespace {

struct Fixture {
  VelocityGrid vg = make_velocity_grid(2, 6.0, 14);
  CollisionLattice lat{vg, CrossSection::hard_spheres()};
  MaxwellianParams p{1.0, {0.0, 0.0, 0.0}, 1.0};
  LinearCollisionOperator L = build_linearized(OperatorKind::L, p, lat);
  LinearCollisionOperator G = build_linearized(OperatorKind::Gamma, p, lat);

  std::vector<double> times_chi(int which) const {
    std::vector<double> h(vg.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
      auto v = vg.velocity(k);
      double c = which == 0 ? 1.0 : which <= vg.dim_v ? v[which - 1] : v[0] * v[0] + v[1] * v[1];
      h[k] = L.M[k] * c;
    }
    return h;
  }
  std::vector<double> random_h(std::mt19937_64& gen) const {
    std::vector<double> h(vg.size());
    for (std::size_t k = 0; k < h.size(); ++k) h[k] = L.M[k] * (uniform(gen) - 0.5);
    return h;
  }
};

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("null spaces") {
  Fixture fx;
  double scale = fx.L.matrix.norm();
  for (int a = 0; a < fx.vg.dim_v + 2; ++a) {
    auto h = fx.times_chi(a);
    CHECK(norm2(fx.L.apply(h)) <= 1e-10 * scale * norm2(h));
  }
  auto M = fx.times_chi(0);
  CHECK(norm2(fx.G.apply(M)) <= 1e-10 * scale * norm2(M));
  auto Mv = fx.times_chi(1);
  CHECK(norm2(fx.G.apply(Mv)) > 1e-3 * scale * norm2(Mv));
  CHECK(fx.L.null_basis.cols() == 4);
  CHECK(fx.G.null_basis.cols() == 1);
}

TEST_CASE("symmetric and non-positive in the weighted inner product") {
  Fixture fx;
  std::mt19937_64 gen(5);
  for (const auto* op : {&fx.L, &fx.G}) {
    for (int rep = 0; rep < 5; ++rep) {
      auto a = fx.random_h(gen), b = fx.random_h(gen);
      double ab = op->inner(a, op->apply(b)), ba = op->inner(op->apply(a), b);
      CHECK(std::abs(ab - ba) <= 1e-8 * std::max(std::abs(ab), std::abs(ba)));
      CHECK(op->inner(a, op->apply(a)) <= 1e-12);
    }
  }
}

TEST_CASE("collision frequency grows like the relative speed") {
  VelocityGrid vg = make_velocity_grid(3, 6.0, 14);
  CollisionLattice lat(vg, CrossSection::hard_spheres());
  auto G = build_linearized(OperatorKind::Gamma, {1.0, {0, 0, 0}, 1.0}, lat);
  // least-squares slope of log nu against log|v| on the outer shell
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  double nu_min = 1e300, nu_max = 0.0;
  for (std::size_t k = 0; k < vg.size(); ++k) {
    auto v = vg.velocity(k);
    double s = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    nu_min = std::min(nu_min, G.nu_diag[k]);
    nu_max = std::max(nu_max, G.nu_diag[k]);
    if (s < 3.0 || s > 5.5) continue;
    double x = std::log(s), y = std::log(G.nu_diag[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.1));
  CHECK(nu_min > 0.0);
  CHECK(nu_max < 1e3 * nu_min);
}

TEST_CASE("dense operators are capped") {
  VelocityGrid vg = make_velocity_grid(3, 6.0, 18);
  CollisionLattice lat(vg, CrossSection::hard_spheres());
  CHECK_THROWS_AS(build_linearized(OperatorKind::L, {1.0, {0, 0, 0}, 1.0}, lat), Error);
}

TEST_CASE("orthogonal solves") {
  Fixture fx;
  std::mt19937_64 gen(9);

  SUBCASE("zero source") {
    auto r = solve_orthogonal(fx.L, std::vector<double>(fx.vg.size(), 0.0));
    CHECK(norm2(r.x) == 0.0);
  }
  SUBCASE("range identity") {
    auto y = fx.random_h(gen);
    auto p = fx.L.project_null(y);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] -= p[k];
    auto r = solve_orthogonal(fx.L, fx.L.apply(y));
    CHECK(testing_support::max_diff(r.x, y) <= 1e-8 * testing_support::max_abs(y));
    CHECK(r.residual < 1e-9);
    CHECK(r.projection_residual < 1e-10);
  }
  SUBCASE("inverse of Gamma on v M is odd and matches a dense factorization") {
    std::vector<double> src(fx.vg.size());
    for (std::size_t k = 0; k < src.size(); ++k) src[k] = fx.G.M[k] * fx.vg.velocity(k)[0];
    auto r = solve_orthogonal(fx.G, src);
    double scale = testing_support::max_abs(r.x);
    for (std::size_t k = 0; k < src.size(); ++k) {
      auto m = fx.vg.multi(k);
      m[0] = fx.vg.nodes_per_axis - 1 - m[0];
      CHECK(std::abs(r.x[k] + r.x[fx.vg.flat(m)]) <= 1e-8 * scale);
    }
    Eigen::Map<const Eigen::VectorXd> b(src.data(), static_cast<Eigen::Index>(src.size()));
    Eigen::VectorXd x = fx.G.matrix.completeOrthogonalDecomposition().solve(b);
    std::vector<double> xo(x.data(), x.data() + x.size());
    auto p = fx.G.project_null(xo);
    for (std::size_t k = 0; k < xo.size(); ++k) xo[k] -= p[k];
    CHECK(testing_support::max_diff(r.x, xo) <= 1e-8 * scale);
  }
}

TEST_CASE("transport coefficients") {
  SUBCASE("closed forms") {
    auto t = transport_bgk_analytic({1.0, {0, 0, 0}, 1.0}, 1.0);
    CHECK(t.nu_visc == doctest::Approx(1.0));
    CHECK(t.kappa == doctest::Approx(2.5));
    CHECK(t.D_diff == doctest::Approx(1.0));
    auto h = transport_bgk_analytic({1.3, {0, 0, 0}, 0.7}, 0.5);
    auto f = transport_bgk_analytic({1.3, {0, 0, 0}, 0.7}, 1.0);
    CHECK(h.nu_visc == doctest::Approx(2.0 * f.nu_visc));
    CHECK(h.kappa == doctest::Approx(2.0 * f.kappa));
    CHECK(h.D_diff == doctest::Approx(2.0 * f.D_diff));
    CHECK_THROWS_AS(transport_bgk_analytic({1.0, {0, 0, 0}, 1.0}, 0.0), Error);
  }
  SUBCASE("numeric BGK operator reproduces the closed forms") {
    VelocityGrid vg = make_velocity_grid(2, 7.0, 16);
    MaxwellianParams p{1.0, {0, 0, 0}, 1.0};
    auto num = transport_coefficients(TransportMethod::NumericOperator, p, 2.0, &vg);
    auto ref = transport_bgk_analytic(p, 2.0, 2);
    CHECK(num.D_diff == doctest::Approx(ref.D_diff).epsilon(0.01));
    CHECK(num.nu_visc == doctest::Approx(ref.nu_visc).epsilon(0.01));
    CHECK(num.kappa == doctest::Approx(ref.kappa).epsilon(0.01));
  }
  SUBCASE("truncating grids are refused") {
    VelocityGrid vg = make_velocity_grid(2, 5.0, 16);
    CHECK_THROWS_AS(transport_coefficients(TransportMethod::NumericOperator, {1.0, {0, 0, 0}, 1.0}, 1.0, &vg), Error);
  }
  SUBCASE("hard-sphere operator gives positive coefficients") {
    VelocityGrid vg = make_velocity_grid(2, 7.0, 16);
    CrossSection cs = CrossSection::hard_spheres();
    auto t = transport_coefficients(TransportMethod::NumericOperator, {1.0, {0, 0, 0}, 1.0}, 1.0, &vg, &cs);
    CHECK(t.nu_visc > 0.0);
    CHECK(t.kappa > 0.0);
    CHECK(t.D_diff > 0.0);
  }
}
