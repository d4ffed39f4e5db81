#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "segrekin/domain.hpp"

namespace segrekin {

// b(|V|, omega) = |V|^sigma h(cos theta); an empty angular factor means h = 1.
struct CrossSection {
  double sigma = 1.0;
  std::function<double(double)> angular;

  bool isotropic() const { return !angular; }
  static CrossSection hard_spheres() { return CrossSection{}; }
};

struct MaxwellianParams {
  double n = 1.0;
  std::array<double, 3> u{0.0, 0.0, 0.0};
  double T = 1.0;
};

struct Moments {
  double n = 0.0;
  std::array<double, 3> u{0.0, 0.0, 0.0};
  double T = 0.0;
  bool defined = false;
};

std::vector<double> maxwellian(const MaxwellianParams& p, const VelocityGrid& vg);
Moments moments(std::span<const double> f, const VelocityGrid& vg);

// exp(a + b.v + c|v|^2) sampled on the lattice with lattice moments equal to
// (n, n u, n (dim_v T + |u|^2)) to roundoff. `state` carries the exponents
// between calls as a warm start and may be null.
std::vector<double> discrete_maxwellian(const MaxwellianParams& p, const VelocityGrid& vg,
                                        std::array<double, 5>* state = nullptr);
void discrete_maxwellian_into(const MaxwellianParams& p, const VelocityGrid& vg, std::span<double> out,
                              std::array<double, 5>* state = nullptr);

// Mass fraction carried by nodes on the lattice boundary.
double boundary_mass_fraction(std::span<const double> f, const VelocityGrid& vg);
constexpr double kBoundaryMassTolerance = 1e-8;

// Collision invariant moments (mass, momentum components, energy).
std::vector<double> invariant_moments(std::span<const double> q, const VelocityGrid& vg);

// Lattice energy-shell collision model. Post-collision pairs of (i, j) are all
// lattice pairs with the same sum and the same |i - j|, which conserves mass,
// momentum and energy per collision and keeps detailed balance.
class CollisionLattice {
 public:
  CollisionLattice(const VelocityGrid& vg, const CrossSection& cs);

  const VelocityGrid& vgrid() const { return vg_; }
  const CrossSection& cross_section() const { return cs_; }
  double coefficient(int r2) const { return coef_[r2]; }

  // J(f_k, g_k) for several pairs at once; outputs resized by the call.
  void apply(const std::vector<std::pair<std::span<const double>, std::span<const double>>>& pairs,
             std::vector<std::vector<double>>& out) const;

  std::vector<double> J(std::span<const double> f, std::span<const double> g) const;

  // Visits every class of ordered pairs: (a, b) member list and the rate between two members.
  void for_each_class(const std::function<void(const std::vector<std::pair<int, int>>& members, int r2)>& visit) const;
  double rate(int r2, std::size_t n_ordered, const std::array<int, 3>& d, const std::array<int, 3>& dp) const;

  std::array<int, 3> shape() const { return shape_; }
  std::array<int, 3> multi(int k) const;

 private:
  void apply_isotropic(const std::vector<std::pair<std::span<const double>, std::span<const double>>>& pairs,
                       std::vector<std::vector<double>>& out) const;
  void apply_anisotropic(const std::vector<std::pair<std::span<const double>, std::span<const double>>>& pairs,
                         std::vector<std::vector<double>>& out) const;

  struct LossConvolution;

  VelocityGrid vg_;
  CrossSection cs_;
  std::shared_ptr<const LossConvolution> loss_;
  std::array<int, 3> shape_{1, 1, 1};
  std::vector<double> coef_;
};

std::vector<double> boltzmann_J(std::span<const double> f, std::span<const double> g, const CollisionLattice& lat);

// Restores the invariant moments of q by a weighted least-squares update q += w * (lambda . chi).
void conservative_correction(std::vector<double>& q, std::span<const double> weight, const VelocityGrid& vg);

// J(f, g) + J(g, f) followed by the conservative correction with weight (f + g)/2.
std::vector<double> symmetrized_J(std::span<const double> f, std::span<const double> g, const CollisionLattice& lat);

struct CollisionSlabs {
  std::vector<double> r;
  std::vector<double> b;
};

// nu * (n_alpha M_mix - f_alpha) per cell, M_mix the unit-mass discrete Maxwellian
// with the mixture velocity and temperature.
CollisionSlabs bgk_relax(const SpeciesDistributions& state, double nu_collision);
void bgk_targets(std::span<const double> fr, std::span<const double> fb, const VelocityGrid& vg,
                 std::span<double> m_mix, double& n_r, double& n_b, std::array<double, 5>* warm = nullptr);

enum class CollisionModel { ExactJ, Bgk };

struct EntropyProduction {
  double N1 = 0.0;
  double N2 = 0.0;
  double Ncross = 0.0;
  bool floored = false;
};

constexpr double kLogFloor = 1e-300;

EntropyProduction entropy_production_cell(std::span<const double> f1, std::span<const double> f2,
                                          const VelocityGrid& vg, CollisionModel model,
                                          const CollisionLattice* lattice = nullptr, double nu_collision = 1.0);
std::vector<EntropyProduction> entropy_production(const SpeciesDistributions& state, CollisionModel model,
                                                  const CollisionLattice* lattice = nullptr,
                                                  double nu_collision = 1.0);

enum class OperatorKind { L, Gamma };

struct LinearCollisionOperator {
  OperatorKind kind = OperatorKind::L;
  VelocityGrid vgrid;
  MaxwellianParams params;
  std::vector<double> M;
  Eigen::MatrixXd matrix;
  std::vector<double> nu_diag;
  // Columns M chi_alpha spanning the null space, and the inverse Gram matrix in
  // the M^{-1}-weighted inner product.
  Eigen::MatrixXd null_basis;
  Eigen::MatrixXd gram_inverse;

  std::vector<double> apply(std::span<const double> h) const;
  std::vector<double> project_null(std::span<const double> h) const;
  double inner(std::span<const double> a, std::span<const double> b) const;  // sum w a b / M
};

constexpr std::size_t kMaxLinearizedNodes = 4096;

LinearCollisionOperator build_linearized(OperatorKind kind, const MaxwellianParams& p, const CollisionLattice& lat);
LinearCollisionOperator build_bgk_linearized(OperatorKind kind, const MaxwellianParams& p, const VelocityGrid& vg,
                                             double nu_collision);

struct OrthogonalSolve {
  std::vector<double> x;
  double residual = 0.0;
  double projection_residual = 0.0;
  int iterations = 0;
};

OrthogonalSolve solve_orthogonal(const LinearCollisionOperator& op, std::span<const double> source,
                                 double tolerance = 1e-12, int max_iterations = 0);

enum class TransportMethod { BgkAnalytic, NumericOperator };

struct TransportCoefficients {
  double nu_visc = 0.0;
  double kappa = 0.0;
  double D_diff = 0.0;
  TransportMethod method = TransportMethod::BgkAnalytic;
};

TransportCoefficients transport_bgk_analytic(const MaxwellianParams& p, double nu_collision, int dim_v = 3);
TransportCoefficients transport_numeric(const LinearCollisionOperator& L, const LinearCollisionOperator& Gamma);
// numeric_operator with cs == nullptr uses the BGK-diagonal operators at rate nu_collision.
TransportCoefficients transport_coefficients(TransportMethod method, const MaxwellianParams& p, double nu_collision,
                                             const VelocityGrid* vg = nullptr, const CrossSection* cs = nullptr);

}  // namespace segrekin
