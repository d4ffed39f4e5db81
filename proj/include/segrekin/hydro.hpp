#pragma once

#include <array>

#include "segrekin/collision.hpp"
#include "segrekin/domain.hpp"
#include "segrekin/kac.hpp"

namespace segrekin {

// Hydrodynamic fields. `dof` is the number of velocity components carried
// (the kinetic velocity dimension): internal energy (dof/2) T, gas constant (dof+2)/dof.
struct HydroState {
  SpatialGrid grid;
  int dof = 3;
  ScalarField rho;
  VectorField u;
  ScalarField T;
  ScalarField phi;

  HydroState() = default;
  HydroState(const SpatialGrid& g, int dof_, double rho0 = 1.0, double T0 = 1.0, double phi0 = 0.0)
      : grid(g), dof(dof_), rho(g, rho0), u(g, dof_), T(g, T0), phi(g, phi0) {}

  ScalarField pressure() const;
  double gamma() const { return (dof + 2.0) / dof; }
  void check_positivity(const char* where) const;
};

// The hydrodynamic limit sees the kernel with the one-half factor from the
// two-species bookkeeping: every multiplier below is Uhat / 2.
double hydro_multiplier(const KacKernel& kernel, std::size_t idx);
// -grad(U_h * g)
VectorField hydro_force(const KacKernel& kernel, const ScalarField& g);
ScalarField hydro_convolve(const KacKernel& kernel, const ScalarField& g);

enum class GradientMethod { Spectral, Centered };

// Local transport coefficients. With `scale_with_state` the reference values
// are multiplied by rho T / (n_ref T_ref), the BGK dependence.
struct TransportModel {
  TransportCoefficients coeffs;
  bool scale_with_state = true;
  double n_ref = 1.0;
  double T_ref = 1.0;

  std::array<double, 3> local(double rho, double T) const;  // (nu, kappa, D)
};

struct FluxQ {
  VectorField q;
  VectorField gradient_part;
  VectorField vlasov_part;
};

FluxQ compute_Q(const HydroState& s, const KacKernel& kernel, GradientMethod method = GradientMethod::Spectral);

struct HydroRhs {
  ScalarField drho;
  VectorField du;
  ScalarField dT;
  ScalarField dphi;
  double max_abs() const;
};

// Primitive-variable right-hand side of the compressible system; eps = 0 is Vlasov-Euler.
HydroRhs vns_rhs(const HydroState& s, const KacKernel& kernel, const TransportModel* coeffs, double eps,
                 GradientMethod method = GradientMethod::Spectral);

enum class SlopeLimiter { MC, Minmod, None };

struct VnsOptions {
  SlopeLimiter limiter = SlopeLimiter::MC;
  int rk_order = 2;
  double cfl = 0.5;
  double viscous_cfl = 0.25;
  int max_retries = 5;
};

double vns_admissible_dt(const HydroState& s, const TransportModel* coeffs, double eps, const VnsOptions& opt = {});
HydroState vns_step(const HydroState& s, const KacKernel& kernel, const TransportModel* coeffs, double eps, double dt,
                    const VnsOptions& opt = {});

struct HydroTotals {
  double mass = 0.0;
  double phi = 0.0;
  std::array<double, 3> momentum{0.0, 0.0, 0.0};
  double energy = 0.0;  // kinetic + internal
};
HydroTotals hydro_totals(const HydroState& s);

// Incompressible limit with constant background (rho_bar, T_bar).
struct INSState {
  SpatialGrid grid;
  VectorField u;
  ScalarField phi;
  ScalarField theta;
  ScalarField rho;  // density fluctuation, carried by the full variant only
  ScalarField p;
  double rho_bar = 1.0;
  double T_bar = 1.0;

  INSState() = default;
  INSState(const SpatialGrid& g, double rho_bar_, double T_bar_)
      : grid(g), u(g, g.dim), phi(g), theta(g), rho(g), p(g), rho_bar(rho_bar_), T_bar(T_bar_) {}
};

enum class INSVariant { Reduced, Full };

struct INSParams {
  double nu_visc = 1.0;
  double kappa = 2.5;
  double D_diff = 1.0;
  INSVariant variant = INSVariant::Reduced;
};

struct INSRhs {
  VectorField du;
  ScalarField dphi;
  ScalarField dtheta;
  ScalarField drho;
  ScalarField pressure;
};

INSRhs ins_rhs(const INSState& s, const KacKernel& kernel, const INSParams& prm);
INSState ins_step(const INSState& s, const KacKernel& kernel, const INSParams& prm, double dt);
double ins_admissible_dt(const INSState& s, double cfl = 0.5);
double ins_divergence(const INSState& s);
// max |grad(rho + theta + U_h * rho)|
double ins_constraint_defect(const INSState& s, const KacKernel& kernel);
void project_divergence_free(VectorField& u);

double dispersion_growth_rate(long m0, long m1, double rho_bar, double T_bar, double D_diff, const KacKernel& kernel);
// Temperature at which the k -> 0 mode is marginal.
double marginal_temperature(double rho_bar, const KacKernel& kernel);

}  // namespace segrekin
