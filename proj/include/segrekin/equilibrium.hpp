#pragma once

#include "segrekin/domain.hpp"
#include "segrekin/kac.hpp"

namespace segrekin {

// Uniform mean-field states of the stationary equations
//   T log n1 + U * n2 = C1,   T log n2 + U * n1 = C2
// with U the species kernel; rho = n1 + n2, phi = n1 - n2.
struct PhasePoint {
  double T = 0.0;
  double rho = 0.0;
  double phi_star = 0.0;
};

double critical_temperature(double rho, const KacKernel& kernel);
double coexistence_order_parameter(double T, double rho, const KacKernel& kernel);
PhasePoint phase_point(double T, double rho, const KacKernel& kernel);

enum class InterfaceSeed { Tanh, Step };

struct InterfaceOptions {
  InterfaceSeed seed = InterfaceSeed::Tanh;
  double tolerance = 1e-11;
  int max_iterations = 20000;
  double damping = 0.5;
  int anderson_depth = 6;  // 0 disables acceleration
  double offset = 0.0;     // seed translation
};

// Kink-antikink pair on a 1D torus; n1 is the majority species between L/4 and 3L/4.
struct InterfaceProfile {
  SpatialGrid grid;
  ScalarField n1;
  ScalarField n2;
  double T = 0.0;
  double rho = 0.0;
  double phi_star = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

InterfaceProfile interface_profile(double T, double rho, const KacKernel& kernel, const InterfaceOptions& opt = {});

// max |T log n1 + U*n2 - C1| + |T log n2 + U*n1 - C2|, C the field means.
double stationary_residual(const ScalarField& n1, const ScalarField& n2, double T, const KacKernel& kernel);

}  // namespace segrekin
