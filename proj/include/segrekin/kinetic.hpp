#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "segrekin/domain.hpp"
#include "segrekin/hydro.hpp"
#include "segrekin/kac.hpp"

namespace segrekin {

enum class Scaling { Euler, Parabolic };
enum class TransportScheme { SemiLagrangian, Upwind };

struct KineticState {
  SpeciesDistributions dists;
  double time = 0.0;
  double epsilon = 1.0;
  Scaling scaling = Scaling::Euler;
};

struct KineticOptions {
  TransportScheme scheme = TransportScheme::SemiLagrangian;
  int stencil_radius = 2;  // 1: cubic primitive, 2: quintic primitive
  bool positivity_limiter = true;
  bool forces = true;
  double cfl = 1.0;
};

struct Diagnostics {
  double mass_r = 0.0;
  double mass_b = 0.0;
  std::array<double, 3> momentum{0.0, 0.0, 0.0};
  double energy_kinetic = 0.0;
  double energy_interaction = 0.0;  // integral of n_r (U * n_b)
  double energy_total = 0.0;
  double entropy = 0.0;  // sum over species of integral f log f
  double min_f = 0.0;
  bool floored = false;
};

Diagnostics diagnostics(const KineticState& s, const KacKernel& kernel);

// dt <= cfl * min(dx / v_max, dv / |F|_max), with 1/eps on both for parabolic scaling.
double admissible_dt(const KineticState& s, const KacKernel& kernel, const KineticOptions& opt = {});

KineticState vlasov_step(const KineticState& s, const KacKernel& kernel, double dt, const KineticOptions& opt = {});
KineticState collide_step(const KineticState& s, double nu_collision, double dt);

// Called at step 0, every `stride` steps and at the final step.
using KineticObserver =
    std::function<void(std::size_t step, double time, const Diagnostics& diag, const KineticState& state)>;

struct RunOptions {
  KineticOptions transport;
  std::size_t stride = 1;
};

struct Trajectory {
  std::vector<std::size_t> steps;
  std::vector<double> times;
  std::vector<Diagnostics> diagnostics;
  KineticState final_state;
};

Trajectory run(const KineticState& initial, const KacKernel& kernel, double nu_collision, double t_end, double dt,
               const RunOptions& opt = {}, const KineticObserver& observer = {});

HydroState hydro_moments(const KineticState& s);

// Species Maxwellians built from hydrodynamic fields, discrete moment-matched.
KineticState kinetic_from_hydro(const HydroState& h, const VelocityGrid& vg, double epsilon = 1.0,
                                Scaling scaling = Scaling::Euler);

// 1D conservative advection of cell averages by s cells (|s| <= 1).
void advect_line(const double* in, double* out, std::size_t n, double s, bool periodic,
                 TransportScheme scheme, int radius, bool limiter);

}  // namespace segrekin
