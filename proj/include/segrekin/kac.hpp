#pragma once

#include <string>
#include <vector>

#include "segrekin/domain.hpp"

namespace segrekin {

enum class PotentialShape { Tophat, SmoothBump, Gaussian };

const char* shape_name(PotentialShape s);
PotentialShape parse_shape(const std::string& name);

struct PotentialSpec {
  PotentialShape shape = PotentialShape::Tophat;
  double radius = 0.25;  // tophat, smooth_bump
  double width = 0.05;   // gaussian standard deviation
  double amplitude = 1.0;

  // Distance beyond which U is treated as zero (6 widths for the Gaussian).
  double support() const;
  double evaluate(double r) const;
};

// Tabulated U on the periodic grid plus its Fourier multipliers.
// multipliers[i] = cell_volume * sum_x U(x) exp(-i k.x), real because U is even.
struct KacKernel {
  PotentialSpec spec;
  SpatialGrid grid;
  std::vector<double> real_table;
  std::vector<double> multipliers;
  double uhat0 = 0.0;

  double multiplier_at(std::size_t idx) const { return multipliers[idx]; }
  // Multiplier of the mode with integer wave numbers (m0, m1).
  double multiplier_mode(long m0, long m1 = 0) const;
};

KacKernel tabulate_kernel(const PotentialSpec& spec, const SpatialGrid& grid);

ScalarField convolve(const KacKernel& kernel, const ScalarField& g);
// grad(U * g) * scale, computed with the multiplier i k Uhat (Nyquist dropped).
VectorField grad_convolve(const KacKernel& kernel, const ScalarField& g, double scale = 1.0);

struct KacForces {
  VectorField F;
  VectorField W;
  VectorField F_r;
  VectorField F_b;
};

// F_r = -grad(U * n_b), F_b = -grad(U * n_r), F = F_r + F_b, W = F_r - F_b.
KacForces forces(const KacKernel& kernel, const ScalarField& n_r, const ScalarField& n_b);

// Reference O(N^2) periodic sum, used by tests and validation.
ScalarField convolve_direct(const KacKernel& kernel, const ScalarField& g);

}  // namespace segrekin
