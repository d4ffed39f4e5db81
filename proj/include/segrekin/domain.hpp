#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace segrekin {

struct GridSpec {
  int dim = 1;
  std::array<double, 2> extent{1.0, 1.0};
  std::array<int, 2> cells{64, 64};
  int dim_v = 1;
  double v_max = 6.0;
  int nodes_per_axis = 32;
};

// Periodic cell-centred grid on a torus. Cell i on an axis has centre (i + 1/2) * spacing.
struct SpatialGrid {
  int dim = 1;
  std::array<double, 2> extent{1.0, 1.0};
  std::array<int, 2> cells{1, 1};
  std::array<double, 2> spacing{1.0, 1.0};

  std::size_t size() const;
  double cell_volume() const;
  double volume() const;
  double center(int axis, long i) const;
  std::size_t index(long i0, long i1 = 0) const;  // wraps
  std::array<long, 2> coords(std::size_t idx) const;
  bool operator==(const SpatialGrid& o) const;
};

// Tensor midpoint lattice on [-v_max, v_max]^dim_v. Axis 0 varies slowest.
struct VelocityGrid {
  int dim_v = 1;
  double v_max = 6.0;
  int nodes_per_axis = 32;
  double dv = 0.375;
  double weight = 0.375;
  std::vector<double> axis;

  std::size_t size() const;
  double node(std::size_t k, int a) const;
  std::array<double, 3> velocity(std::size_t k) const;
  std::array<int, 3> multi(std::size_t k) const;
  std::size_t flat(const std::array<int, 3>& m) const;
  bool on_boundary(std::size_t k) const;
  double total_weight() const { return weight * static_cast<double>(size()); }
  bool operator==(const VelocityGrid& o) const;
};

SpatialGrid make_spatial_grid(int dim, std::array<double, 2> extent, std::array<int, 2> cells);
VelocityGrid make_velocity_grid(int dim_v, double v_max, int nodes_per_axis);
std::pair<SpatialGrid, VelocityGrid> make_grids(const GridSpec& spec);

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* what);
void require_same_vgrid(const VelocityGrid& a, const VelocityGrid& b, const char* what);

struct ScalarField {
  SpatialGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const SpatialGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
  double integral() const;
  double max_abs() const;
};

// Component-major storage: component c occupies values[c*N, (c+1)*N).
struct VectorField {
  SpatialGrid grid;
  int ncomp = 1;
  std::vector<double> values;

  VectorField() = default;
  VectorField(const SpatialGrid& g, int components, double fill = 0.0)
      : grid(g), ncomp(components), values(g.size() * static_cast<std::size_t>(components), fill) {}
  std::span<double> comp(int c) { return {values.data() + c * grid.size(), grid.size()}; }
  std::span<const double> comp(int c) const { return {values.data() + c * grid.size(), grid.size()}; }
  double max_abs() const;
};

ScalarField shifted(const ScalarField& f, int axis, long cells);

// Distributions stored [cell][velocity node].
struct SpeciesDistributions {
  SpatialGrid grid;
  VelocityGrid vgrid;
  std::vector<double> f_r;
  std::vector<double> f_b;

  SpeciesDistributions() = default;
  SpeciesDistributions(const SpatialGrid& g, const VelocityGrid& v)
      : grid(g), vgrid(v), f_r(g.size() * v.size(), 0.0), f_b(g.size() * v.size(), 0.0) {}

  std::size_t nv() const { return vgrid.size(); }
  std::span<double> slice_r(std::size_t cell) { return {f_r.data() + cell * nv(), nv()}; }
  std::span<double> slice_b(std::size_t cell) { return {f_b.data() + cell * nv(), nv()}; }
  std::span<const double> slice_r(std::size_t cell) const { return {f_r.data() + cell * nv(), nv()}; }
  std::span<const double> slice_b(std::size_t cell) const { return {f_b.data() + cell * nv(), nv()}; }

  std::vector<double> f() const;    // (f_r + f_b)/2
  std::vector<double> phi() const;  // (f_r - f_b)/2
  double min_value() const;
  bool nonnegative() const { return min_value() >= 0.0; }
  double density_r(std::size_t cell) const;
  double density_b(std::size_t cell) const;
  ScalarField density_field_r() const;
  ScalarField density_field_b() const;
};

}  // namespace segrekin
