#include "segrekin/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "segrekin/error.hpp"

namespace segrekin {

std::size_t SpatialGrid::size() const {
  return dim == 1 ? static_cast<std::size_t>(cells[0])
                  : static_cast<std::size_t>(cells[0]) * static_cast<std::size_t>(cells[1]);
}

double SpatialGrid::cell_volume() const { return dim == 1 ? spacing[0] : spacing[0] * spacing[1]; }

double SpatialGrid::volume() const { return dim == 1 ? extent[0] : extent[0] * extent[1]; }

double SpatialGrid::center(int axis, long i) const { return (static_cast<double>(i) + 0.5) * spacing[axis]; }

static long wrap(long i, long n) {
  long r = i % n;
  return r < 0 ? r + n : r;
}

std::size_t SpatialGrid::index(long i0, long i1) const {
  if (dim == 1) return static_cast<std::size_t>(wrap(i0, cells[0]));
  return static_cast<std::size_t>(wrap(i0, cells[0]) * cells[1] + wrap(i1, cells[1]));
}

std::array<long, 2> SpatialGrid::coords(std::size_t idx) const {
  if (dim == 1) return {static_cast<long>(idx), 0};
  return {static_cast<long>(idx / cells[1]), static_cast<long>(idx % cells[1])};
}

bool SpatialGrid::operator==(const SpatialGrid& o) const {
  if (dim != o.dim) return false;
  for (int a = 0; a < dim; ++a)
    if (cells[a] != o.cells[a] || extent[a] != o.extent[a]) return false;
  return true;
}

std::size_t VelocityGrid::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dim_v; ++a) n *= static_cast<std::size_t>(nodes_per_axis);
  return n;
}

std::array<int, 3> VelocityGrid::multi(std::size_t k) const {
  std::array<int, 3> m{0, 0, 0};
  for (int a = dim_v - 1; a >= 0; --a) {
    m[a] = static_cast<int>(k % nodes_per_axis);
    k /= nodes_per_axis;
  }
  return m;
}

std::size_t VelocityGrid::flat(const std::array<int, 3>& m) const {
  std::size_t k = 0;
  for (int a = 0; a < dim_v; ++a) k = k * nodes_per_axis + m[a];
  return k;
}

double VelocityGrid::node(std::size_t k, int a) const {
  std::size_t stride = 1;
  for (int b = dim_v - 1; b > a; --b) stride *= nodes_per_axis;
  return axis[(k / stride) % nodes_per_axis];
}

std::array<double, 3> VelocityGrid::velocity(std::size_t k) const {
  std::array<double, 3> v{0, 0, 0};
  auto m = multi(k);
  for (int a = 0; a < dim_v; ++a) v[a] = axis[m[a]];
  return v;
}

bool VelocityGrid::on_boundary(std::size_t k) const {
  auto m = multi(k);
  for (int a = 0; a < dim_v; ++a)
    if (m[a] == 0 || m[a] == nodes_per_axis - 1) return true;
  return false;
}

bool VelocityGrid::operator==(const VelocityGrid& o) const {
  return dim_v == o.dim_v && v_max == o.v_max && nodes_per_axis == o.nodes_per_axis;
}

SpatialGrid make_spatial_grid(int dim, std::array<double, 2> extent, std::array<int, 2> cells) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::InvalidArgument, "spatial dim must be 1 or 2");
  SpatialGrid g;
  g.dim = dim;
  for (int a = 0; a < dim; ++a) {
    if (!(extent[a] > 0.0) || !std::isfinite(extent[a]))
      throw Error(ErrorCode::InvalidArgument, "grid extent must be positive on axis " + std::to_string(a));
    if (cells[a] < 4) throw Error(ErrorCode::InvalidArgument, "need at least 4 cells on axis " + std::to_string(a));
    g.extent[a] = extent[a];
    g.cells[a] = cells[a];
    g.spacing[a] = extent[a] / cells[a];
  }
  if (dim == 1) {
    g.extent[1] = 1.0;
    g.cells[1] = 1;
    g.spacing[1] = 1.0;
  }
  return g;
}

VelocityGrid make_velocity_grid(int dim_v, double v_max, int nodes_per_axis) {
  if (dim_v < 1 || dim_v > 3) throw Error(ErrorCode::InvalidArgument, "velocity dim must be 1, 2 or 3");
  if (!(v_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "v_max must be positive");
  if (nodes_per_axis < 8) throw Error(ErrorCode::InvalidArgument, "need at least 8 velocity nodes per axis");
  if (nodes_per_axis % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "velocity node count must be even (v -> -v symmetry)");
  VelocityGrid v;
  v.dim_v = dim_v;
  v.v_max = v_max;
  v.nodes_per_axis = nodes_per_axis;
  v.dv = 2.0 * v_max / nodes_per_axis;
  v.weight = std::pow(v.dv, dim_v);
  v.axis.resize(nodes_per_axis);
  int h = nodes_per_axis / 2;
  // Build the positive half and mirror it so v and -v are bitwise negatives.
  for (int k = 0; k < h; ++k) {
    double x = (k + 0.5) * v.dv;
    v.axis[h + k] = x;
    v.axis[h - 1 - k] = -x;
  }
  return v;
}

std::pair<SpatialGrid, VelocityGrid> make_grids(const GridSpec& spec) {
  return {make_spatial_grid(spec.dim, spec.extent, spec.cells),
          make_velocity_grid(spec.dim_v, spec.v_max, spec.nodes_per_axis)};
}

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* what) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, std::string(what) + ": spatial grids differ");
}

void require_same_vgrid(const VelocityGrid& a, const VelocityGrid& b, const char* what) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, std::string(what) + ": velocity grids differ");
}

double ScalarField::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_volume();
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

ScalarField shifted(const ScalarField& f, int axis, long cells) {
  ScalarField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto c = f.grid.coords(i);
    c[axis] += cells;
    out.values[f.grid.index(c[0], c[1])] = f.values[i];
  }
  return out;
}

std::vector<double> SpeciesDistributions::f() const {
  std::vector<double> out(f_r.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (f_r[i] + f_b[i]);
  return out;
}

std::vector<double> SpeciesDistributions::phi() const {
  std::vector<double> out(f_r.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (f_r[i] - f_b[i]);
  return out;
}

double SpeciesDistributions::min_value() const {
  double m = f_r.empty() ? 0.0 : f_r[0];
  for (double v : f_r) m = std::min(m, v);
  for (double v : f_b) m = std::min(m, v);
  return m;
}

double SpeciesDistributions::density_r(std::size_t cell) const {
  double s = 0.0;
  for (double v : slice_r(cell)) s += v;
  return s * vgrid.weight;
}

double SpeciesDistributions::density_b(std::size_t cell) const {
  double s = 0.0;
  for (double v : slice_b(cell)) s += v;
  return s * vgrid.weight;
}

ScalarField SpeciesDistributions::density_field_r() const {
  ScalarField n(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) n[c] = density_r(c);
  return n;
}

ScalarField SpeciesDistributions::density_field_b() const {
  ScalarField n(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) n[c] = density_b(c);
  return n;
}

}  // namespace segrekin
