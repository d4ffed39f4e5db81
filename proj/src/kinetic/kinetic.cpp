#include "segrekin/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "segrekin/collision.hpp"
#include "segrekin/error.hpp"
#include "segrekin/parallel.hpp"

namespace segrekin {

namespace {

double transport_scale(const KineticState& s) { return s.scaling == Scaling::Parabolic ? 1.0 / s.epsilon : 1.0; }

void check_state(const KineticState& s) {
  if (!(s.epsilon > 0.0) || s.epsilon > 1.0) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1]");
  if (s.dists.vgrid.dim_v < s.dists.grid.dim)
    throw Error(ErrorCode::InvalidArgument, "velocity dim must be at least the spatial dim");
}

double max_node_speed(const VelocityGrid& vg) { return vg.v_max - 0.5 * vg.dv; }

// Start nodes and stride of all lattice lines along velocity axis a.
void velocity_lines(const VelocityGrid& vg, int a, std::vector<std::size_t>& starts, std::size_t& stride) {
  stride = 1;
  for (int b = vg.dim_v - 1; b > a; --b) stride *= vg.nodes_per_axis;
  starts.clear();
  for (std::size_t k = 0; k < vg.size(); ++k)
    if (vg.multi(k)[a] == 0) starts.push_back(k);
}

void stream_axis(std::vector<double>& f, const SpatialGrid& g, const VelocityGrid& vg, int axis, double tau,
                 double scale, const KineticOptions& opt) {
  const std::size_t nv = vg.size();
  const std::size_t ncell = g.size();
  const long n_axis = g.cells[axis];
  const std::size_t lines = ncell / n_axis;
  std::vector<double> result(f.size());
  parallel_for(nv, 16, [&](std::size_t kb, std::size_t ke) {
    std::vector<double> in(n_axis), out(n_axis);
    for (std::size_t k = kb; k < ke; ++k) {
      double s = vg.node(k, axis) * scale * tau / g.spacing[axis];
      for (std::size_t l = 0; l < lines; ++l) {
        // Cells of line l along `axis`.
        auto cell = [&](long i) -> std::size_t {
          if (g.dim == 1) return static_cast<std::size_t>(i);
          return axis == 0 ? g.index(i, static_cast<long>(l)) : g.index(static_cast<long>(l), i);
        };
        for (long i = 0; i < n_axis; ++i) in[i] = f[cell(i) * nv + k];
        advect_line(in.data(), out.data(), n_axis, s, true, opt.scheme, opt.stencil_radius, opt.positivity_limiter);
        for (long i = 0; i < n_axis; ++i) result[cell(i) * nv + k] = out[i];
      }
    }
  });
  f.swap(result);
}

}  // namespace

double admissible_dt(const KineticState& s, const KacKernel& kernel, const KineticOptions& opt) {
  check_state(s);
  const auto& g = s.dists.grid;
  const auto& vg = s.dists.vgrid;
  double scale = transport_scale(s);
  double dt = 1e300;
  for (int a = 0; a < g.dim; ++a) dt = std::min(dt, g.spacing[a] / (max_node_speed(vg) * scale));
  if (opt.forces) {
    auto kf = forces(kernel, s.dists.density_field_r(), s.dists.density_field_b());
    double fmax = std::max(kf.F_r.max_abs(), kf.F_b.max_abs());
    if (fmax > 0.0) dt = std::min(dt, vg.dv / (fmax * scale));
  }
  return opt.cfl * dt;
}

KineticState vlasov_step(const KineticState& s, const KacKernel& kernel, double dt, const KineticOptions& opt) {
  check_state(s);
  const auto& g = s.dists.grid;
  const auto& vg = s.dists.vgrid;
  if (opt.forces) require_same_grid(kernel.grid, g, "vlasov_step");
  double scale = transport_scale(s);
  for (int a = 0; a < g.dim; ++a) {
    double limit = opt.cfl * g.spacing[a] / (max_node_speed(vg) * scale);
    if (dt > limit * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "time step " << dt << " violates the streaming bound; admissible dt <= " << limit;
      throw Error(ErrorCode::StabilityViolation, os.str());
    }
  }
  KineticState out = s;
  auto stream = [&](double tau) {
    for (int a = 0; a < g.dim; ++a) {
      stream_axis(out.dists.f_r, g, vg, a, tau, scale, opt);
      stream_axis(out.dists.f_b, g, vg, a, tau, scale, opt);
    }
  };
  stream(0.5 * dt);
  if (opt.forces) {
    auto kf = forces(kernel, out.dists.density_field_r(), out.dists.density_field_b());
    double fmax = std::max(kf.F_r.max_abs(), kf.F_b.max_abs());
    double limit = fmax > 0.0 ? opt.cfl * vg.dv / (fmax * scale) : 1e300;
    if (dt > limit * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "time step " << dt << " violates the force bound; admissible dt <= " << limit;
      throw Error(ErrorCode::StabilityViolation, os.str());
    }
    const std::size_t nv = vg.size();
    const int nax = std::min(g.dim, vg.dim_v);
    std::vector<std::vector<std::size_t>> starts(nax);
    std::vector<std::size_t> strides(nax);
    for (int a = 0; a < nax; ++a) velocity_lines(vg, a, starts[a], strides[a]);
    const std::size_t n = vg.nodes_per_axis;
    parallel_for(g.size(), 4, [&](std::size_t cb, std::size_t ce) {
      std::vector<double> in(n), res(n);
      for (std::size_t c = cb; c < ce; ++c) {
        for (int species = 0; species < 2; ++species) {
          double* slice = (species == 0 ? out.dists.f_r.data() : out.dists.f_b.data()) + c * nv;
          const VectorField& F = species == 0 ? kf.F_r : kf.F_b;
          for (int a = 0; a < nax; ++a) {
            double sh = F.comp(a)[c] * dt * scale / vg.dv;
            if (sh == 0.0) continue;
            for (std::size_t st : starts[a]) {
              for (std::size_t i = 0; i < n; ++i) in[i] = slice[st + i * strides[a]];
              advect_line(in.data(), res.data(), n, sh, false, opt.scheme, opt.stencil_radius,
                          opt.positivity_limiter);
              for (std::size_t i = 0; i < n; ++i) slice[st + i * strides[a]] = res[i];
            }
          }
        }
      }
    });
  }
  stream(0.5 * dt);
  out.time = s.time + dt;
  return out;
}

KineticState collide_step(const KineticState& s, double nu_collision, double dt) {
  check_state(s);
  if (!(nu_collision > 0.0)) throw Error(ErrorCode::InvalidArgument, "collision rate must be positive");
  double stiff = s.scaling == Scaling::Parabolic ? s.epsilon * s.epsilon : s.epsilon;
  double decay = std::exp(-nu_collision * dt / stiff);
  KineticState out = s;
  const auto& vg = s.dists.vgrid;
  const std::size_t nv = vg.size();
  parallel_for(s.dists.grid.size(), 4, [&](std::size_t cb, std::size_t ce) {
    std::vector<double> M(nv);
    std::array<double, 5> warm{};
    for (std::size_t c = cb; c < ce; ++c) {
      double nr, nb;
      warm.fill(0.0);
      bgk_targets(s.dists.slice_r(c), s.dists.slice_b(c), vg, M, nr, nb, &warm);
      if (nr + nb == 0.0) continue;
      auto fr = out.dists.slice_r(c);
      auto fb = out.dists.slice_b(c);
      for (std::size_t k = 0; k < nv; ++k) {
        fr[k] = nr * M[k] + (fr[k] - nr * M[k]) * decay;
        fb[k] = nb * M[k] + (fb[k] - nb * M[k]) * decay;
      }
    }
  });
  return out;
}

Diagnostics diagnostics(const KineticState& s, const KacKernel& kernel) {
  const auto& d = s.dists;
  const auto& vg = d.vgrid;
  const std::size_t nv = vg.size();
  const double dV = d.grid.cell_volume();
  Diagnostics out;
  std::vector<double> v2(nv);
  std::vector<std::array<double, 3>> vel(nv);
  for (std::size_t k = 0; k < nv; ++k) {
    vel[k] = vg.velocity(k);
    v2[k] = vel[k][0] * vel[k][0] + vel[k][1] * vel[k][1] + vel[k][2] * vel[k][2];
  }
  out.min_f = d.min_value();
  for (std::size_t c = 0; c < d.grid.size(); ++c) {
    auto fr = d.slice_r(c);
    auto fb = d.slice_b(c);
    double mr = 0, mb = 0, ek = 0, ent = 0;
    std::array<double, 3> mom{0, 0, 0};
    for (std::size_t k = 0; k < nv; ++k) {
      double t = fr[k] + fb[k];
      mr += fr[k];
      mb += fb[k];
      for (int a = 0; a < vg.dim_v; ++a) mom[a] += vel[k][a] * t;
      ek += 0.5 * v2[k] * t;
      for (double f : {fr[k], fb[k]}) {
        if (f > 0.0) {
          ent += f * std::log(std::max(f, kLogFloor));
          if (f < kLogFloor) out.floored = true;
        }
      }
    }
    double w = vg.weight * dV;
    out.mass_r += mr * w;
    out.mass_b += mb * w;
    for (int a = 0; a < 3; ++a) out.momentum[a] += mom[a] * w;
    out.energy_kinetic += ek * w;
    out.entropy += ent * w;
  }
  ScalarField nr = d.density_field_r();
  ScalarField nb = d.density_field_b();
  if (kernel.grid == d.grid) {
    ScalarField unb = convolve(kernel, nb);
    double ei = 0.0;
    for (std::size_t c = 0; c < nr.size(); ++c) ei += nr[c] * unb[c];
    out.energy_interaction = ei * dV;
  }
  out.energy_total = out.energy_kinetic + out.energy_interaction;
  return out;
}

Trajectory run(const KineticState& initial, const KacKernel& kernel, double nu_collision, double t_end, double dt,
               const RunOptions& opt, const KineticObserver& observer) {
  if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be positive");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  std::size_t nsteps = static_cast<std::size_t>(std::llround(t_end / dt));
  if (nsteps == 0 || std::abs(nsteps * dt - t_end) > 1e-9 * t_end)
    nsteps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const std::size_t stride = std::max<std::size_t>(opt.stride, 1);
  Trajectory tr;
  KineticState s = initial;
  const KacKernel* kp = &kernel;
  auto record = [&](std::size_t step) {
    Diagnostics dg = diagnostics(s, *kp);
    tr.steps.push_back(step);
    tr.times.push_back(s.time);
    tr.diagnostics.push_back(dg);
    if (observer) observer(step, s.time, dg, s);
  };
  record(0);
  const double t0 = s.time;
  for (std::size_t step = 1; step <= nsteps; ++step) {
    double target = step == nsteps ? t0 + t_end : t0 + step * dt;
    double h = target - s.time;
    s = collide_step(s, nu_collision, 0.5 * h);
    s = vlasov_step(s, kernel, h, opt.transport);
    s = collide_step(s, nu_collision, 0.5 * h);
    s.time = target;
    if (step % stride == 0 || step == nsteps) record(step);
  }
  tr.final_state = std::move(s);
  return tr;
}

HydroState hydro_moments(const KineticState& s) {
  const auto& d = s.dists;
  const auto& vg = d.vgrid;
  HydroState h(d.grid, vg.dim_v);
  std::vector<double> tot(vg.size());
  std::size_t vacuum = 0;
  for (std::size_t c = 0; c < d.grid.size(); ++c) {
    auto fr = d.slice_r(c);
    auto fb = d.slice_b(c);
    for (std::size_t k = 0; k < tot.size(); ++k) tot[k] = fr[k] + fb[k];
    double nr = d.density_r(c), nb = d.density_b(c);
    Moments m = moments(tot, vg);
    h.rho[c] = nr + nb;
    h.phi[c] = nr - nb;
    if (!m.defined) {
      ++vacuum;
      h.T[c] = 0.0;
      continue;
    }
    for (int a = 0; a < vg.dim_v; ++a) h.u.comp(a)[c] = m.u[a];
    h.T[c] = m.T;
  }
  if (vacuum) emit_warning("hydro_moments: " + std::to_string(vacuum) + " vacuum cells");
  return h;
}

KineticState kinetic_from_hydro(const HydroState& h, const VelocityGrid& vg, double epsilon, Scaling scaling) {
  if (h.dof != vg.dim_v) throw Error(ErrorCode::InvalidArgument, "hydro dof must equal the velocity dim");
  KineticState s;
  s.dists = SpeciesDistributions(h.grid, vg);
  s.epsilon = epsilon;
  s.scaling = scaling;
  const std::size_t nv = vg.size();
  std::vector<double> M(nv);
  for (std::size_t c = 0; c < h.grid.size(); ++c) {
    MaxwellianParams p;
    p.n = 1.0;
    for (int a = 0; a < vg.dim_v; ++a) p.u[a] = h.u.comp(a)[c];
    p.T = h.T[c];
    discrete_maxwellian_into(p, vg, M);
    double sum = 0.0;
    for (double v : M) sum += v;
    sum *= vg.weight;
    double nr = 0.5 * (h.rho[c] + h.phi[c]), nb = 0.5 * (h.rho[c] - h.phi[c]);
    auto fr = s.dists.slice_r(c);
    auto fb = s.dists.slice_b(c);
    for (std::size_t k = 0; k < nv; ++k) {
      fr[k] = nr * M[k] / sum;
      fb[k] = nb * M[k] / sum;
    }
  }
  return s;
}

}  // namespace segrekin
