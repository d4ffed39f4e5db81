#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"
#include "segrekin/app.hpp"
#include "segrekin/collision.hpp"
#include "segrekin/equilibrium.hpp"
#include "segrekin/error.hpp"
#include "segrekin/hydro.hpp"
#include "segrekin/kinetic.hpp"
#include "segrekin/parallel.hpp"

#ifndef SEGREKIN_VERSION
#define SEGREKIN_VERSION "0.0.0"
#endif

namespace segrekin {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : f_(path, std::ios::binary | std::ios::trunc) {
    if (!f_) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < header.size(); ++i) f_ << (i ? "," : "") << header[i];
    f_ << "\n";
  }
  void row(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) f_ << (i ? "," : "") << fmt(v[i]);
    f_ << "\n";
  }
  void raw(const std::string& line) { f_ << line << "\n"; }

 private:
  std::ofstream f_;
};

struct Outputs {
  fs::path dir;
  std::vector<std::string> files;
  fs::path add(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
};

// Reproducible uniform deviates in [0, 1).
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
};

SpatialGrid grid_from(const RunConfig& c) {
  int dim = static_cast<int>(c.integer("grid.dim"));
  return make_spatial_grid(dim, {c.number("grid.extent"), dim == 2 ? c.number("grid.extent_y") : 1.0},
                           {static_cast<int>(c.integer("grid.cells")), dim == 2 ? static_cast<int>(c.integer("grid.cells_y")) : 1});
}

VelocityGrid vgrid_from(const RunConfig& c) {
  return make_velocity_grid(static_cast<int>(c.integer("velocity.dim")), c.number("velocity.v_max"),
                            static_cast<int>(c.integer("velocity.nodes")));
}

KacKernel kernel_from(const RunConfig& c, const SpatialGrid& g) {
  PotentialSpec ps;
  ps.shape = parse_shape(c.str("potential.shape"));
  ps.radius = c.number("potential.radius");
  ps.width = c.number("potential.width");
  ps.amplitude = c.number("potential.amplitude");
  return tabulate_kernel(ps, g);
}

// Two unit-amplitude perturbation profiles (for density and order parameter).
std::array<std::vector<double>, 2> perturbations(const RunConfig& c, const SpatialGrid& g, std::uint64_t seed) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::array<std::vector<double>, 2> p{std::vector<double>(g.size()), std::vector<double>(g.size())};
  if (c.str("physics.init") == "mode") {
    long m = c.integer("physics.mode");
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto co = g.coords(i);
      double arg = two_pi * m * g.center(0, co[0]) / g.extent[0];
      double fy = g.dim == 2 ? std::cos(two_pi * m * g.center(1, co[1]) / g.extent[1]) : 1.0;
      p[0][i] = std::sin(arg) * fy;
      p[1][i] = std::cos(arg) * fy;
    }
    return p;
  }
  Rng rng(seed);
  for (int f = 0; f < 2; ++f) {
    double norm = 0.0;
    std::vector<std::array<double, 4>> modes;
    int my = g.dim == 2 ? 4 : 0;
    for (int m0 = 0; m0 <= 8; ++m0)
      for (int m1 = -my; m1 <= my; ++m1) {
        if (m0 == 0 && m1 <= 0) continue;
        double a = rng.uniform(), ph = two_pi * rng.uniform();
        modes.push_back({static_cast<double>(m0), static_cast<double>(m1), a, ph});
        norm += a;
      }
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto co = g.coords(i);
      double x = g.center(0, co[0]) / g.extent[0];
      double y = g.dim == 2 ? g.center(1, co[1]) / g.extent[1] : 0.0;
      double s = 0.0;
      for (const auto& md : modes) s += md[2] * std::sin(two_pi * (md[0] * x + md[1] * y) + md[3]);
      p[f][i] = s / norm;
    }
  }
  return p;
}

HydroState initial_hydro(const RunConfig& c, const SpatialGrid& g, int dof, std::uint64_t seed) {
  double rho = c.number("physics.rho"), T = c.number("physics.T"), a = c.number("physics.perturbation");
  double c0 = c.number("physics.phi0") / rho;
  HydroState h(g, dof, rho, T, 0.0);
  auto p = perturbations(c, g, seed);
  for (std::size_t i = 0; i < g.size(); ++i) {
    h.rho[i] = rho * (1.0 + a * p[0][i]);
    h.phi[i] = h.rho[i] * std::clamp(c0 + a * p[1][i], -0.999, 0.999);
    h.u.comp(0)[i] = c.number("physics.u0");
  }
  h.check_positivity("initial data");
  return h;
}

double resolve_dt(const RunConfig& c, double admissible) {
  double dt = c.number("solver.dt");
  return dt > 0.0 ? dt : 0.9 * admissible;
}

std::vector<std::string> field_header(const SpatialGrid& g, int dof) {
  std::vector<std::string> h{"x"};
  if (g.dim == 2) h.push_back("y");
  const char* names[] = {"u_x", "u_y", "u_z"};
  h.push_back("rho");
  for (int j = 0; j < dof; ++j) h.push_back(j < 3 ? names[j] : "u_" + std::to_string(j));
  h.push_back("T");
  h.push_back("phi");
  return h;
}

void write_fields(Outputs& out, const std::string& name, const HydroState& s) {
  Csv csv(out.add(name), field_header(s.grid, s.dof));
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    auto co = s.grid.coords(i);
    std::vector<double> r{s.grid.center(0, co[0])};
    if (s.grid.dim == 2) r.push_back(s.grid.center(1, co[1]));
    r.push_back(s.rho[i]);
    for (int j = 0; j < s.dof; ++j) r.push_back(s.u.comp(j)[i]);
    r.push_back(s.T[i]);
    r.push_back(s.phi[i]);
    csv.row(r);
  }
}

void write_distributions(Outputs& out, const std::string& tag, const KineticState& s) {
  std::vector<std::uint64_t> dims{s.dists.grid.size(), s.dists.nv()};
  write_snapshot(out.add("f_r_" + tag + ".bin").string(), dims, s.dists.f_r);
  write_snapshot(out.add("f_b_" + tag + ".bin").string(), dims, s.dists.f_b);
}

TransportModel transport_model(const RunConfig& c, int dof) {
  MaxwellianParams p{c.number("physics.rho"), {0.0, 0.0, 0.0}, c.number("physics.T")};
  double nu = c.number("physics.nu_collision");
  TransportModel tm;
  tm.n_ref = p.n;
  tm.T_ref = p.T;
  const std::string& m = c.str("transport.method");
  if (m == "bgk-analytic") {
    tm.coeffs = transport_bgk_analytic(p, nu, dof);
  } else {
    VelocityGrid vg = vgrid_from(c);
    if (vg.dim_v != dof) throw Error(ErrorCode::Config, "numeric transport needs velocity.dim equal to the hydro dof");
    CrossSection cs = CrossSection::hard_spheres();
    tm.coeffs = transport_coefficients(TransportMethod::NumericOperator, p, nu, &vg, m == "numeric-exact" ? &cs : nullptr);
    tm.scale_with_state = m == "numeric-bgk";
  }
  return tm;
}

void phase_diagram(const RunConfig& c, Outputs& out, RunManifest& man) {
  SpatialGrid g = grid_from(c);
  KacKernel k = kernel_from(c, g);
  double rho = c.number("physics.rho");
  double Tc = critical_temperature(rho, k);
  long n = c.integer("phase.points");
  if (n < 2) throw Error(ErrorCode::Config, "phase.points must be at least 2");
  double lo = c.number("phase.t_min"), hi = c.number("phase.t_max");
  if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrorCode::Config, "need 0 < phase.t_min < phase.t_max");
  Csv csv(out.add("phase_diagram.csv"), {"T", "phi_star", "T_over_Tc"});
  for (long i = 0; i < n; ++i) {
    double r = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    double T = r * Tc;
    csv.row({T, coexistence_order_parameter(T, rho, k), r});
  }
  man.summary["T_c"] = Tc;
  man.summary["uhat0"] = k.uhat0;
}

void interface(const RunConfig& c, Outputs& out, RunManifest& man) {
  SpatialGrid g = grid_from(c);
  KacKernel k = kernel_from(c, g);
  InterfaceOptions opt;
  opt.seed = c.str("interface.seed") == "step" ? InterfaceSeed::Step : InterfaceSeed::Tanh;
  opt.tolerance = c.number("interface.tolerance");
  opt.max_iterations = static_cast<int>(c.integer("interface.max_iterations"));
  double T = c.number("physics.T"), rho = c.number("physics.rho");
  InterfaceProfile prof = interface_profile(T, rho, k, opt);
  int dof = static_cast<int>(c.integer("velocity.dim"));
  HydroState h(g, dof, rho, T, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    h.rho[i] = prof.n1[i] + prof.n2[i];
    h.phi[i] = prof.n1[i] - prof.n2[i];
  }
  auto method = c.str("solver.gradient") == "centered" ? GradientMethod::Centered : GradientMethod::Spectral;
  FluxQ q = compute_Q(h, k, method);
  TransportModel tm = transport_model(c, dof);
  double eps = c.number("physics.eps");
  HydroRhs r = vns_rhs(h, k, eps > 0.0 ? &tm : nullptr, eps, method);
  Csv csv(out.add("interface.csv"), {"x", "n1", "n2", "rho", "phi", "q"});
  for (std::size_t i = 0; i < g.size(); ++i)
    csv.row({g.center(0, static_cast<long>(i)), prof.n1[i], prof.n2[i], h.rho[i], h.phi[i], q.q.comp(0)[i]});
  std::vector<double> both(prof.n1.values);
  both.insert(both.end(), prof.n2.values.begin(), prof.n2.values.end());
  write_snapshot(out.add("profile.bin").string(), {2, g.size()}, both);
  man.summary["T_c"] = critical_temperature(rho, k);
  man.summary["phi_star"] = prof.phi_star;
  man.summary["residual"] = prof.residual;
  man.summary["iterations"] = prof.iterations;
  man.summary["converged"] = prof.converged ? 1.0 : 0.0;
  man.summary["q_max"] = q.q.max_abs();
  man.summary["vns_rhs_max"] = r.max_abs();
}

void kinetic_run(const RunConfig& c, Outputs& out, RunManifest& man, std::uint64_t seed) {
  SpatialGrid g = grid_from(c);
  VelocityGrid vg = vgrid_from(c);
  KacKernel k = kernel_from(c, g);
  HydroState h0 = initial_hydro(c, g, vg.dim_v, seed);
  Scaling sc = c.str("physics.scaling") == "parabolic" ? Scaling::Parabolic : Scaling::Euler;
  double eps = c.number("physics.eps");
  KineticState s0 = kinetic_from_hydro(h0, vg, eps, sc);
  RunOptions ro;
  ro.transport.scheme = c.str("solver.scheme") == "upwind" ? TransportScheme::Upwind : TransportScheme::SemiLagrangian;
  ro.transport.forces = c.boolean("solver.forces");
  ro.stride = static_cast<std::size_t>(std::max(1L, c.integer("solver.stride")));
  long snap = c.integer("solver.snapshot_stride");
  double nu = c.number("physics.nu_collision");
  double dt = resolve_dt(c, admissible_dt(s0, k, ro.transport));
  double t_end = c.number("solver.t_end");

  bool exact = c.str("physics.collision") == "exact";
  std::unique_ptr<CollisionLattice> lattice;
  if (exact) lattice = std::make_unique<CollisionLattice>(vg, CrossSection::hard_spheres());
  auto production = [&](const KineticState& st) {
    auto ep = entropy_production(st.dists, exact ? CollisionModel::ExactJ : CollisionModel::Bgk, lattice.get(), nu);
    double total = 0.0;
    for (const auto& e : ep) total += (e.N1 + e.N2 + e.Ncross) * g.cell_volume();
    return total;
  };

  Csv csv(out.add("timeseries.csv"),
          {"step", "time", "mass_r", "mass_b", "momentum_x", "momentum_y", "momentum_z", "energy_kinetic",
           "energy_interaction", "energy_total", "entropy", "entropy_production", "min_f"});
  auto obs = [&](std::size_t step, double time, const Diagnostics& d, const KineticState& st) {
    csv.row({static_cast<double>(step), time, d.mass_r, d.mass_b, d.momentum[0], d.momentum[1], d.momentum[2],
             d.energy_kinetic, d.energy_interaction, d.energy_total, d.entropy, production(st), d.min_f});
    if (snap > 0 && step % static_cast<std::size_t>(snap) == 0) {
      char tag[32];
      std::snprintf(tag, sizeof tag, "%08zu", step);
      write_distributions(out, tag, st);
    }
  };
  Trajectory tr = run(s0, k, nu, t_end, dt, ro, obs);
  write_distributions(out, "final", tr.final_state);
  write_fields(out, "fields.csv", hydro_moments(tr.final_state));
  const Diagnostics& a = tr.diagnostics.front();
  const Diagnostics& b = tr.diagnostics.back();
  man.summary["dt"] = dt;
  man.summary["steps"] = static_cast<double>(tr.steps.back());
  man.summary["mass_r_drift"] = (b.mass_r - a.mass_r) / a.mass_r;
  man.summary["mass_b_drift"] = (b.mass_b - a.mass_b) / a.mass_b;
  man.summary["energy_drift"] = (b.energy_total - a.energy_total) / std::abs(a.energy_total);
  man.summary["min_f"] = b.min_f;
  man.labels["scaling"] = c.str("physics.scaling");
}

void hydro_run(const RunConfig& c, Outputs& out, RunManifest& man, std::uint64_t seed) {
  SpatialGrid g = grid_from(c);
  int dof = static_cast<int>(c.integer("velocity.dim"));
  KacKernel k = kernel_from(c, g);
  HydroState s = initial_hydro(c, g, dof, seed);
  double eps = c.number("physics.eps");
  if (eps < 0.0) throw Error(ErrorCode::Config, "physics.eps must be nonnegative");
  TransportModel tm;
  const TransportModel* coeffs = nullptr;
  if (eps > 0.0) {
    tm = transport_model(c, dof);
    coeffs = &tm;
  }
  man.labels["model"] = eps > 0.0 ? "vlasov-navier-stokes" : "vlasov-euler";
  VnsOptions opt;
  const std::string& lim = c.str("solver.limiter");
  opt.limiter = lim == "minmod" ? SlopeLimiter::Minmod : lim == "none" ? SlopeLimiter::None : SlopeLimiter::MC;
  opt.rk_order = static_cast<int>(c.integer("solver.rk_order"));
  double t_end = c.number("solver.t_end");
  std::size_t stride = static_cast<std::size_t>(std::max(1L, c.integer("solver.stride")));
  long snap = c.integer("solver.snapshot_stride");
  Csv csv(out.add("timeseries.csv"), {"step", "time", "dt", "mass", "phi_total", "momentum_x", "momentum_y",
                                      "energy", "min_rho", "min_T"});
  auto record = [&](std::size_t step, double t, double dt) {
    HydroTotals tot = hydro_totals(s);
    double mr = *std::min_element(s.rho.values.begin(), s.rho.values.end());
    double mT = *std::min_element(s.T.values.begin(), s.T.values.end());
    csv.row({static_cast<double>(step), t, dt, tot.mass, tot.phi, tot.momentum[0], tot.momentum[1], tot.energy, mr, mT});
  };
  HydroTotals first = hydro_totals(s);
  double t = 0.0;
  std::size_t step = 0;
  record(0, 0.0, 0.0);
  while (t < t_end * (1.0 - 1e-14)) {
    double dt = std::min(resolve_dt(c, vns_admissible_dt(s, coeffs, eps, opt)), t_end - t);
    s = vns_step(s, k, coeffs, eps, dt, opt);
    t += dt;
    ++step;
    if (step % stride == 0 || t >= t_end * (1.0 - 1e-14)) record(step, t, dt);
    if (snap > 0 && step % static_cast<std::size_t>(snap) == 0) {
      char name[40];
      std::snprintf(name, sizeof name, "fields_%08zu.csv", step);
      write_fields(out, name, s);
    }
  }
  write_fields(out, "fields.csv", s);
  HydroTotals last = hydro_totals(s);
  man.summary["steps"] = static_cast<double>(step);
  man.summary["mass_drift"] = (last.mass - first.mass) / first.mass;
  man.summary["phi_drift"] = last.phi - first.phi;
  man.summary["energy_drift"] = (last.energy - first.energy) / first.energy;
}

void ins_run(const RunConfig& c, Outputs& out, RunManifest& man, std::uint64_t seed) {
  SpatialGrid g = grid_from(c);
  KacKernel k = kernel_from(c, g);
  INSState s(g, c.number("physics.rho"), c.number("physics.T"));
  auto p = perturbations(c, g, seed);
  double a = c.number("physics.perturbation");
  for (std::size_t i = 0; i < g.size(); ++i) s.phi[i] = c.number("physics.phi0") + a * p[1][i];
  double A = c.number("ins.velocity");
  if (A != 0.0 && g.dim == 2) {
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto co = g.coords(i);
      double x = two_pi * g.center(0, co[0]) / g.extent[0], y = two_pi * g.center(1, co[1]) / g.extent[1];
      s.u.comp(0)[i] = A * std::sin(x) * std::cos(y) / g.extent[1];
      s.u.comp(1)[i] = -A * std::cos(x) * std::sin(y) / g.extent[0];
    }
    project_divergence_free(s.u);
  }
  INSParams prm;
  prm.nu_visc = c.number("ins.nu_visc");
  prm.kappa = c.number("ins.kappa");
  prm.D_diff = c.number("ins.D_diff");
  prm.variant = c.str("ins.variant") == "full" ? INSVariant::Full : INSVariant::Reduced;
  double t_end = c.number("solver.t_end");
  std::size_t stride = static_cast<std::size_t>(std::max(1L, c.integer("solver.stride")));
  long m = c.integer("physics.mode");
  Csv csv(out.add("timeseries.csv"), {"step", "time", "phi_l2", "phi_mean", "kinetic_energy", "max_divergence",
                                      "constraint_defect", "mode_amplitude"});
  const double two_pi = 2.0 * std::numbers::pi;
  auto record = [&](std::size_t step, double t) {
    double l2 = 0.0, mean = 0.0, ke = 0.0, amp_c = 0.0, amp_s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      l2 += s.phi[i] * s.phi[i];
      mean += s.phi[i];
      for (int d = 0; d < g.dim; ++d) ke += 0.5 * s.u.comp(d)[i] * s.u.comp(d)[i];
      double x = two_pi * m * g.center(0, g.coords(i)[0]) / g.extent[0];
      amp_c += s.phi[i] * std::cos(x);
      amp_s += s.phi[i] * std::sin(x);
    }
    double n = static_cast<double>(g.size());
    csv.row({static_cast<double>(step), t, std::sqrt(l2 * g.cell_volume()), mean / n, ke * g.cell_volume(),
             ins_divergence(s), ins_constraint_defect(s, k), 2.0 * std::hypot(amp_c, amp_s) / n});
  };
  record(0, 0.0);
  double t = 0.0;
  std::size_t step = 0;
  while (t < t_end * (1.0 - 1e-14)) {
    double dt = c.number("solver.dt");
    if (!(dt > 0.0)) dt = std::min(0.5 * ins_admissible_dt(s), t_end / 200.0);
    dt = std::min(dt, t_end - t);
    s = ins_step(s, k, prm, dt);
    t += dt;
    ++step;
    if (step % stride == 0 || t >= t_end * (1.0 - 1e-14)) record(step, t);
  }
  std::vector<std::string> header{"x"};
  if (g.dim == 2) header.push_back("y");
  for (const char* h : {"u_x", "u_y", "phi", "theta", "p"}) header.push_back(h);
  if (g.dim == 1) header.erase(header.begin() + 2);
  Csv fields(out.add("fields.csv"), header);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto co = g.coords(i);
    std::vector<double> r{g.center(0, co[0])};
    if (g.dim == 2) r.push_back(g.center(1, co[1]));
    for (int d = 0; d < g.dim; ++d) r.push_back(s.u.comp(d)[i]);
    r.push_back(s.phi[i]);
    r.push_back(s.theta[i]);
    r.push_back(s.p[i]);
    fields.row(r);
  }
  man.summary["steps"] = static_cast<double>(step);
  man.summary["growth_rate_theory"] =
      dispersion_growth_rate(m, 0, s.rho_bar, s.T_bar, prm.D_diff, k);
  man.summary["max_divergence"] = ins_divergence(s);
}

void transport(const RunConfig& c, Outputs& out, RunManifest& man) {
  VelocityGrid vg = vgrid_from(c);
  MaxwellianParams p{c.number("physics.rho"), {0.0, 0.0, 0.0}, c.number("physics.T")};
  double nu = c.number("physics.nu_collision");
  TransportCoefficients ref = transport_bgk_analytic(p, nu, vg.dim_v);
  TransportModel tm = transport_model(c, vg.dim_v);
  Csv csv(out.add("transport.csv"), {"quantity", "value", "bgk_analytic", "relative_difference"});
  auto line = [&](const char* q, double v, double r) {
    csv.raw(std::string(q) + "," + fmt(v) + "," + fmt(r) + "," + fmt(r != 0.0 ? (v - r) / r : 0.0));
  };
  line("nu_visc", tm.coeffs.nu_visc, ref.nu_visc);
  line("kappa", tm.coeffs.kappa, ref.kappa);
  line("D_diff", tm.coeffs.D_diff, ref.D_diff);
  man.labels["method"] = c.str("transport.method");
  man.summary["nu_visc"] = tm.coeffs.nu_visc;
  man.summary["kappa"] = tm.coeffs.kappa;
  man.summary["D_diff"] = tm.coeffs.D_diff;
}

void validate(Outputs& out, RunManifest& man, std::uint64_t seed) {
  auto results = run_validation(seed);
  Csv csv(out.add("validate.csv"), {"property", "passed", "value", "tolerance", "detail"});
  int failed = 0;
  for (const auto& r : results) {
    csv.raw(r.name + "," + (r.passed ? "1" : "0") + "," + fmt(r.value) + "," + fmt(r.tolerance) + ",\"" + r.detail + "\"");
    failed += r.passed ? 0 : 1;
  }
  man.summary["properties"] = static_cast<double>(results.size());
  man.summary["failed"] = failed;
}

}  // namespace

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "segrekin";
  j["version"] = tool_version;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["threads"] = threads;
  j["started"] = started;
  j["finished"] = finished;
  j["config"] = config_echo;
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : files) j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : summary) {
    if (std::isfinite(v)) s[k] = v;
    else s[k] = nullptr;
  }
  j["summary"] = s;
  j["labels"] = labels;
  return j.dump(2) + "\n";
}

RunManifest run_experiment(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed, int threads) {
  if (threads > 0) set_num_threads(threads);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw Error(ErrorCode::Io, "cannot create output directory '" + out_dir + "'");
  RunManifest man;
  man.tool_version = SEGREKIN_VERSION;
  man.experiment = experiment_name(cfg.experiment);
  man.seed = seed;
  man.threads = num_threads();
  man.started = utc_now();
  man.config_echo = cfg.echo();
  Outputs out{out_dir, {}};
  switch (cfg.experiment) {
    case Experiment::PhaseDiagram: phase_diagram(cfg, out, man); break;
    case Experiment::Interface: interface(cfg, out, man); break;
    case Experiment::KineticRun: kinetic_run(cfg, out, man, seed); break;
    case Experiment::HydroRun: hydro_run(cfg, out, man, seed); break;
    case Experiment::InsRun: ins_run(cfg, out, man, seed); break;
    case Experiment::Transport: transport(cfg, out, man); break;
    case Experiment::Validate: validate(out, man, seed); break;
  }
  for (const auto& w : take_warnings()) man.labels["warning_" + std::to_string(man.labels.size())] = w;
  for (const auto& f : out.files) {
    fs::path p = fs::path(out_dir) / f;
    man.files.push_back({f, sha256_file(p.string()), static_cast<std::uint64_t>(fs::file_size(p))});
  }
  man.finished = utc_now();
  std::ofstream mf(fs::path(out_dir) / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!mf) throw Error(ErrorCode::Io, "cannot write manifest in '" + out_dir + "'");
  mf << man.to_json();
  return man;
}

RunManifest run_experiment(const RunConfig& cfg, const std::string& out_dir) {
  return run_experiment(cfg, out_dir, static_cast<std::uint64_t>(cfg.integer("run.seed")), 0);
}

}  // namespace segrekin
