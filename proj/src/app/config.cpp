#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "segrekin/app.hpp"
#include "segrekin/error.hpp"

namespace segrekin {

namespace {

const char* kExperimentNames[] = {"phase-diagram", "interface", "kinetic-run", "hydro-run",
                                  "ins-run",       "transport", "validate"};

// Keys that must be given explicitly for each experiment.
const std::map<Experiment, std::vector<std::string>>& required_keys() {
  static const std::map<Experiment, std::vector<std::string>> r = {
      {Experiment::PhaseDiagram, {"physics.rho"}},
      {Experiment::Interface, {"physics.T", "physics.rho"}},
      {Experiment::KineticRun, {"solver.t_end"}},
      {Experiment::HydroRun, {"solver.t_end"}},
      {Experiment::InsRun, {"solver.t_end"}},
      {Experiment::Transport, {}},
      {Experiment::Validate, {}},
  };
  return r;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << msg;
  throw Error(ErrorCode::Config, os.str());
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

bool parse_long(const std::string& s, long& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

const ConfigKey* find_key(const std::string& k) {
  for (const auto& c : config_schema())
    if (k == c.key) return &c;
  return nullptr;
}

// Returns the canonical text of a value or throws naming the line.
std::string canonical(const ConfigKey& spec, const std::string& raw, int line) {
  std::string v = raw;
  switch (spec.type) {
    case ValueType::Number: {
      double d;
      if (!parse_double(v, d)) fail(line, std::string("key '") + spec.key + "' expects a number, got '" + raw + "'");
      break;
    }
    case ValueType::Integer: {
      long i;
      if (!parse_long(v, i)) fail(line, std::string("key '") + spec.key + "' expects an integer, got '" + raw + "'");
      break;
    }
    case ValueType::Boolean:
      if (v != "true" && v != "false")
        fail(line, std::string("key '") + spec.key + "' expects true or false, got '" + raw + "'");
      break;
    case ValueType::String:
      break;
  }
  if (spec.choices) {
    std::string all = spec.choices;
    std::stringstream ss(all);
    std::string c;
    bool ok = false;
    while (std::getline(ss, c, '|')) ok = ok || c == v;
    if (!ok) fail(line, std::string("key '") + spec.key + "' must be one of " + all + ", got '" + raw + "'");
  }
  return v;
}

}  // namespace

const char* experiment_name(Experiment e) { return kExperimentNames[static_cast<int>(e)]; }

Experiment parse_experiment(const std::string& name) {
  for (int i = 0; i < 7; ++i)
    if (name == kExperimentNames[i]) return static_cast<Experiment>(i);
  throw Error(ErrorCode::Config, "unknown experiment '" + name + "'");
}

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"run.experiment", ValueType::String, nullptr,
       "phase-diagram|interface|kinetic-run|hydro-run|ins-run|transport|validate", "experiment to run"},
      {"run.seed", ValueType::Integer, "0", nullptr, "seed for random initial data (CLI --seed overrides)"},

      {"grid.dim", ValueType::Integer, "1", "1|2", "spatial dimension"},
      {"grid.extent", ValueType::Number, "1", nullptr, "torus length along x"},
      {"grid.extent_y", ValueType::Number, "1", nullptr, "torus length along y"},
      {"grid.cells", ValueType::Integer, "64", nullptr, "cells along x"},
      {"grid.cells_y", ValueType::Integer, "1", nullptr, "cells along y"},

      {"velocity.dim", ValueType::Integer, "1", "1|2|3", "velocity dimension"},
      {"velocity.v_max", ValueType::Number, "6", nullptr, "velocity box half width"},
      {"velocity.nodes", ValueType::Integer, "32", nullptr, "nodes per velocity axis (even)"},

      {"potential.shape", ValueType::String, "tophat", "tophat|smooth_bump|gaussian", "Kac kernel profile"},
      {"potential.radius", ValueType::Number, "0.1", nullptr, "tophat / bump radius"},
      {"potential.width", ValueType::Number, "0.05", nullptr, "gaussian standard deviation"},
      {"potential.amplitude", ValueType::Number, "1", nullptr, "kernel amplitude"},

      {"physics.T", ValueType::Number, "1", nullptr, "temperature"},
      {"physics.rho", ValueType::Number, "1", nullptr, "total density"},
      {"physics.phi0", ValueType::Number, "0", nullptr, "mean order parameter"},
      {"physics.u0", ValueType::Number, "0", nullptr, "uniform x velocity"},
      {"physics.eps", ValueType::Number, "0.1", nullptr, "Knudsen number; 0 selects Vlasov-Euler in hydro-run"},
      {"physics.nu_collision", ValueType::Number, "1", nullptr, "BGK collision frequency"},
      {"physics.scaling", ValueType::String, "euler", "euler|parabolic", "kinetic time scaling"},
      {"physics.collision", ValueType::String, "bgk", "bgk|exact", "collision model for entropy diagnostics"},
      {"physics.init", ValueType::String, "mode", "mode|random", "initial perturbation"},
      {"physics.perturbation", ValueType::Number, "0.05", nullptr, "perturbation amplitude"},
      {"physics.mode", ValueType::Integer, "1", nullptr, "wave number of the mode perturbation"},

      {"solver.dt", ValueType::Number, "0", nullptr, "time step (0: 0.9 of the admissible step)"},
      {"solver.t_end", ValueType::Number, "1", nullptr, "final time"},
      {"solver.stride", ValueType::Integer, "10", nullptr, "time-series output stride in steps"},
      {"solver.snapshot_stride", ValueType::Integer, "0", nullptr, "snapshot stride in steps (0: final only)"},
      {"solver.scheme", ValueType::String, "semi-lagrangian", "semi-lagrangian|upwind", "kinetic transport"},
      {"solver.forces", ValueType::Boolean, "true", nullptr, "apply Vlasov forces"},
      {"solver.limiter", ValueType::String, "mc", "mc|minmod|none", "hydro slope limiter"},
      {"solver.rk_order", ValueType::Integer, "2", "2|3", "hydro SSP Runge-Kutta order"},
      {"solver.gradient", ValueType::String, "spectral", "spectral|centered", "gradients for Q"},

      {"phase.points", ValueType::Integer, "50", nullptr, "temperature samples"},
      {"phase.t_min", ValueType::Number, "0.05", nullptr, "lowest T / T_c"},
      {"phase.t_max", ValueType::Number, "1.2", nullptr, "highest T / T_c"},

      {"interface.seed", ValueType::String, "tanh", "tanh|step", "initial profile"},
      {"interface.tolerance", ValueType::Number, "1e-11", nullptr, "fixed-point tolerance"},
      {"interface.max_iterations", ValueType::Integer, "20000", nullptr, "iteration cap"},

      {"ins.variant", ValueType::String, "reduced", "reduced|full", "incompressible system"},
      {"ins.nu_visc", ValueType::Number, "1", nullptr, "viscosity"},
      {"ins.kappa", ValueType::Number, "2.5", nullptr, "heat conductivity"},
      {"ins.D_diff", ValueType::Number, "1", nullptr, "concentration diffusivity"},
      {"ins.velocity", ValueType::Number, "0", nullptr, "Taylor-Green velocity amplitude"},

      {"transport.method", ValueType::String, "bgk-analytic", "bgk-analytic|numeric-bgk|numeric-exact",
       "transport coefficient evaluation"},
  };
  return schema;
}

double RunConfig::number(const std::string& key) const {
  double d = 0.0;
  parse_double(str(key), d);
  return d;
}

long RunConfig::integer(const std::string& key) const {
  long i = 0;
  parse_long(str(key), i);
  return i;
}

bool RunConfig::boolean(const std::string& key) const { return str(key) == "true"; }

const std::string& RunConfig::str(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw Error(ErrorCode::Config, "configuration has no key '" + key + "'");
  return it->second;
}

bool RunConfig::was_given(const std::string& key) const {
  auto it = defaulted.find(key);
  return it != defaulted.end() && !it->second;
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  std::string section;
  for (const auto& spec : config_schema()) {
    std::string k = spec.key;
    auto dot = k.find('.');
    std::string sec = k.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) os << "\n";
      os << "[" << sec << "]\n";
      section = sec;
    }
    os << k.substr(dot + 1) << " = " << str(k);
    if (defaulted.at(k)) os << "  # default";
    os << "\n";
  }
  return os.str();
}

RunConfig parse_config(const std::string& text, const std::string& experiment) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s;
    bool quoted = false;
    for (char c : raw) {
      if (c == '"') quoted = !quoted;
      if (c == '#' && !quoted) break;
      s += c;
    }
    if (quoted) fail(line, "unterminated string");
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty() || section.find('.') != std::string::npos)
        fail(line, "invalid section name '" + section + "'");
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + s + "'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "missing key");
    if (std::count(key.begin(), key.end(), '.') > 1) fail(line, "key '" + key + "' nests deeper than one level");
    if (key.find('.') == std::string::npos) {
      if (section.empty()) fail(line, "key '" + key + "' has no section");
      key = section + "." + key;
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    else if (value.empty()) fail(line, "key '" + key + "' has no value");
    const ConfigKey* spec = find_key(key);
    if (!spec) fail(line, "unknown key '" + key + "'");
    if (seen.count(key)) fail(line, "duplicate key '" + key + "' (first set on line " + std::to_string(seen[key]) + ")");
    seen[key] = line;
    cfg.values[key] = canonical(*spec, value, line);
    cfg.defaulted[key] = false;
  }
  if (!experiment.empty()) {
    parse_experiment(experiment);
    auto it = cfg.values.find("run.experiment");
    if (it == cfg.values.end()) {
      cfg.values["run.experiment"] = experiment;
      cfg.defaulted["run.experiment"] = false;
    } else if (it->second != experiment) {
      fail(seen["run.experiment"], "config sets experiment '" + it->second + "' but '" + experiment + "' was requested");
    }
  }
  if (!cfg.values.count("run.experiment")) fail(0, "missing required key 'run.experiment'");
  cfg.experiment = parse_experiment(cfg.values["run.experiment"]);
  for (const auto& k : required_keys().at(cfg.experiment))
    if (!cfg.values.count(k))
      fail(0, std::string("missing required key '") + k + "' for experiment " + experiment_name(cfg.experiment));
  for (const auto& spec : config_schema()) {
    if (cfg.values.count(spec.key)) continue;
    cfg.values[spec.key] = spec.default_value ? spec.default_value : "";
    cfg.defaulted[spec.key] = true;
  }
  return cfg;
}

RunConfig load_config(const std::string& path, const std::string& experiment) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), experiment);
}

}  // namespace segrekin
