#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "segrekin/app.hpp"
#include "segrekin/error.hpp"
#include "segrekin/parallel.hpp"

using namespace segrekin;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("segrekin_test_app_" + name);
  fs::remove_all(p);
  return p;
}

std::string config_error(const std::string& text, const std::string& experiment = "") {
  try {
    parse_config(text, experiment);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

const char* kSmallKinetic = R"(
[run]
experiment = kinetic-run
seed = 3

[grid]
extent = 10
cells = 16

[velocity]
nodes = 16

[potential]
radius = 1
amplitude = 0.25

[physics]
T = 1
rho = 2
init = random
perturbation = 0.1

[solver]
dt = 0.02
t_end = 0.4
stride = 5
snapshot_stride = 10
)";

}  // namespace

TEST_CASE("minimal interface config echoes the golden text") {
  RunConfig cfg = load_config(SEGREKIN_TEST_DATA "/interface_minimal.cfg");
  CHECK(cfg.experiment == Experiment::Interface);
  CHECK(cfg.number("physics.T") == 0.35);
  CHECK(cfg.integer("grid.cells") == 512);
  CHECK(cfg.str("potential.shape") == "tophat");
  CHECK(cfg.was_given("physics.rho"));
  CHECK_FALSE(cfg.was_given("physics.eps"));
  CHECK(cfg.boolean("solver.forces"));
  CHECK(cfg.echo() == slurp(SEGREKIN_TEST_DATA "/interface_minimal.echo"));
  // the echo parses back to the same configuration
  RunConfig again = parse_config(cfg.echo());
  CHECK(again.values == cfg.values);
}

TEST_CASE("strict parsing names the offending line") {
  std::string e = config_error(slurp(SEGREKIN_TEST_DATA "/misspelled.cfg"));
  CHECK(contains(e, "line 7"));
  CHECK(contains(e, "temprature"));

  e = config_error("[run]\nexperiment = interface\n[physics]\nrho = 2\n");
  CHECK(contains(e, "physics.T"));

  e = config_error("[run]\nexperiment = phase-diagram\n[physics]\nrho = 2\n[grid]\ncells = many\n");
  CHECK(contains(e, "line 6"));
  CHECK(contains(e, "grid.cells"));

  e = config_error("[run]\nexperiment = phase-diagram\nphysics.rho = 2\nphysics.rho = 3\n");
  CHECK(contains(e, "line 4"));
  CHECK(contains(e, "duplicate"));

  e = config_error("[run]\nexperiment = phase-diagram\nphysics.rho = 2\npotential.shape = square\n");
  CHECK(contains(e, "line 4"));
  CHECK(contains(e, "square"));

  e = config_error("[run]\nexperiment = phase-diagram\nphysics.rho = 2\nsolver.forces = maybe\n");
  CHECK(contains(e, "line 4"));

  e = config_error("[run]\nexperiment = phase-diagram\n[a.b]\n");
  CHECK(contains(e, "line 3"));

  e = config_error("physics.rho = 2\n", "");
  CHECK(contains(e, "experiment"));

  e = config_error("[run]\nexperiment = interface\n", "hydro-run");
  CHECK(contains(e, "hydro-run"));

  RunConfig ok = parse_config("# comment\nphysics.rho = 2  # trailing\nphysics.init = \"mode\"\n", "phase-diagram");
  CHECK(ok.experiment == Experiment::PhaseDiagram);
  CHECK(ok.str("physics.init") == "mode");
}

TEST_CASE("hydro-run dispatch follows eps") {
  const std::string base =
      "[run]\nexperiment = hydro-run\n[grid]\ncells = 32\nextent = 10\n[potential]\nradius = 1\namplitude = 0.25\n"
      "[physics]\nT = 1\nrho = 2\n[solver]\nt_end = 0.05\n";
  RunManifest ve = run_experiment(parse_config(base + "[physics]\neps = 0\n"), scratch("ve").string(), 0, 1);
  CHECK(ve.labels.at("model") == "vlasov-euler");
  RunManifest vns = run_experiment(parse_config(base), scratch("vns").string(), 0, 1);
  CHECK(vns.labels.at("model") == "vlasov-navier-stokes");
}

TEST_CASE("snapshots round trip and corrupt files are refused") {
  fs::path dir = scratch("snap");
  fs::create_directories(dir);
  std::vector<double> data(6);
  for (int i = 0; i < 6; ++i) data[i] = 0.5 * i - 1.0;
  const std::string good = (dir / "good.bin").string();
  write_snapshot(good, {2, 3}, data);
  Snapshot s = read_snapshot(good);
  CHECK(s.dims == std::vector<std::uint64_t>{2, 3});
  CHECK(s.data == data);
  std::string bytes = slurp(good);
  CHECK(bytes.size() == 8 + 4 + 4 + 16 + 1 + 48);
  CHECK(bytes.substr(0, 8) == "SGRKSNAP");

  auto refused = [&](const std::string& content) {
    const std::string p = (dir / "bad.bin").string();
    std::ofstream(p, std::ios::binary) << content;
    try {
      read_snapshot(p);
    } catch (const Error& e) {
      return e.code() == ErrorCode::Io;
    }
    return false;
  };
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(refused(bad_magic));
  CHECK(refused(bytes.substr(0, bytes.size() - 3)));
  CHECK(refused(bytes + "x"));
  std::string bad_version = bytes;
  bad_version[8] = 9;
  CHECK(refused(bad_version));
  std::string bad_dtype = bytes;
  bad_dtype[32] = 7;
  CHECK(refused(bad_dtype));
  CHECK(refused(""));
  CHECK_THROWS_AS(write_snapshot((dir / "x.bin").string(), {4}, data), Error);
  CHECK_THROWS_AS(read_snapshot((dir / "missing.bin").string()), Error);
}

TEST_CASE("sha256 of a known file") {
  fs::path dir = scratch("sha");
  fs::create_directories(dir);
  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  CHECK(sha256_file((dir / "abc.txt").string()) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("phase diagram output and manifest") {
  fs::path dir = scratch("phase");
  RunConfig cfg = parse_config(
      "[run]\nexperiment = phase-diagram\n[grid]\nextent = 16\ncells = 64\n[potential]\nradius = 1\namplitude = 0.25\n"
      "[physics]\nrho = 2\n[phase]\npoints = 11\nt_min = 0.1\nt_max = 1.1\n");
  RunManifest m = run_experiment(cfg, dir.string(), 0, 1);
  std::istringstream csv(slurp(dir / "phase_diagram.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "T,phi_star,T_over_Tc");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 11);
  REQUIRE(fs::exists(dir / "manifest.json"));
  CHECK(m.experiment == "phase-diagram");
  CHECK(m.summary.at("T_c") == doctest::Approx(0.5));
  for (const auto& f : m.files) {
    CHECK(fs::exists(dir / f.path));
    CHECK(sha256_file((dir / f.path).string()) == f.sha256);
    CHECK(fs::file_size(dir / f.path) == f.bytes);
  }
  CHECK(contains(slurp(dir / "manifest.json"), "\"phase_diagram.csv\""));
}

TEST_CASE("outputs are byte-identical across reruns and thread counts") {
  RunConfig cfg = parse_config(kSmallKinetic);
  RunManifest a = run_experiment(cfg, scratch("det1").string(), 3, 1);
  RunManifest b = run_experiment(cfg, scratch("det8").string(), 3, 8);
  RunManifest c = run_experiment(cfg, scratch("det1b").string(), 3, 1);
  set_num_threads(1);
  REQUIRE(a.files.size() == b.files.size());
  REQUIRE(a.files.size() > 3);
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].path == b.files[i].path);
    CHECK(a.files[i].sha256 == b.files[i].sha256);
    CHECK(a.files[i].sha256 == c.files[i].sha256);
  }
  RunManifest other = run_experiment(cfg, scratch("det_seed").string(), 4, 1);
  bool differs = false;
  for (std::size_t i = 0; i < a.files.size(); ++i) differs = differs || a.files[i].sha256 != other.files[i].sha256;
  CHECK(differs);
}

TEST_CASE("validate writes one row per property") {
  fs::path dir = scratch("validate");
  RunManifest m = run_experiment(parse_config("", "validate"), dir.string(), 0, 1);
  std::istringstream csv(slurp(dir / "validate.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "property,passed,value,tolerance,detail");
  int rows = 0, passed = 0;
  while (std::getline(csv, line)) {
    ++rows;
    if (contains(line, ",1,")) ++passed;
  }
  CHECK(rows >= 15);
  CHECK(passed == rows);
  CHECK(m.summary.at("failed") == 0.0);
}
