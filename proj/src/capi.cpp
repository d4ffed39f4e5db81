#include "segrekin/segrekin.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "json.hpp"
#include "segrekin/app.hpp"
#include "segrekin/equilibrium.hpp"
#include "segrekin/error.hpp"
#include "segrekin/hydro.hpp"
#include "segrekin/kac.hpp"
#include "segrekin/parallel.hpp"

struct segrekin_config {
  segrekin::RunConfig cfg;
  std::string echo;
  std::string experiment;
};

struct segrekin_manifest {
  segrekin::RunManifest m;
  std::string json;
};

struct segrekin_kernel {
  segrekin::KacKernel k;
};

namespace {

thread_local std::string t_last_error;

int fail(segrekin::ErrorCode code, const std::string& msg) {
  t_last_error = msg;
  return static_cast<int>(code);
}

template <class F>
int guarded(F&& body) {
  t_last_error.clear();
  try {
    body();
    return SEGREKIN_OK;
  } catch (const segrekin::Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return fail(segrekin::ErrorCode::Internal, "out of memory");
  } catch (const std::exception& e) {
    return fail(segrekin::ErrorCode::Internal, e.what());
  }
}

int null_arg(const char* what) { return fail(segrekin::ErrorCode::InvalidArgument, std::string(what) + " is null"); }

void write_error_record(const char* out_dir, int code, const std::string& msg) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::ofstream f(std::filesystem::path(out_dir) / "error.json", std::ios::binary | std::ios::trunc);
  if (!f) return;
  nlohmann::ordered_json j;
  j["code"] = code;
  j["name"] = segrekin_status_name(code);
  j["message"] = msg;
  f << j.dump(2) << "\n";
}

}  // namespace

extern "C" {

const char* segrekin_version(void) { return SEGREKIN_VERSION; }

const char* segrekin_status_name(int status) {
  if (status < 0 || status > SEGREKIN_INTERNAL) return "unknown";
  return segrekin::error_code_name(static_cast<segrekin::ErrorCode>(status));
}

const char* segrekin_last_error(void) { return t_last_error.c_str(); }

int segrekin_set_threads(int threads) {
  return guarded([&] {
    if (threads < 1) throw segrekin::Error(segrekin::ErrorCode::InvalidArgument, "thread count must be positive");
    segrekin::set_num_threads(threads);
  });
}

int segrekin_get_threads(void) { return segrekin::num_threads(); }

int segrekin_config_parse(const char* text, const char* experiment, segrekin_config** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<segrekin_config>();
    c->cfg = segrekin::parse_config(text, experiment ? experiment : "");
    c->echo = c->cfg.echo();
    c->experiment = segrekin::experiment_name(c->cfg.experiment);
    *out = c.release();
  });
}

int segrekin_config_load(const char* path, const char* experiment, segrekin_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<segrekin_config>();
    c->cfg = segrekin::load_config(path, experiment ? experiment : "");
    c->echo = c->cfg.echo();
    c->experiment = segrekin::experiment_name(c->cfg.experiment);
    *out = c.release();
  });
}

const char* segrekin_config_echo(const segrekin_config* cfg) { return cfg ? cfg->echo.c_str() : ""; }

const char* segrekin_config_experiment(const segrekin_config* cfg) { return cfg ? cfg->experiment.c_str() : ""; }

int segrekin_config_get(const segrekin_config* cfg, const char* key, const char** value) {
  if (!cfg) return null_arg("cfg");
  if (!key) return null_arg("key");
  if (!value) return null_arg("value");
  return guarded([&] { *value = cfg->cfg.str(key).c_str(); });
}

void segrekin_config_free(segrekin_config* cfg) { delete cfg; }

int segrekin_run(const segrekin_config* cfg, const char* out_dir, const uint64_t* seed, int threads,
                 segrekin_manifest** out) {
  if (!cfg) return null_arg("cfg");
  if (!out_dir) return null_arg("out_dir");
  if (out) *out = nullptr;
  int rc = guarded([&] {
    std::uint64_t s = seed ? *seed : static_cast<std::uint64_t>(cfg->cfg.integer("run.seed"));
    auto m = std::make_unique<segrekin_manifest>();
    m->m = segrekin::run_experiment(cfg->cfg, out_dir, s, threads);
    m->json = m->m.to_json();
    if (out) *out = m.release();
  });
  if (rc != SEGREKIN_OK) write_error_record(out_dir, rc, t_last_error);
  return rc;
}

const char* segrekin_manifest_json(const segrekin_manifest* m) { return m ? m->json.c_str() : ""; }

size_t segrekin_manifest_file_count(const segrekin_manifest* m) { return m ? m->m.files.size() : 0; }

const char* segrekin_manifest_file_path(const segrekin_manifest* m, size_t i) {
  return m && i < m->m.files.size() ? m->m.files[i].path.c_str() : nullptr;
}

const char* segrekin_manifest_file_sha256(const segrekin_manifest* m, size_t i) {
  return m && i < m->m.files.size() ? m->m.files[i].sha256.c_str() : nullptr;
}

int segrekin_manifest_summary(const segrekin_manifest* m, const char* key, double* value) {
  if (!m) return null_arg("manifest");
  if (!key) return null_arg("key");
  if (!value) return null_arg("value");
  auto it = m->m.summary.find(key);
  if (it == m->m.summary.end())
    return fail(segrekin::ErrorCode::InvalidArgument, std::string("manifest has no summary entry '") + key + "'");
  *value = it->second;
  return SEGREKIN_OK;
}

void segrekin_manifest_free(segrekin_manifest* m) { delete m; }

int segrekin_kernel_create(const char* shape, double radius, double width, double amplitude, int dim,
                           const double* extent, const int* cells, segrekin_kernel** out) {
  if (!shape) return null_arg("shape");
  if (!extent) return null_arg("extent");
  if (!cells) return null_arg("cells");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    segrekin::PotentialSpec ps;
    ps.shape = segrekin::parse_shape(shape);
    ps.radius = radius;
    ps.width = width;
    ps.amplitude = amplitude;
    auto g = segrekin::make_spatial_grid(dim, {extent[0], dim == 2 ? extent[1] : 1.0},
                                         {cells[0], dim == 2 ? cells[1] : 1});
    *out = new segrekin_kernel{segrekin::tabulate_kernel(ps, g)};
  });
}

int segrekin_kernel_uhat0(const segrekin_kernel* k, double* out) {
  if (!k) return null_arg("kernel");
  if (!out) return null_arg("out");
  *out = k->k.uhat0;
  return SEGREKIN_OK;
}

int segrekin_critical_temperature(const segrekin_kernel* k, double rho, double* out) {
  if (!k) return null_arg("kernel");
  if (!out) return null_arg("out");
  return guarded([&] { *out = segrekin::critical_temperature(rho, k->k); });
}

int segrekin_coexistence(const segrekin_kernel* k, double T, double rho, double* phi_star) {
  if (!k) return null_arg("kernel");
  if (!phi_star) return null_arg("phi_star");
  return guarded([&] { *phi_star = segrekin::coexistence_order_parameter(T, rho, k->k); });
}

int segrekin_dispersion_rate(const segrekin_kernel* k, long m0, long m1, double rho_bar, double T_bar, double D_diff,
                             double* out) {
  if (!k) return null_arg("kernel");
  if (!out) return null_arg("out");
  return guarded([&] { *out = segrekin::dispersion_growth_rate(m0, m1, rho_bar, T_bar, D_diff, k->k); });
}

void segrekin_kernel_free(segrekin_kernel* k) { delete k; }

int segrekin_snapshot_write(const char* path, uint32_t rank, const uint64_t* dims, const double* data) {
  if (!path) return null_arg("path");
  if (rank && !dims) return null_arg("dims");
  return guarded([&] {
    std::vector<std::uint64_t> d(dims, dims + rank);
    std::uint64_t n = 1;
    for (auto v : d) n *= v;
    if (n && !data) throw segrekin::Error(segrekin::ErrorCode::InvalidArgument, "data is null");
    segrekin::write_snapshot(path, d, std::vector<double>(data, data + n));
  });
}

int segrekin_snapshot_read(const char* path, uint32_t* rank, uint64_t dims[16], double** data) {
  if (!path) return null_arg("path");
  if (!rank || !dims || !data) return null_arg("output pointer");
  *data = nullptr;
  return guarded([&] {
    auto s = segrekin::read_snapshot(path);
    auto* buf = static_cast<double*>(std::malloc(std::max<std::size_t>(1, s.data.size()) * sizeof(double)));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, s.data.data(), s.data.size() * sizeof(double));
    *rank = static_cast<uint32_t>(s.dims.size());
    for (std::size_t i = 0; i < s.dims.size(); ++i) dims[i] = s.dims[i];
    *data = buf;
  });
}

void segrekin_free(void* p) { std::free(p); }

}  // extern "C"
