#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "segrekin/segrekin.h"

int main(int argc, char** argv) {
  CLI::App app{"segrekin: two-species Vlasov-Boltzmann toolkit with Kac interaction"};
  app.set_version_flag("--version", std::string(segrekin_version()));
  std::string experiment, config, out = "out";
  std::uint64_t seed = 0;
  int threads = 0;
  bool echo = false;
  app.add_option("experiment", experiment, "phase-diagram | interface | kinetic-run | hydro-run | ins-run | transport | validate")
      ->required()
      ->check(CLI::IsMember({"phase-diagram", "interface", "kinetic-run", "hydro-run", "ins-run", "transport", "validate"}));
  app.add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides run.seed)");
  app.add_option("--threads", threads, "worker threads (default: SEGREKIN_THREADS or 1)")->check(CLI::PositiveNumber);
  app.add_flag("--echo-config", echo, "print the resolved configuration and exit");
  CLI11_PARSE(app, argc, argv);

  segrekin_config* cfg = nullptr;
  int rc = segrekin_config_load(config.c_str(), experiment.c_str(), &cfg);
  if (rc != SEGREKIN_OK) {
    std::fprintf(stderr, "error [%s]: %s\n", segrekin_status_name(rc), segrekin_last_error());
    return 2;
  }
  if (echo) {
    std::fputs(segrekin_config_echo(cfg), stdout);
    segrekin_config_free(cfg);
    return 0;
  }
  segrekin_manifest* man = nullptr;
  rc = segrekin_run(cfg, out.c_str(), *seed_opt ? &seed : nullptr, threads, &man);
  segrekin_config_free(cfg);
  if (rc != SEGREKIN_OK) {
    std::fprintf(stderr, "error [%s]: %s\n", segrekin_status_name(rc), segrekin_last_error());
    return 10 + rc;
  }
  std::printf("%s: wrote %zu files to %s\n", experiment.c_str(), segrekin_manifest_file_count(man), out.c_str());
  segrekin_manifest_free(man);
  return 0;
}
