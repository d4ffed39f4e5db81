#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace segrekin {

enum class Experiment { PhaseDiagram, Interface, KineticRun, HydroRun, InsRun, Transport, Validate };

const char* experiment_name(Experiment e);
Experiment parse_experiment(const std::string& name);

enum class ValueType { Number, Integer, Boolean, String };

struct ConfigKey {
  const char* key;
  ValueType type;
  const char* default_value;  // nullptr: no default
  const char* choices;        // '|' separated, nullptr for free values
  const char* help;
};

const std::vector<ConfigKey>& config_schema();

// Validated configuration: every schema key has a value (given or default).
struct RunConfig {
  Experiment experiment = Experiment::Validate;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> defaulted;

  double number(const std::string& key) const;
  long integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  const std::string& str(const std::string& key) const;
  bool was_given(const std::string& key) const;
  std::string echo() const;
};

// Flat "section.key = value" text; "[section]" headers prefix following keys.
// `experiment` fills run.experiment when the text omits it and must agree otherwise.
RunConfig parse_config(const std::string& text, const std::string& experiment = "");
RunConfig load_config(const std::string& path, const std::string& experiment = "");

struct ManifestFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct RunManifest {
  std::string tool_version;
  std::string experiment;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string started;
  std::string finished;
  std::string config_echo;
  std::vector<ManifestFile> files;
  std::map<std::string, double> summary;
  std::map<std::string, std::string> labels;

  std::string to_json() const;
};

std::string sha256_file(const std::string& path);

// Runs the configured experiment, writes outputs and manifest.json into out_dir.
// threads <= 0 keeps the current worker count.
RunManifest run_experiment(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed, int threads);
RunManifest run_experiment(const RunConfig& cfg, const std::string& out_dir);

// Flat binary snapshots.
inline constexpr char kSnapshotMagic[8] = {'S', 'G', 'R', 'K', 'S', 'N', 'A', 'P'};
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::uint8_t kDtypeF64 = 1;

struct Snapshot {
  std::vector<std::uint64_t> dims;
  std::vector<double> data;
};

void write_snapshot(const std::string& path, const std::vector<std::uint64_t>& dims, const std::vector<double>& data);
Snapshot read_snapshot(const std::string& path);

struct PropertyResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

// Reduced-size invariant suite behind the `validate` experiment.
std::vector<PropertyResult> run_validation(std::uint64_t seed);

}  // namespace segrekin
