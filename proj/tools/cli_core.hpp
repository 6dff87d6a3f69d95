#pragma once

// Run configuration, artifact writers and subcommands for the openkz batch CLI.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "openkz/observables.hpp"
#include "openkz/validation.hpp"

namespace openkz::cli {

inline constexpr const char* kArtifactVersion = "1.0.0";

enum ExitCode : int { ok = 0, config_error = 2, numerical_failure = 3, validation_failure = 4 };

/// Field-level configuration failure.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LiouvillianScan {
  Momentum q;
  double u_min = -3.0;
  double u_max = 3.0;
  int points = 121;
};

struct RunConfig {
  std::string name = "run";
  QuenchSetup setup;
  std::vector<double> sweep;
  std::vector<std::string> fit_observables{"N_total", "n"};
  LiouvillianScan scan;
  std::string out_dir = ".";
  nlohmann::json source;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  nlohmann::json to_json() const;
};

struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<int> workers;
  std::optional<std::string> variant;
  std::optional<int> grid;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path, const Overrides& overrides);
void apply_overrides(RunConfig& cfg, const Overrides& overrides);

/// Decimal with 17 significant digits.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string render() const;
};

std::string sha256_hex(const std::string& bytes);

/// Collects emitted files and phase timings, then writes <name>.manifest.json.
class ManifestWriter {
 public:
  ManifestWriter(const RunConfig& cfg, std::string command);

  void write_file(const std::string& filename, const std::string& contents);
  void phase(const std::string& name, double seconds);
  void note(const std::string& key, nlohmann::json value);
  std::string finish();

 private:
  const RunConfig& cfg_;
  std::string command_;
  double started_;
  nlohmann::json files_ = nlohmann::json::array();
  nlohmann::json phases_ = nlohmann::json::object();
  nlohmann::json extra_ = nlohmann::json::object();
};

int cmd_quench(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
int cmd_liouvillian(const RunConfig& cfg);
int cmd_validate(ValidationLevel level, const std::string& out_dir, int workers,
                 const RhsFunction& rhs = openkz::rhs);

nlohmann::json report_to_json(const ValidationReport& report, ValidationLevel level);

/// Sweep table including closed-form prediction columns where a prediction applies.
CsvTable sweep_table(const RunConfig& cfg, const ObservableSeries& series);
CsvTable quench_table(const RunConfig& cfg, const ObservableSeries& series);

}  // namespace openkz::cli
