#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "unruhbec/bogoliubov.hpp"
#include "unruhbec/gaussian.hpp"
#include "unruhbec/params.hpp"
#include "unruhbec/trajectory.hpp"

namespace unruhbec {

/// Malformed text (line > 0) or a violated precondition (line == 0).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0) : std::runtime_error(what), line(line) {}
  std::size_t line;
};

/// One `key = value` line of a section.
struct ConfigEntry {
  std::string value;
  std::size_t line = 0;
};

/// Parsed but unvalidated text: section -> key -> entry. Keys outside any
/// section are rejected.
using RawConfig = std::map<std::string, std::map<std::string, ConfigEntry>>;

RawConfig parse_ini(const std::string& text);

enum class RunMode {
  /// Repeated passes through the coupling window; one record per pass.
  passes,
  /// A single long coupling interval sampled at evenly spaced times.
  time_series,
};

enum class DetectorInit { vacuum, thermal };

struct ModesConfig {
  GridSpec grid;
};

struct ScheduleConfig {
  double gamma_on = 0.0;
  double gamma_off = 0.0;
  double plateau_start = 0.0;
  double plateau_length = 1.0;
  MeanField mean_field = MeanField::cancelled;
  double drive = 0.0;
  Modulation modulation = Modulation::constant;
};

struct ProtocolConfig {
  RunMode mode = RunMode::passes;
  std::size_t n_reps = 1;
  FieldReset field_reset = FieldReset::vacuum;
  DetectorInit detector_init = DetectorInit::vacuum;
  double T0 = 0.0;
  bool mirror_return = false;
  bool exclude_displacement = false;
  double steady_fraction = 0.2;
  // time_series only
  double t_max = 0.0;
  std::size_t samples = 0;
  double metric_from = 0.5;  // fraction of the series skipped by the oscillation metric
};

struct IntegratorConfig {
  double dt = 0.0;  // 0 = engine default
  bool error_estimate = true;
};

struct OutputsConfig {
  std::string directory = ".";
  std::string name = "run";
  bool dat = true;
  bool csv = true;
};

struct SweepConfig {
  std::string parameter;  // "section.key"
  std::vector<std::string> values;
};

/// Fully validated scenario with every default filled in. `raw` keeps the
/// effective key set (defaults included) so the scenario can be re-emitted,
/// hashed and varied along a sweep axis.
struct ScenarioConfig {
  PhysicalParams params;
  ModesConfig modes;
  Trajectory trajectory;
  ScheduleConfig schedule;
  ProtocolConfig protocol;
  IntegratorConfig integrator;
  OutputsConfig outputs;
  std::optional<SweepConfig> sweep;
  RawConfig raw;

  /// Canonical text: sorted sections and keys, defaults included.
  std::string canonical_text() const;
  /// FNV-1a 64 of the canonical text with [outputs] and [sweep] removed, as hex.
  std::string hash() const;

  ModeSet build_modes() const;
  DetectorFieldSystem build_system() const;
};

/// Parses and validates. Throws ConfigError.
ScenarioConfig load_config_text(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);
/// Validates an already parsed key set, filling defaults.
ScenarioConfig load_config(const RawConfig& raw);

/// Copy of `base` with one "section.key" replaced, re-validated. A bare key
/// is accepted when it names exactly one known key.
ScenarioConfig with_override(const ScenarioConfig& base, const std::string& parameter, const std::string& value);

/// "1, 3, 7" or "start:stop:count" (inclusive, evenly spaced).
std::vector<std::string> parse_value_list(const std::string& text);

/// Resolves a possibly bare key to "section.key".
std::string qualify_key(const std::string& key);

}  // namespace unruhbec
