#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "unruhbec/config.hpp"
#include "unruhbec/perturbation.hpp"

namespace unruhbec {

/// Environment variable that caps every worker pool.
inline constexpr const char* max_threads_env = "UNRUHBEC_MAX_THREADS";

/// min(requested, env cap), at least 1. 0 requests one worker per hardware thread.
std::size_t resolve_threads(std::size_t requested);

struct SeriesRow {
  double x;  // pass number or time
  double nbar;
  double T;
};

struct RunSummary {
  double T_final = std::numeric_limits<double>::quiet_NaN();
  double T_ss = std::numeric_limits<double>::quiet_NaN();
  bool ss_converged = false;
  double T_limit = std::numeric_limits<double>::quiet_NaN();  // infinitely many passes
  double oscillation = std::numeric_limits<double>::quiet_NaN();
  double T_mean_tail = std::numeric_limits<double>::quiet_NaN();  // time series: mean over the metric window
};

struct RunDiagnostics {
  /// Smallest eigenvalue of det_cov + i Omega over the recorded detector states;
  /// non-negative for a physical state.
  double min_uncertainty = std::numeric_limits<double>::quiet_NaN();
  /// Richardson estimate |n(dt) - n(2 dt)| / 15 on the first recorded interval.
  double integrator_error = std::numeric_limits<double>::quiet_NaN();
  double dt = 0.0;
  std::size_t n_modes = 0;
};

struct RunResult {
  std::string config_hash;
  std::string name;
  RunMode mode = RunMode::passes;
  std::vector<SeriesRow> series;
  RunSummary summary;
  RunDiagnostics diagnostics;
};

/// Field occupations at the start of every pass: thermal at T_bec for the
/// thermal and keep resets, vacuum otherwise.
std::vector<double> field_occupations(const ScenarioConfig& config, const ModeSet& modes);

/// Executes one scenario. `threads` only splits time-series samples.
/// Engine errors propagate (IntegrationError, AccuracyError, std::domain_error).
RunResult run(const ScenarioConfig& config, std::size_t threads = 1);

struct SweepPoint {
  std::string value;
  std::optional<RunResult> result;
  std::string error;  // set iff result is empty
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepPoint> points;
  std::size_t failures() const;
};

/// Runs every point of config.sweep on a bounded pool. Points are independent;
/// a failing point is recorded and its siblings still run. When `out_dir` is
/// given, each point is written atomically as soon as it finishes and the
/// index is merged afterwards on the calling thread.
SweepResult sweep(const ScenarioConfig& config, std::size_t threads,
                  const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Table of preformatted cells; column names carry their units.
struct Table {
  std::string title;
  std::vector<std::string> comments;  // extra header lines
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Fixed 10-significant-digit rendering used for every number written out.
std::string format_number(double v);

Table series_table(const RunResult& r);
Table sweep_table(const SweepResult& s);

struct Formats {
  bool dat = true;
  bool csv = true;
};

/// Writes <stem>.dat (whitespace columns, '#' header) and/or <stem>.csv via a
/// temporary file and a rename. Returns the files written.
std::vector<std::filesystem::path> emit_plotdata(const Table& table, const std::filesystem::path& stem,
                                                 Formats formats = {});

/// Series files of one run plus <stem>.ini holding the canonical config.
std::vector<std::filesystem::path> write_run(const RunResult& result, const ScenarioConfig& config,
                                             const std::filesystem::path& stem);

/// Text written atomically (temporary file then rename).
void write_atomic(const std::filesystem::path& path, const std::string& text);

/// Columns k, omega, u, v, gap_correction for `samples` wavevectors on (0, k_max].
Table dispersion_table(double c_s, double m, double k_max, std::size_t samples);

struct AmplitudeScan {
  std::vector<GapProbabilities> data;
  std::vector<double> analytic_exc;
  std::vector<double> analytic_deexc;
  DetailedBalanceFit fit;
};

/// First-order |A+|^2 and |A-|^2 of the accelerated detector for one mode
/// at each gap, each over its own saddle window.
AmplitudeScan amplitude_scan(double omega_k, double a, double c_s, const std::vector<double>& gaps,
                             double pad = 5.0, const QuadratureOptions& opts = {});
Table amplitude_table(const AmplitudeScan& scan, double omega_k, double a);

}  // namespace unruhbec
