#pragma once

#include <cstddef>
#include <vector>

namespace unruhbec {

/// Planck temperature omega_d / ln(1 + 1/nbar) of an oscillator with the
/// given occupation; 0 for nbar = 0. Throws for negative nbar.
double temperature_from_occupation(double nbar, double omega_d);

/// Inverse of temperature_from_occupation.
double occupation_from_temperature(double T, double omega_d);

struct SeriesPoint {
  double x;  // pass index or time
  double value;
};

struct SteadyState {
  double value;
  bool converged;
  double trend_per_10;  // fitted change over 10 x-units, relative to value
  std::size_t window_begin;
};

/// Mean over the trailing window_fraction of the series. Converged iff the
/// least-squares trend over that window changes the value by less than
/// rel_trend_tol per 10 x-units.
SteadyState steady_state(const std::vector<SeriesPoint>& series, double window_fraction = 0.2,
                         double rel_trend_tol = 0.01);

struct ThermalityVerdict {
  double mean_T;
  double relative_spread;  // (max - min) / mean
  bool thermal;
};

struct GapTemperature {
  double omega_d;
  double T;
};

ThermalityVerdict thermality_scan(const std::vector<GapTemperature>& scan, double threshold = 0.05);

/// RMS deviation divided by mean over the samples from index `begin` on.
double oscillation_metric(const std::vector<SeriesPoint>& series, std::size_t begin = 0);

}  // namespace unruhbec
