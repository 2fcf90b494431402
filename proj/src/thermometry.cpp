#include "unruhbec/thermometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace unruhbec {

double temperature_from_occupation(double nbar, double omega_d) {
  if (nbar < 0) throw std::domain_error("temperature_from_occupation: negative occupation");
  if (nbar == 0) return 0.0;
  return omega_d / std::log1p(1.0 / nbar);
}

double occupation_from_temperature(double T, double omega_d) {
  if (T < 0) throw std::domain_error("occupation_from_temperature: negative temperature");
  if (T == 0) return 0.0;
  return 1.0 / std::expm1(omega_d / T);
}

SteadyState steady_state(const std::vector<SeriesPoint>& series, double window_fraction, double rel_trend_tol) {
  if (series.size() < 10) throw std::invalid_argument("steady_state: need at least 10 points");
  if (!(window_fraction > 0 && window_fraction <= 1)) throw std::invalid_argument("steady_state: bad window fraction");
  const std::size_t n = series.size();
  const std::size_t len = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(window_fraction * n)));
  const std::size_t begin = n - len;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = begin; i < n; ++i) {
    sx += series[i].x;
    sy += series[i].value;
    sxx += series[i].x * series[i].x;
    sxy += series[i].x * series[i].value;
  }
  const double m = static_cast<double>(len);
  const double mean = sy / m;
  const double den = m * sxx - sx * sx;
  const double slope = den > 0 ? (m * sxy - sx * sy) / den : 0.0;
  const double trend = mean != 0 ? std::abs(slope * 10.0 / mean) : std::abs(slope * 10.0);
  return {mean, trend < rel_trend_tol, trend, begin};
}

ThermalityVerdict thermality_scan(const std::vector<GapTemperature>& scan, double threshold) {
  if (scan.size() < 3) throw std::invalid_argument("thermality_scan: need at least 3 gap values");
  double lo = scan.front().T, hi = lo, sum = 0;
  for (const auto& p : scan) {
    lo = std::min(lo, p.T);
    hi = std::max(hi, p.T);
    sum += p.T;
  }
  const double mean = sum / static_cast<double>(scan.size());
  const double spread = mean > 0 ? (hi - lo) / mean : 0.0;
  return {mean, spread, spread <= threshold};
}

double oscillation_metric(const std::vector<SeriesPoint>& series, std::size_t begin) {
  if (begin >= series.size()) throw std::invalid_argument("oscillation_metric: empty window");
  double sum = 0;
  for (std::size_t i = begin; i < series.size(); ++i) sum += series[i].value;
  const double n = static_cast<double>(series.size() - begin);
  const double mean = sum / n;
  double ss = 0;
  for (std::size_t i = begin; i < series.size(); ++i) ss += (series[i].value - mean) * (series[i].value - mean);
  return mean != 0 ? std::sqrt(ss / n) / std::abs(mean) : 0.0;
}

}  // namespace unruhbec
