#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace unruhbec {

/// Switching function of the detector coupling: zero outside [t0, t1], one on
/// the plateau, and sin^2 ramps at both ends (a zero width is an abrupt
/// switch). The ramps default to the same width gamma.
struct SwitchingWindow {
  double t0 = 0.0;
  double t1 = 1.0;
  double gamma_on = 0.0;
  double gamma_off = 0.0;

  SwitchingWindow() = default;
  SwitchingWindow(double start, double end, double ramp) : SwitchingWindow(start, end, ramp, ramp) {}
  SwitchingWindow(double start, double end, double ramp_on, double ramp_off)
      : t0(start), t1(end), gamma_on(ramp_on), gamma_off(ramp_off) {
    if (!(t1 > t0)) throw std::domain_error("SwitchingWindow: need t0 < t1");
    if (gamma_on < 0 || gamma_off < 0 || gamma_on + gamma_off > t1 - t0)
      throw std::domain_error("SwitchingWindow: ramps must be non-negative and fit inside the window");
  }

  /// Window with a plateau [plateau_start, plateau_end] and ramps outside it.
  static SwitchingWindow around_plateau(double plateau_start, double plateau_end, double ramp_on,
                                        double ramp_off) {
    return SwitchingWindow(plateau_start - ramp_on, plateau_end + ramp_off, ramp_on, ramp_off);
  }
  static SwitchingWindow around_plateau(double plateau_start, double plateau_end, double ramp) {
    return around_plateau(plateau_start, plateau_end, ramp, ramp);
  }

  double operator()(double t) const {
    if (t < t0 || t > t1) return 0.0;
    if (gamma_on > 0 && t < t0 + gamma_on) {
      const double s = std::sin(0.5 * std::numbers::pi * (t - t0) / gamma_on);
      return s * s;
    }
    if (gamma_off > 0 && t > t1 - gamma_off) {
      const double s = std::sin(0.5 * std::numbers::pi * (t1 - t) / gamma_off);
      return s * s;
    }
    return 1.0;
  }

  double length() const { return t1 - t0; }
  double plateau_start() const { return t0 + gamma_on; }
  double plateau_end() const { return t1 - gamma_off; }
};

}  // namespace unruhbec
