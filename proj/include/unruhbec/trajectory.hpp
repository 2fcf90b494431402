#pragma once

#include <array>
#include <functional>

namespace unruhbec {

using Vec2 = std::array<double, 2>;

// Closed-form worldlines. Positions are along x unless stated otherwise.

/// c_s t + (c_s^2 / a) exp(-a t / c_s).
double effective_unruh_position(double t, double a, double c_s);
/// c_s (1 - exp(-a t / c_s)).
double effective_unruh_velocity(double t, double a, double c_s);

/// c sqrt(t^2 + c^2 / a^2).
double relativistic_position(double t, double a, double c);
double relativistic_velocity(double t, double a, double c);

/// |x_eff(t) - x_rel(t)| with c = c_s.
double trajectory_deviation(double t, double a, double c_s);

Vec2 circular_position(double t, double R, double omega_rot);
Vec2 circular_velocity(double t, double R, double omega_rot);

/// (c_s / a) / sqrt(t^2 + c_s^2 / a^2); equals 1 at t = 0.
double proper_time_rate(double t, double a, double c_s);

struct SaddlePoint {
  double center;
  double half_width;
};

/// Time at which a mode of frequency omega dominates the accelerated-detector
/// amplitude, (c_s / a) ln(omega / omega_d), with half-width 1 / sqrt(omega_d a).
SaddlePoint saddle_point_time(double omega, double omega_d, double a, double c_s);

enum class TrajectoryKind { uniform, effective_unruh, relativistic, circular, custom };

/// Detector worldline in the plane. One-dimensional kinds move along x.
struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::effective_unruh;
  double c_s = 1.0;
  double v = 0.0;          // uniform
  double a = 1.0;          // effective_unruh, relativistic
  double R = 1.0;          // circular
  double omega_rot = 1.0;  // circular
  Vec2 origin{0.0, 0.0};   // rigid offset added to every position
  double direction = 1.0;  // +1 or -1; -1 mirrors the motion through origin
  /// Accelerated kinds sit at rest at their t = 0 position for t < 0.
  bool hold_before_start = true;

  std::function<Vec2(double)> custom_position;
  std::function<Vec2(double)> custom_velocity;

  Vec2 position(double t) const;
  Vec2 velocity(double t) const;
  /// Speed along the direction of motion, signed for 1D kinds.
  double speed(double t) const;

  static Trajectory uniform(double v, double c_s = 1.0);
  static Trajectory effective_unruh(double a, double c_s = 1.0);
  static Trajectory relativistic(double a, double c_s = 1.0);
  static Trajectory circular(double R, double omega_rot, double c_s = 1.0);
};

/// omega0 (1 - speed(t) / c_s) for a mode running against the detector motion.
double doppler_shift(const Trajectory& traj, double omega0, double t);

}  // namespace unruhbec
