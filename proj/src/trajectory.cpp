#include "unruhbec/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace unruhbec {

double effective_unruh_position(double t, double a, double c_s) {
  return c_s * t + (c_s * c_s / a) * std::exp(-a * t / c_s);
}

double effective_unruh_velocity(double t, double a, double c_s) {
  return -c_s * std::expm1(-a * t / c_s);
}

double relativistic_position(double t, double a, double c) {
  return c * std::sqrt(t * t + c * c / (a * a));
}

double relativistic_velocity(double t, double a, double c) {
  return c * t / std::sqrt(t * t + c * c / (a * a));
}

double trajectory_deviation(double t, double a, double c_s) {
  if (!(a > 0)) throw std::domain_error("trajectory_deviation: a must be positive");
  const double s = a * t / c_s;
  const double scale = c_s * c_s / a;
  // x_eff - x_rel = scale * (s + e^{-s} - sqrt(1 + s^2)); both pieces cancel at
  // the origin, so evaluate the difference in a cancellation-safe way.
  const double eff = s + std::exp(-s) - 1.0;             // s^2/2 - s^3/6 + ...
  const double rel = s * s / (1.0 + std::sqrt(1.0 + s * s));  // sqrt(1+s^2) - 1
  double d = eff - rel;
  if (std::abs(s) < 1e-2) {
    // eff - rel = -s^3/6 + s^4/24 + s^4/8 + O(s^5)
    d = -s * s * s / 6.0 + s * s * s * s / 6.0 - s * s * s * s * s / 120.0;
  }
  return std::abs(scale * d);
}

Vec2 circular_position(double t, double R, double omega_rot) {
  if (!(R > 0)) throw std::domain_error("circular_position: R must be positive");
  return {R * std::cos(omega_rot * t), R * std::sin(omega_rot * t)};
}

Vec2 circular_velocity(double t, double R, double omega_rot) {
  return {-R * omega_rot * std::sin(omega_rot * t), R * omega_rot * std::cos(omega_rot * t)};
}

double proper_time_rate(double t, double a, double c_s) {
  if (!(a > 0)) throw std::domain_error("proper_time_rate: a must be positive");
  const double t0 = c_s / a;
  return t0 / std::sqrt(t * t + t0 * t0);
}

SaddlePoint saddle_point_time(double omega, double omega_d, double a, double c_s) {
  if (!(omega > 0) || !(omega_d > 0) || !(a > 0))
    throw std::domain_error("saddle_point_time: frequencies and a must be positive");
  return {(c_s / a) * std::log(omega / omega_d), 1.0 / std::sqrt(omega_d * a)};
}

Vec2 Trajectory::position(double t) const {
  Vec2 p{0.0, 0.0};
  switch (kind) {
    case TrajectoryKind::uniform:
      p[0] = v * t;
      break;
    case TrajectoryKind::effective_unruh:
      p[0] = effective_unruh_position(hold_before_start ? std::max(t, 0.0) : t, a, c_s);
      break;
    case TrajectoryKind::relativistic:
      p[0] = relativistic_position(hold_before_start ? std::max(t, 0.0) : t, a, c_s);
      break;
    case TrajectoryKind::circular:
      p = circular_position(t, R, omega_rot);
      break;
    case TrajectoryKind::custom:
      if (!custom_position) throw std::logic_error("custom trajectory without position function");
      p = custom_position(t);
      break;
  }
  return {origin[0] + direction * p[0], origin[1] + direction * p[1]};
}

Vec2 Trajectory::velocity(double t) const {
  Vec2 u{0.0, 0.0};
  switch (kind) {
    case TrajectoryKind::uniform:
      u[0] = v;
      break;
    case TrajectoryKind::effective_unruh:
      u[0] = (hold_before_start && t < 0) ? 0.0 : effective_unruh_velocity(t, a, c_s);
      break;
    case TrajectoryKind::relativistic:
      u[0] = (hold_before_start && t < 0) ? 0.0 : relativistic_velocity(t, a, c_s);
      break;
    case TrajectoryKind::circular:
      u = circular_velocity(t, R, omega_rot);
      break;
    case TrajectoryKind::custom:
      if (!custom_velocity) throw std::logic_error("custom trajectory without velocity function");
      u = custom_velocity(t);
      break;
  }
  return {direction * u[0], direction * u[1]};
}

double Trajectory::speed(double t) const {
  const Vec2 u = velocity(t);
  if (kind == TrajectoryKind::circular || kind == TrajectoryKind::custom) return std::hypot(u[0], u[1]);
  return direction * u[0];
}

Trajectory Trajectory::uniform(double v, double c_s) {
  Trajectory t;
  t.kind = TrajectoryKind::uniform;
  t.v = v;
  t.c_s = c_s;
  return t;
}

Trajectory Trajectory::effective_unruh(double a, double c_s) {
  if (!(a > 0)) throw std::domain_error("effective_unruh trajectory needs a > 0");
  Trajectory t;
  t.kind = TrajectoryKind::effective_unruh;
  t.a = a;
  t.c_s = c_s;
  return t;
}

Trajectory Trajectory::relativistic(double a, double c_s) {
  if (!(a > 0)) throw std::domain_error("relativistic trajectory needs a > 0");
  Trajectory t;
  t.kind = TrajectoryKind::relativistic;
  t.a = a;
  t.c_s = c_s;
  t.hold_before_start = false;
  return t;
}

Trajectory Trajectory::circular(double R, double omega_rot, double c_s) {
  if (!(R > 0)) throw std::domain_error("circular trajectory needs R > 0");
  Trajectory t;
  t.kind = TrajectoryKind::circular;
  t.R = R;
  t.omega_rot = omega_rot;
  t.c_s = c_s;
  return t;
}

double doppler_shift(const Trajectory& traj, double omega0, double t) {
  return omega0 * (1.0 - traj.speed(t) / traj.c_s);
}

}  // namespace unruhbec
