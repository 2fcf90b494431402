#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace unruhbec {

/// Plane-wave phonon mode of a uniform condensate.
struct Mode {
  std::array<double, 2> k{0.0, 0.0};  // wavevector; k[1] is 0 in 1D
  double omega = 0.0;
  double u = 1.0;
  double v = 1.0;

  double k_norm() const;
};

enum class Dispersion {
  /// omega = c_s |k|, u = v = 1: the ideal field with k_c -> infinity.
  linear,
  /// Full Bogoliubov dispersion and coefficients with k_c = m c_s.
  bogoliubov,
};

struct ModeSet {
  std::vector<Mode> modes;
  double L = 1.0;
  int dimension = 1;
  double k_c = 0.0;  // infinity for Dispersion::linear
  Dispersion dispersion = Dispersion::linear;

  std::size_t size() const { return modes.size(); }
  double max_omega() const;
};

/// sqrt((c_s k)^2 + (k^2 / 2m)^2).
double dispersion(double k, double c_s, double m);

struct BogoliubovCoefficients {
  double u;
  double v;
};

/// Positive-sign u_k, v_k of a uniform condensate. Throws for k <= 0.
BogoliubovCoefficients bogoliubov_coefficients(double k, double c_s, double m);

/// c_s k - omega_k. Never positive.
double gap_correction(double k, double c_s, double m);

/// Smallest k > 0 with omega(k) - c_s k = omega_d, if it is below k_max.
/// Beyond that wavevector the co-moving mode resonates with the detector gap.
std::optional<double> divergence_wavevector(double omega_d, double c_s, double m, double k_max);

struct GridSpec {
  int dimension = 1;
  double L = 1.0;
  std::size_t N = 20;   // 1D: total mode count, even
  double k_max = 1.0;   // 2D: shell radius
  double k_min = 0.0;   // 2D: optional inner radius of the shell
  Dispersion dispersion = Dispersion::linear;
};

/// Periodic-box grid k = 2 pi n / L with the zero mode excluded.
/// Modes are sorted by |k| and then by component.
ModeSet mode_grid(const GridSpec& spec, double c_s, double m);

}  // namespace unruhbec
