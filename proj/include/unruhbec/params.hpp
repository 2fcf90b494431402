#pragma once

#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace unruhbec {

/// Physical parameters of a scenario in natural units (hbar = k_B = 1).
///
/// The natural unit system is fixed by c_s = 1 and omega_d = 1 once a
/// scenario is converted from SI; internally nothing assumes those values.
struct PhysicalParams {
  double c_s = 1.0;      // speed of sound
  double a = 2.0;        // proper acceleration
  double m = 1.0e6;      // atom mass, sets k_c = m c_s
  double omega_d = 1.0;  // detector gap
  double delta = 1.0;    // detuning used as the detector oscillator frequency
  double g = 0.02;       // coupling strength (per-mode normalization applied by the engine)
  double gamma = 0.0;    // switching time scale
  double L = 1.0;        // system size
  std::size_t N = 20;    // number of phonon modes (1D)
  std::size_t n_reps = 1;
  double T_pass = 1.0;   // per-pass acceleration duration
  double T_bec = 0.0;    // initial phonon bath temperature, 0 = vacuum

  double k_c() const { return m * c_s; }
  double omega_c() const { return c_s * k_c(); }

  /// Throws std::domain_error naming the first violated invariant.
  void validate() const;
};

/// a / (2 pi c_s).
double unruh_temperature(double a, double c_s);

struct AdiabaticityResult {
  bool ok;
  double lhs;  // a^2 / (omega_trap^2 c_s), a length
};

/// ok iff lhs <= x0 / margin.
AdiabaticityResult adiabaticity_check(double a, double omega_trap, double c_s, double x0,
                                      double margin = 10.0);

namespace si {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B = 1.380649e-23;      // J / K

/// hbar a / (2 pi c k_B) in kelvin.
double unruh_temperature_kelvin(double a, double c_s);
}  // namespace si

/// SI-valued scenario parameters. Frequencies are angular (rad/s).
struct SIParams {
  double c_s;         // m/s
  double a;           // m/s^2
  double m;           // kg
  double omega_d;     // rad/s
  double delta;       // rad/s
  double g;           // rad/s
  double gamma;       // s
  double L;           // m
  std::size_t N;
  std::size_t n_reps;
  double T_pass;      // s
  double T_bec;       // K
};

/// Unit scales of the natural system built on c_s and omega_d.
struct UnitSystem {
  double time;    // s
  double length;  // m
  double energy;  // J  (hbar omega_d)
};

UnitSystem natural_units_for(double c_s, double omega_d);

/// Rescales so that c_s = 1 and omega_d = 1.
PhysicalParams si_to_natural(const SIParams& p);

/// Inverse of si_to_natural given the unit-defining SI values of c_s and omega_d.
SIParams natural_to_si(const PhysicalParams& p, double c_s_si, double omega_d_si);

}  // namespace unruhbec
