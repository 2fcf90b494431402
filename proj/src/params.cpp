#include "unruhbec/params.hpp"

#include <cmath>
#include <string>

namespace unruhbec {

namespace {
void require(bool cond, const char* what) {
  if (!cond) throw std::domain_error(std::string("invalid parameter: ") + what);
}
}  // namespace

void PhysicalParams::validate() const {
  require(c_s > 0, "c_s > 0");
  require(a > 0, "a > 0");
  require(m > 0, "m > 0");
  require(omega_d > 0, "omega_d > 0");
  require(delta >= 0, "delta >= 0");
  require(N >= 1, "N >= 1");
  require(L > 0, "L > 0");
  require(g >= 0, "g >= 0");
  require(gamma >= 0, "gamma >= 0");
  require(T_bec >= 0, "T_bec >= 0");
  require(n_reps >= 1, "n_reps >= 1");
  require(T_pass > 0, "T_pass > 0");
}

double unruh_temperature(double a, double c_s) {
  if (!(a > 0) || !(c_s > 0)) throw std::domain_error("unruh_temperature: a and c_s must be positive");
  return a / (2.0 * std::numbers::pi * c_s);
}

AdiabaticityResult adiabaticity_check(double a, double omega_trap, double c_s, double x0,
                                      double margin) {
  if (!(a > 0) || !(omega_trap > 0) || !(c_s > 0) || !(x0 > 0) || !(margin > 0))
    throw std::domain_error("adiabaticity_check: inputs must be positive");
  const double lhs = a * a / (omega_trap * omega_trap * c_s);
  return {lhs <= x0 / margin, lhs};
}

double si::unruh_temperature_kelvin(double a, double c_s) {
  if (!(a > 0) || !(c_s > 0)) throw std::domain_error("unruh_temperature_kelvin: a and c_s must be positive");
  return hbar * a / (2.0 * std::numbers::pi * c_s * k_B);
}

UnitSystem natural_units_for(double c_s, double omega_d) {
  if (!(c_s > 0) || !(omega_d > 0)) throw std::domain_error("unit system needs positive c_s and omega_d");
  return {1.0 / omega_d, c_s / omega_d, si::hbar * omega_d};
}

PhysicalParams si_to_natural(const SIParams& p) {
  require(p.c_s > 0 && p.a > 0 && p.m > 0 && p.omega_d > 0 && p.L > 0, "SI values must be positive");
  require(p.delta >= 0 && p.g >= 0 && p.gamma >= 0 && p.T_pass > 0 && p.T_bec >= 0,
          "SI values must be non-negative");
  const UnitSystem u = natural_units_for(p.c_s, p.omega_d);
  PhysicalParams n;
  n.c_s = p.c_s * u.time / u.length;
  n.a = p.a * u.time * u.time / u.length;
  // k_c = m c_s / hbar in units of 1/length
  n.m = p.m * p.c_s * u.length / si::hbar / n.c_s;
  n.omega_d = p.omega_d * u.time;
  n.delta = p.delta * u.time;
  n.g = p.g * u.time;
  n.gamma = p.gamma / u.time;
  n.L = p.L / u.length;
  n.N = p.N;
  n.n_reps = p.n_reps;
  n.T_pass = p.T_pass / u.time;
  n.T_bec = p.T_bec * si::k_B / u.energy;
  return n;
}

SIParams natural_to_si(const PhysicalParams& n, double c_s_si, double omega_d_si) {
  const UnitSystem u = natural_units_for(c_s_si, omega_d_si);
  SIParams p;
  p.c_s = n.c_s * u.length / u.time;
  p.a = n.a * u.length / (u.time * u.time);
  p.m = n.m * n.c_s * si::hbar / (p.c_s * u.length);
  p.omega_d = n.omega_d / u.time;
  p.delta = n.delta / u.time;
  p.g = n.g / u.time;
  p.gamma = n.gamma * u.time;
  p.L = n.L * u.length;
  p.N = n.N;
  p.n_reps = n.n_reps;
  p.T_pass = n.T_pass * u.time;
  p.T_bec = n.T_bec * u.energy / si::k_B;
  return p;
}

}  // namespace unruhbec
