#include "unruhbec/bogoliubov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace unruhbec {

double Mode::k_norm() const { return std::hypot(k[0], k[1]); }

double ModeSet::max_omega() const {
  double w = 0.0;
  for (const auto& m : modes) w = std::max(w, m.omega);
  return w;
}

double dispersion(double k, double c_s, double m) {
  if (k < 0) throw std::domain_error("dispersion: negative wavevector");
  // c_s k sqrt(1 + (k / 2 k_c)^2), which avoids squaring large k
  const double ratio = k / (2.0 * m * c_s);
  return c_s * k * std::sqrt(1.0 + ratio * ratio);
}

BogoliubovCoefficients bogoliubov_coefficients(double k, double c_s, double m) {
  if (!(k > 0)) throw std::domain_error("bogoliubov_coefficients: k = 0 is the condensate mode");
  const double eps = k * k / (2.0 * m);
  const double omega = dispersion(k, c_s, m);
  const double x = (eps + m * c_s * c_s) / omega;
  // x - 1 loses precision for k >> k_c; (x^2 - 1) = (mc^2)^2 / omega^2 gives it exactly.
  const double mc2 = m * c_s * c_s;
  const double v2 = 0.5 * (mc2 * mc2 / (omega * omega)) / (x + 1.0);
  const double u2 = v2 + 1.0;
  return {std::sqrt(u2), std::sqrt(v2)};
}

double gap_correction(double k, double c_s, double m) {
  if (k < 0) throw std::domain_error("gap_correction: negative wavevector");
  // c k - c k sqrt(1+r^2) = -c k r^2 / (1 + sqrt(1+r^2))
  const double r = k / (2.0 * m * c_s);
  return -c_s * k * r * r / (1.0 + std::sqrt(1.0 + r * r));
}

std::optional<double> divergence_wavevector(double omega_d, double c_s, double m, double k_max) {
  auto f = [&](double k) { return -gap_correction(k, c_s, m) - omega_d; };
  if (f(k_max) < 0) return std::nullopt;
  double lo = 0.0, hi = k_max;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

Mode make_mode(double kx, double ky, Dispersion disp, double c_s, double m) {
  Mode mode;
  mode.k = {kx, ky};
  const double kn = mode.k_norm();
  if (disp == Dispersion::linear) {
    mode.omega = c_s * kn;
    mode.u = 1.0;
    mode.v = 1.0;
  } else {
    mode.omega = dispersion(kn, c_s, m);
    const auto uv = bogoliubov_coefficients(kn, c_s, m);
    mode.u = uv.u;
    mode.v = uv.v;
  }
  return mode;
}

}  // namespace

ModeSet mode_grid(const GridSpec& spec, double c_s, double m) {
  if (!(spec.L > 0)) throw std::domain_error("mode_grid: L must be positive");
  if (spec.dimension != 1 && spec.dimension != 2)
    throw std::domain_error("mode_grid: dimension must be 1 or 2");
  if (spec.dispersion == Dispersion::bogoliubov && !(m > 0 && c_s > 0))
    throw std::domain_error("mode_grid: Bogoliubov dispersion needs m > 0 and c_s > 0");

  ModeSet set;
  set.L = spec.L;
  set.dimension = spec.dimension;
  set.dispersion = spec.dispersion;
  set.k_c = spec.dispersion == Dispersion::linear ? std::numeric_limits<double>::infinity() : m * c_s;
  const double dk = 2.0 * std::numbers::pi / spec.L;

  if (spec.dimension == 1) {
    if (spec.N == 0 || spec.N % 2 != 0) throw std::domain_error("mode_grid: N must be even and positive in 1D");
    const long half = static_cast<long>(spec.N / 2);
    for (long n = 1; n <= half; ++n) {
      set.modes.push_back(make_mode(-dk * n, 0.0, spec.dispersion, c_s, m));
      set.modes.push_back(make_mode(dk * n, 0.0, spec.dispersion, c_s, m));
    }
  } else {
    if (!(spec.k_max > 0)) throw std::domain_error("mode_grid: k_max must be positive in 2D");
    if (spec.k_min < 0 || spec.k_min >= spec.k_max) throw std::domain_error("mode_grid: need 0 <= k_min < k_max");
    const long nmax = static_cast<long>(std::floor(spec.k_max / dk));
    const double tol = 1e-12 * spec.k_max;
    for (long i = -nmax; i <= nmax; ++i) {
      for (long j = -nmax; j <= nmax; ++j) {
        if (i == 0 && j == 0) continue;
        const double kn = dk * std::hypot(double(i), double(j));
        if (kn > spec.k_max + tol || kn < spec.k_min - tol) continue;
        set.modes.push_back(make_mode(dk * i, dk * j, spec.dispersion, c_s, m));
      }
    }
    if (set.modes.empty()) throw std::domain_error("mode_grid: no lattice points inside the k shell");
  }

  std::stable_sort(set.modes.begin(), set.modes.end(), [](const Mode& x, const Mode& y) {
    const double nx = x.k_norm(), ny = y.k_norm();
    if (std::abs(nx - ny) > 1e-12 * std::max(nx, ny)) return nx < ny;
    if (x.k[0] != y.k[0]) return x.k[0] < y.k[0];
    return x.k[1] < y.k[1];
  });
  return set;
}

}  // namespace unruhbec
