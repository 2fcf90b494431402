#include "unruhbec/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "unruhbec/trajectory.hpp"

namespace unruhbec {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Amplitude of  exp(i (lin * t - amp * exp(-a t / c_s)))  under the window.
// `rate(t)` bounds the instantaneous angular frequency of the phase.
QuadratureResult accelerated_phase_integral(double lin, double amp, double a, double c_s, double weight,
                                            const SwitchingWindow& w, const QuadratureOptions& opts) {
  const double decay = a / c_s;
  auto f = [&](double t) {
    const double phase = lin * t - amp * std::exp(-decay * t);
    return weight * w(t) * cplx(std::cos(phase), std::sin(phase));
  };
  auto step = [&](double t) {
    const double rate = std::abs(lin) + std::abs(amp) * decay * std::exp(-decay * t);
    double h = two_pi / (10.0 * std::max(rate, 1e-300));
    if (w.gamma_on > 0 && t < w.plateau_start()) h = std::min(h, 0.25 * w.gamma_on);
    if (w.gamma_off > 0) h = std::min(h, 0.25 * w.gamma_off);
    return std::min(h, 0.25 * w.length());
  };
  const std::vector<double> breaks{w.plateau_start(), w.plateau_end()};
  return integrate_adaptive(f, w.t0, w.t1, step, breaks, opts);
}

}  // namespace

SwitchingWindow saddle_window(double omega_k, double omega_d, double a, double c_s, double pad) {
  if (!(pad > 0)) throw std::domain_error("saddle_window: pad must be positive");
  const auto sp = saddle_point_time(omega_k, omega_d, a, c_s);
  const double ramp_on = std::min(1.0, sp.half_width);
  const double start = sp.center - pad * sp.half_width + ramp_on;
  return SwitchingWindow::around_plateau(start, sp.center + pad * sp.half_width, ramp_on, 300.0 / omega_d);
}

AmplitudeResult transition_amplitude(double omega_k, double omega_d, double a, double c_s, Channel ch,
                                     const SwitchingWindow& window, const QuadratureOptions& opts) {
  if (!(omega_k >= 0) || !(omega_d > 0) || !(a > 0) || !(c_s > 0))
    throw std::domain_error("transition_amplitude: frequencies, a and c_s must be positive");
  const double s = channel_sign(ch);
  const auto q = accelerated_phase_integral(s * omega_d, omega_k * c_s / a, a, c_s, 1.0, window, opts);
  AmplitudeResult r;
  r.omega = omega_k;
  r.channel = ch;
  r.amplitude = q.value;
  r.error = q.error;
  r.window = window;
  r.effective_gap = omega_d;
  return r;
}

double analytic_probability(double omega_d, double a, double c_s, Channel ch) {
  if (!(omega_d > 0) || !(a > 0) || !(c_s > 0))
    throw std::domain_error("analytic_probability: inputs must be positive");
  const double x = two_pi * omega_d * c_s / a;
  const double pre = two_pi * c_s / (omega_d * a);
  return ch == Channel::excitation ? pre / std::expm1(x) : pre / -std::expm1(-x);
}

double abrupt_switch_probability(double omega_k, double omega_d, double a, double c_s, Channel ch,
                                 const SwitchingWindow& window, const QuadratureOptions& opts) {
  const auto amp = transition_amplitude(omega_k, omega_d, a, c_s, ch, window, opts);
  const double ts = saddle_point_time(omega_k, omega_d, a, c_s).center;
  const double s = channel_sign(ch);
  const cplx boundary = std::exp(cplx(0.0, -s * omega_d * ts)) / cplx(0.0, omega_d);
  return std::norm(amp.amplitude + boundary);
}

double uniform_motion_probability(double v, double omega_d, const Mode& mode, double T) {
  if (v < 0) throw std::domain_error("uniform_motion_probability: v must be non-negative");
  if (!(T > 0)) throw std::domain_error("uniform_motion_probability: T must be positive");
  const double detuning = omega_d + mode.omega - mode.k[0] * v;
  // int_{-T}^{T} e^{i D t} dt = 2 sin(D T) / D
  const double x = detuning * T;
  const double integral = std::abs(x) < 1e-8 ? 2.0 * T * (1.0 - x * x / 6.0) : 2.0 * std::sin(x) / detuning;
  return mode.v * mode.v * integral * integral;
}

AmplitudeResult dispersion_corrected_amplitude(const Mode& mode, double omega_d, double a, double c_s,
                                               Channel ch, const SwitchingWindow& window,
                                               const QuadratureOptions& opts) {
  if (!(omega_d > 0) || !(a > 0) || !(c_s > 0))
    throw std::domain_error("dispersion_corrected_amplitude: inputs must be positive");
  const double kx = mode.k[0];
  const double detune = mode.omega - c_s * kx;  // >= 0 for every mode
  const double s = channel_sign(ch);
  const double weight = ch == Channel::excitation ? mode.v : mode.u;
  const auto q = accelerated_phase_integral(s * omega_d + detune, kx * c_s * c_s / a, a, c_s, weight, window, opts);

  AmplitudeResult r;
  r.omega = mode.omega;
  r.channel = ch;
  r.amplitude = q.value;
  r.error = q.error;
  r.window = window;
  r.effective_gap = ch == Channel::excitation ? omega_d + detune : omega_d - detune;
  // The resonance of a closed gap is only resolved to ~1/T by a window of length T.
  r.divergence_mode = ch == Channel::deexcitation && kx > 0 && r.effective_gap * window.length() <= two_pi;
  return r;
}

DetailedBalanceFit detailed_balance_fit(const std::vector<GapProbabilities>& data) {
  if (data.size() < 3) throw std::invalid_argument("detailed_balance_fit: need at least 3 gap values");
  const double n = static_cast<double>(data.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> ys;
  for (const auto& d : data) {
    if (!(d.p_exc > 0) || !(d.p_deexc > 0))
      throw std::domain_error("detailed_balance_fit: probabilities must be positive");
    const double y = std::log(d.p_exc / d.p_deexc);
    ys.push_back(y);
    sx += d.omega_d;
    sy += y;
    sxx += d.omega_d * d.omega_d;
    sxy += d.omega_d * y;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0)) throw std::domain_error("detailed_balance_fit: gap values must differ");
  const double slope = (n * sxy - sx * sy) / den;
  const double intercept = (sy - slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = ys[i] - (intercept + slope * data[i].omega_d);
    ss += r * r;
  }
  if (std::abs(slope) < 1e-12) throw std::domain_error("detailed_balance_fit: slope too close to zero for a temperature");
  const double slope_err = data.size() > 2 ? std::sqrt(ss / (n - 2.0) * n / den) : 0.0;
  return {-1.0 / slope, slope, intercept, slope_err, std::sqrt(ss / n)};
}

}  // namespace unruhbec
