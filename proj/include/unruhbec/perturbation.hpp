#pragma once

#include <vector>

#include "unruhbec/bogoliubov.hpp"
#include "unruhbec/quadrature.hpp"
#include "unruhbec/window.hpp"

namespace unruhbec {

enum class Channel { excitation = +1, deexcitation = -1 };

inline double channel_sign(Channel c) { return c == Channel::excitation ? 1.0 : -1.0; }

struct AmplitudeResult {
  double omega = 0.0;
  Channel channel = Channel::excitation;
  cplx amplitude{0.0, 0.0};
  double error = 0.0;
  SwitchingWindow window;
  /// Only set by dispersion_corrected_amplitude.
  double effective_gap = 0.0;
  bool divergence_mode = false;

  double probability() const { return std::norm(amplitude); }
};

/// First-order amplitude of the effectively accelerated detector,
///   int w(t) exp(i s omega_d t - i (omega_k c_s / a) exp(-a t / c_s)) dt,
/// with s = +1 for excitation and -1 for de-excitation. Throws AccuracyError
/// if the adaptive quadrature cannot reach opts.rel_tol.
AmplitudeResult transition_amplitude(double omega_k, double omega_d, double a, double c_s, Channel ch,
                                     const SwitchingWindow& window, const QuadratureOptions& opts = {});

/// Window around the saddle of a mode: plateau from pad half-widths before
/// the centre to pad half-widths after it, a ramp-on of min(1, half_width)
/// and a slow ramp-off of 300 / omega_d so the end contributes no boundary term.
SwitchingWindow saddle_window(double omega_k, double omega_d, double a, double c_s, double pad = 5.0);

/// Infinite-window |A|^2: (2 pi c_s / (omega_d a)) / (exp(+-2 pi omega_d c_s / a) - 1),
/// returned positive for both channels.
double analytic_probability(double omega_d, double a, double c_s, Channel ch);

/// |A + exp(-+ i omega_d t_s(omega_k)) / (i omega_d)|^2, where A is the
/// amplitude over `window` and t_s the saddle centre of the mode.
double abrupt_switch_probability(double omega_k, double omega_d, double a, double c_s, Channel ch,
                                 const SwitchingWindow& window, const QuadratureOptions& opts = {});

/// |int_{-T}^{T} v_k exp(i (omega_d + omega_k - k_x v) t) dt|^2 for a detector in
/// uniform motion along x. Closed form; a squared sinc in the detuning.
double uniform_motion_probability(double v, double omega_d, const Mode& mode, double T);

/// Amplitude for one grid mode with its full dispersion along the effective
/// trajectory. The phase carries the co-moving detuning delta_k = omega_k - c_s k_x:
///   s omega_d t + delta_k t - (k_x c_s^2 / a) exp(-a t / c_s),
/// weighted by v_k (excitation) or u_k (de-excitation). The de-excitation
/// channel sees the effective gap omega_d - delta_k; the result is flagged
/// when that gap closes.
AmplitudeResult dispersion_corrected_amplitude(const Mode& mode, double omega_d, double a, double c_s,
                                               Channel ch, const SwitchingWindow& window,
                                               const QuadratureOptions& opts = {});

struct GapProbabilities {
  double omega_d;
  double p_exc;
  double p_deexc;
};

struct DetailedBalanceFit {
  double temperature;
  double slope;
  double intercept;
  double slope_error;  // standard error of the slope
  double residual;     // rms deviation of ln(P+/P-) from the fitted line
};

/// Least-squares fit of ln(P+/P-) against omega_d; T = -1 / slope.
DetailedBalanceFit detailed_balance_fit(const std::vector<GapProbabilities>& data);

}  // namespace unruhbec
