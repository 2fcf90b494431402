#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "unruhbec/bogoliubov.hpp"
#include "unruhbec/trajectory.hpp"
#include "unruhbec/window.hpp"

namespace unruhbec {

// Quadrature ordering (x_d, p_d, x_1, p_1, ..., x_N, p_N) with
// x = (b + b^dag)/sqrt2, p = (b - b^dag)/(i sqrt2). Covariances use the
// symmetrized convention <{dR_i, dR_j}>, so the vacuum is the identity.

/// Joint Gaussian state of detector and field modes.
struct GaussianState {
  Eigen::VectorXd means;
  Eigen::MatrixXd cov;

  std::size_t n_modes() const { return static_cast<std::size_t>(means.size() / 2 - 1); }

  static GaussianState vacuum(std::size_t n_modes);
  /// Detector thermal with occupation nbar_det, field modes with occupations nbar_modes.
  static GaussianState product_thermal(double nbar_det, const std::vector<double>& nbar_modes);

  Eigen::Matrix2d detector_cov() const { return cov.topLeftCorner<2, 2>(); }
  Eigen::Vector2d detector_means() const { return means.head<2>(); }
};

/// Bose occupation 1 / (exp(omega / T) - 1); 0 for T = 0.
double bose_occupation(double omega, double T);

/// Thermal occupations of every mode at bath temperature T.
std::vector<double> thermal_occupations(const ModeSet& modes, double T);

enum class MeanField { cancelled, drive };
enum class Modulation { constant, proper_time_rate };

/// Time dependence of the detector-field coupling.
struct CouplingSchedule {
  double g0 = 0.0;
  SwitchingWindow window;
  MeanField mean_field = MeanField::cancelled;
  double drive = 0.0;  // sqrt(n_a) Omega_a, used when mean_field == drive
  Modulation modulation = Modulation::constant;
  double modulation_a = 1.0;
  double modulation_c_s = 1.0;

  double envelope(double t) const;
  double g(double t) const { return g0 * envelope(t); }
};

/// Detector oscillator + plane-wave phonon modes + worldline + schedule.
struct DetectorFieldSystem {
  double detector_freq = 1.0;
  ModeSet modes;
  Trajectory trajectory;
  CouplingSchedule schedule;

  /// Spatial normalization of plane waves: sqrt(L) in 1D, L in 2D.
  double mode_normalization() const;
  /// Default fixed step (2 pi / omega_max) / 40.
  double default_dt() const;
  std::size_t dim() const { return 2 * (modes.size() + 1); }
};

/// Instantaneous quadratic form H = 1/2 R^T G R + c^T R in arrow form: the
/// only off-diagonal blocks are the 2x2 detector-mode couplings.
struct HamiltonianFrame {
  double detector_freq = 0.0;
  std::vector<double> mode_freq;
  std::vector<Eigen::Matrix2d> coupling;  // G block (detector rows, mode k columns)
  Eigen::Vector2d drive = Eigen::Vector2d::Zero();  // detector part of c

  Eigen::MatrixXd dense_G() const;
  Eigen::VectorXd dense_c() const;
};

/// G(t): detector block detector_freq I, mode blocks omega_k I, coupling blocks
/// realizing g(t) [d^dag (alpha c_k + beta c_k^dag) + h.c.] with
/// alpha = u_k e^{i k.x_D} / norm and beta = v_k e^{-i k.x_D} / norm.
HamiltonianFrame assemble_hamiltonian(double t, const DetectorFieldSystem& sys);

/// Fills `frame` in place; avoids reallocation inside integrators.
void assemble_hamiltonian_into(double t, const DetectorFieldSystem& sys, HamiltonianFrame& frame);

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time) : std::runtime_error(what), time(time) {}
  double time;
};

struct EvolveOptions {
  double dt = 0.0;                  // 0 selects DetectorFieldSystem::default_dt
  std::size_t record_stride = 1;    // record every n-th step (plus the final step)
  std::size_t check_stride = 0;     // check invariants every n-th step, 0 = only at the end
  double invariant_tol = 1e-8;
  bool exclude_displacement = false;
};

struct TimePoint {
  double t;
  double nbar;
};

struct EvolveResult {
  GaussianState state;
  std::vector<TimePoint> series;
  std::size_t steps = 0;
  double dt = 0.0;
};

/// Fixed-step RK4 integration of r' = A r + Omega c and cov' = A cov + cov A^T,
/// A = Omega G(t), from t_begin to t_end. The free rotations are applied
/// exactly and RK4 steps the coupling in their interaction picture. Throws
/// IntegrationError if an invariant check fails.
EvolveResult evolve(const GaussianState& state, const DetectorFieldSystem& sys, double t_begin, double t_end,
                    const EvolveOptions& opts = {});

/// Detector rows of the symplectic propagator S(t_end, t_begin) plus the
/// displacement the drive adds to the detector means. Obtained by integrating
/// the adjoint equation P' = -P A(t) backwards from P(t_end) = [I 0], in the
/// same interaction picture as evolve.
struct DetectorPropagator {
  Eigen::Matrix<double, 2, Eigen::Dynamic> rows;
  Eigen::Vector2d displacement = Eigen::Vector2d::Zero();
  std::size_t steps = 0;

  Eigen::Matrix2d detector_block() const { return rows.leftCols<2>(); }

  /// Detector covariance after the interval when the field starts in a
  /// product state with the given occupations and no displacement.
  Eigen::Matrix2d apply_cov(const Eigen::Matrix2d& det_cov, const std::vector<double>& nbar_modes) const;
  Eigen::Vector2d apply_means(const Eigen::Vector2d& det_means) const;
};

/// Affine map of the detector marginal over one or more passes with a reset
/// field: cov -> S cov S^T + noise, means -> S means + shift.
struct DetectorPassMap {
  Eigen::Matrix2d S = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d noise = Eigen::Matrix2d::Zero();
  Eigen::Vector2d shift = Eigen::Vector2d::Zero();

  static DetectorPassMap from(const DetectorPropagator& prop, const std::vector<double>& nbar_modes);
  /// `next` applied after *this.
  DetectorPassMap then(const DetectorPassMap& next) const;
};

struct DetectorFixedPoint {
  Eigen::Matrix2d cov;
  Eigen::Vector2d means;
  double spectral_radius;  // of S; the fixed point attracts iff < 1
};

/// Limit of infinitely many applications of the map. Throws
/// std::domain_error when the map is not contracting.
DetectorFixedPoint fixed_point(const DetectorPassMap& map);

DetectorPropagator detector_propagator(const DetectorFieldSystem& sys, double t_begin, double t_end, double dt = 0.0);

/// Detector occupation at each of `times` (all >= t_begin) for a detector
/// starting in (det_cov, det_means) and a product field with occupations
/// nbar_modes at t_begin. Each sample uses its own backward propagator, so
/// the cost is linear in the mode count. Samples are split over `threads`.
std::vector<TimePoint> detector_time_series(const DetectorFieldSystem& sys, double t_begin,
                                            const std::vector<double>& times, const Eigen::Matrix2d& det_cov,
                                            const Eigen::Vector2d& det_means, const std::vector<double>& nbar_modes,
                                            double dt = 0.0, std::size_t threads = 1,
                                            bool exclude_displacement = false);

/// n = (s_xx + s_pp)/4 - 1/2 + (x^2 + p^2)/2 on the detector block.
double detector_occupation(const Eigen::Matrix2d& det_cov, const Eigen::Vector2d& det_means,
                           bool exclude_displacement = false);
double detector_occupation(const GaussianState& state, bool exclude_displacement = false);

/// Block-diagonal symplectic form with [[0, 1], [-1, 0]] blocks.
Eigen::MatrixXd symplectic_form(std::size_t n_oscillators);

struct InvariantReport {
  double asymmetry;          // max |cov - cov^T|
  double min_eig_uncertainty;  // smallest eigenvalue of cov + i Omega
  double min_symplectic;     // smallest symplectic eigenvalue
  double max_symplectic;
};

InvariantReport check_invariants(const Eigen::MatrixXd& cov);

enum class FieldReset { vacuum, thermal, keep };

struct PassRecord {
  std::size_t pass;
  double nbar;
  double temperature;
};

struct ProtocolOptions {
  std::size_t n_reps = 1;
  FieldReset field_reset = FieldReset::vacuum;
  double T_bec = 0.0;
  double dt = 0.0;
  bool exclude_displacement = false;
  /// Mirror every second pass through the start point (back and forth motion).
  bool mirror_return = false;
};

struct ProtocolResult {
  std::vector<PassRecord> passes;
  GaussianState final_state;  // full state for FieldReset::keep, detector block otherwise
  /// Detector occupation after infinitely many passes (or pass pairs with
  /// mirror_return); NaN for FieldReset::keep or a non-contracting map.
  double limit_nbar = std::numeric_limits<double>::quiet_NaN();
};

/// n passes through the coupling window. Between passes the detector
/// marginal is kept, detector-field correlations are dropped and the field is
/// reset per `field_reset`. With vacuum or thermal resets every pass, the
/// first included, starts from the reset field and the propagator is computed
/// once; with `keep` each pass is a full covariance evolution.
ProtocolResult repeat_protocol(const GaussianState& initial, const DetectorFieldSystem& sys,
                               const ProtocolOptions& opts);

}  // namespace unruhbec
