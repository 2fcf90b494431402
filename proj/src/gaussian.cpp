#include "unruhbec/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "unruhbec/thermometry.hpp"

namespace unruhbec {

using Eigen::Index;
using Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;
using RowPair = Eigen::Matrix<double, 2, Eigen::Dynamic>;

GaussianState GaussianState::vacuum(std::size_t n_modes) {
  const Index n = static_cast<Index>(2 * (n_modes + 1));
  return {VectorXd::Zero(n), MatrixXd::Identity(n, n)};
}

GaussianState GaussianState::product_thermal(double nbar_det, const std::vector<double>& nbar_modes) {
  GaussianState s = vacuum(nbar_modes.size());
  s.cov(0, 0) = s.cov(1, 1) = 2.0 * nbar_det + 1.0;
  for (std::size_t k = 0; k < nbar_modes.size(); ++k) {
    const Index i = static_cast<Index>(2 + 2 * k);
    s.cov(i, i) = s.cov(i + 1, i + 1) = 2.0 * nbar_modes[k] + 1.0;
  }
  return s;
}

double bose_occupation(double omega, double T) {
  if (T < 0) throw std::domain_error("bose_occupation: negative temperature");
  if (T == 0) return 0.0;
  return 1.0 / std::expm1(omega / T);
}

std::vector<double> thermal_occupations(const ModeSet& modes, double T) {
  std::vector<double> n;
  n.reserve(modes.size());
  for (const auto& m : modes.modes) n.push_back(bose_occupation(m.omega, T));
  return n;
}

double CouplingSchedule::envelope(double t) const {
  double e = window(t);
  if (e != 0.0 && modulation == Modulation::proper_time_rate)
    e *= proper_time_rate(t, modulation_a, modulation_c_s);
  return e;
}

double DetectorFieldSystem::mode_normalization() const {
  return modes.dimension == 1 ? std::sqrt(modes.L) : modes.L;
}

double DetectorFieldSystem::default_dt() const {
  const double w = std::max(modes.max_omega(), detector_freq);
  return (2.0 * std::numbers::pi / w) / 40.0;
}

MatrixXd HamiltonianFrame::dense_G() const {
  const Index n = static_cast<Index>(2 * (mode_freq.size() + 1));
  MatrixXd G = MatrixXd::Zero(n, n);
  G(0, 0) = G(1, 1) = detector_freq;
  for (std::size_t k = 0; k < mode_freq.size(); ++k) {
    const Index i = static_cast<Index>(2 + 2 * k);
    G(i, i) = G(i + 1, i + 1) = mode_freq[k];
    G.block<2, 2>(0, i) = coupling[k];
    G.block<2, 2>(i, 0) = coupling[k].transpose();
  }
  return G;
}

VectorXd HamiltonianFrame::dense_c() const {
  VectorXd c = VectorXd::Zero(static_cast<Index>(2 * (mode_freq.size() + 1)));
  c.head<2>() = drive;
  return c;
}

void assemble_hamiltonian_into(double t, const DetectorFieldSystem& sys, HamiltonianFrame& f) {
  const std::size_t N = sys.modes.size();
  f.detector_freq = sys.detector_freq;
  f.mode_freq.resize(N);
  f.coupling.resize(N);
  const double g = sys.schedule.g(t);
  const Vec2 x = sys.trajectory.position(t);
  const double inv_norm = 1.0 / sys.mode_normalization();
  for (std::size_t k = 0; k < N; ++k) {
    const Mode& m = sys.modes.modes[k];
    f.mode_freq[k] = m.omega;
    if (g == 0.0) {
      f.coupling[k].setZero();
      continue;
    }
    const double theta = m.k[0] * x[0] + m.k[1] * x[1];
    const double c = std::cos(theta), s = std::sin(theta);
    const double scale = g * inv_norm;
    // alpha = u e^{i theta}, beta = v e^{-i theta}
    const double ar = scale * m.u * c, ai = scale * m.u * s;
    const double br = scale * m.v * c, bi = -scale * m.v * s;
    f.coupling[k] << ar + br, bi - ai, ai + bi, ar - br;
  }
  f.drive.setZero();
  if (sys.schedule.mean_field == MeanField::drive)
    f.drive(0) = std::sqrt(2.0) * sys.schedule.drive * sys.schedule.envelope(t);
}

HamiltonianFrame assemble_hamiltonian(double t, const DetectorFieldSystem& sys) {
  HamiltonianFrame f;
  assemble_hamiltonian_into(t, sys, f);
  return f;
}

namespace {

// Free rotation exp(omega tau Omega2) of one oscillator.
Matrix2d free_rotation(double omega, double tau) {
  const double c = std::cos(omega * tau), s = std::sin(omega * tau);
  Matrix2d R;
  R << c, s, -s, c;
  return R;
}

// Moves a Schrodinger-picture frame into the interaction picture of the free
// Hamiltonian at elapsed time tau: G_I = S0^T G_int S0, c_I = S0^T c.
void to_interaction(HamiltonianFrame& f, double tau) {
  const Matrix2d Rd = free_rotation(f.detector_freq, tau);
  for (std::size_t k = 0; k < f.mode_freq.size(); ++k) {
    if (!f.coupling[k].isZero(0.0)) f.coupling[k] = Rd.transpose() * f.coupling[k] * free_rotation(f.mode_freq[k], tau);
    f.mode_freq[k] = 0.0;
  }
  f.drive = Rd.transpose() * f.drive;
  f.detector_freq = 0.0;
}

void interaction_frame(double t, double t_ref, const DetectorFieldSystem& sys, HamiltonianFrame& f) {
  assemble_hamiltonian_into(t, sys, f);
  to_interaction(f, t - t_ref);
}

// Omega2 * X for a two-row block: rows (x, p) -> (p, -x).
template <typename Derived>
RowPair rot_rows(const Eigen::MatrixBase<Derived>& X) {
  RowPair out(2, X.cols());
  out.row(0) = X.row(1);
  out.row(1) = -X.row(0);
  return out;
}

// M = A cov with A = Omega G in arrow form.
void apply_A_left(const HamiltonianFrame& f, const MatrixXd& cov, MatrixXd& M) {
  const std::size_t N = f.mode_freq.size();
  const Index n = cov.cols();
  RowPair acc = f.detector_freq * cov.topRows<2>();
  for (std::size_t k = 0; k < N; ++k) {
    const Index i = static_cast<Index>(2 + 2 * k);
    const Matrix2d& C = f.coupling[k];
    if (C.isZero(0.0)) continue;
    acc.noalias() += C * cov.middleRows<2>(i);
  }
  M.topRows<2>() = rot_rows(acc);
  RowPair tmp(2, n);
  for (std::size_t k = 0; k < N; ++k) {
    const Index i = static_cast<Index>(2 + 2 * k);
    tmp = f.mode_freq[k] * cov.middleRows<2>(i);
    tmp.noalias() += f.coupling[k].transpose() * cov.topRows<2>();
    M.middleRows<2>(i) = rot_rows(tmp);
  }
}

void apply_A_vec(const HamiltonianFrame& f, const VectorXd& r, VectorXd& out) {
  const std::size_t N = f.mode_freq.size();
  Vector2d acc = f.detector_freq * r.head<2>() + f.drive;
  for (std::size_t k = 0; k < N; ++k) {
    const Index i = static_cast<Index>(2 + 2 * k);
    acc.noalias() += f.coupling[k] * r.segment<2>(i);
  }
  out(0) = acc(1);
  out(1) = -acc(0);
  for (std::size_t k = 0; k < N; ++k) {
    const Index i = static_cast<Index>(2 + 2 * k);
    Vector2d v = f.mode_freq[k] * r.segment<2>(i) + f.coupling[k].transpose() * r.head<2>();
    out(i) = v(1);
    out(i + 1) = -v(0);
  }
}

// out = -(P Omega G) for a two-row P; also returns -(P Omega c).
void adjoint_rhs(const HamiltonianFrame& f, const RowPair& P, RowPair& out, Vector2d& jdot) {
  const std::size_t N = f.mode_freq.size();
  // Q = P Omega: per block columns (q_x, q_p) = (-p_p, p_x)
  auto Qblock = [&](Index i) {
    Matrix2d q;
    q.col(0) = -P.col(i + 1);
    q.col(1) = P.col(i);
    return q;
  };
  const Matrix2d Qd = Qblock(0);
  Matrix2d outd = f.detector_freq * Qd;
  for (std::size_t k = 0; k < N; ++k) {
    const Index i = static_cast<Index>(2 + 2 * k);
    const Matrix2d Qk = Qblock(i);
    outd.noalias() += Qk * f.coupling[k].transpose();
    out.block<2, 2>(0, i) = -(f.mode_freq[k] * Qk + Qd * f.coupling[k]);
  }
  out.leftCols<2>() = -outd;
  jdot = -(Qd * f.drive);
}

}  // namespace

double detector_occupation(const Matrix2d& c, const Vector2d& r, bool exclude_displacement) {
  double n = 0.25 * (c(0, 0) + c(1, 1)) - 0.5;
  if (!exclude_displacement) n += 0.5 * r.squaredNorm();
  return n;
}

double detector_occupation(const GaussianState& s, bool exclude_displacement) {
  return detector_occupation(s.detector_cov(), s.detector_means(), exclude_displacement);
}

MatrixXd symplectic_form(std::size_t n_osc) {
  const Index n = static_cast<Index>(2 * n_osc);
  MatrixXd W = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; i += 2) {
    W(i, i + 1) = 1.0;
    W(i + 1, i) = -1.0;
  }
  return W;
}

InvariantReport check_invariants(const MatrixXd& cov) {
  InvariantReport rep{};
  rep.asymmetry = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  const MatrixXd W = symplectic_form(static_cast<std::size_t>(cov.rows() / 2));
  const MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::MatrixXcd H = sym.cast<std::complex<double>>();
  H += std::complex<double>(0.0, 1.0) * W.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  rep.min_eig_uncertainty = es.eigenvalues().minCoeff();
  Eigen::EigenSolver<MatrixXd> ws(W * sym, false);
  const VectorXd nu = ws.eigenvalues().imag().cwiseAbs();
  rep.min_symplectic = nu.minCoeff();
  rep.max_symplectic = nu.maxCoeff();
  return rep;
}

EvolveResult evolve(const GaussianState& state, const DetectorFieldSystem& sys, double t_begin, double t_end,
                    const EvolveOptions& opts) {
  if (static_cast<std::size_t>(state.means.size()) != sys.dim() || state.cov.rows() != state.means.size())
    throw std::invalid_argument("evolve: state dimension does not match the system");
  if (!(t_end >= t_begin)) throw std::invalid_argument("evolve: need t_begin <= t_end");
  const double dt_req = opts.dt > 0 ? opts.dt : sys.default_dt();
  const std::size_t steps = t_end > t_begin ? static_cast<std::size_t>(std::ceil((t_end - t_begin) / dt_req - 1e-9)) : 0;
  const double dt = steps ? (t_end - t_begin) / static_cast<double>(steps) : 0.0;

  EvolveResult res;
  res.state = state;
  res.dt = dt;
  res.steps = steps;
  auto& cov = res.state.cov;
  auto& r = res.state.means;
  const Index n = cov.rows();
  const std::size_t stride = std::max<std::size_t>(1, opts.record_stride);

  auto check = [&](double t) {
    const auto rep = check_invariants(cov);
    if (rep.asymmetry > opts.invariant_tol * std::max(1.0, cov.cwiseAbs().maxCoeff()) ||
        rep.min_eig_uncertainty < -opts.invariant_tol || rep.min_symplectic < 1.0 - opts.invariant_tol)
      throw IntegrationError("evolve: Gaussian state invariant violated", t);
  };

  res.series.push_back({t_begin, detector_occupation(res.state, opts.exclude_displacement)});

  HamiltonianFrame f0, fh, f1;
  MatrixXd k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n), M(n, n);
  VectorXd r1(n), r2(n), r3(n), r4(n), rt(n);
  auto cov_rhs = [&](const HamiltonianFrame& f, const MatrixXd& c, MatrixXd& out) {
    apply_A_left(f, c, M);
    out = M + M.transpose();
  };

  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t_begin + dt * static_cast<double>(s);
    interaction_frame(t, t_begin, sys, f0);
    interaction_frame(t + 0.5 * dt, t_begin, sys, fh);
    interaction_frame(t + dt, t_begin, sys, f1);

    cov_rhs(f0, cov, k1);
    tmp = cov + 0.5 * dt * k1;
    cov_rhs(fh, tmp, k2);
    tmp = cov + 0.5 * dt * k2;
    cov_rhs(fh, tmp, k3);
    tmp = cov + dt * k3;
    cov_rhs(f1, tmp, k4);
    cov += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    apply_A_vec(f0, r, r1);
    rt = r + 0.5 * dt * r1;
    apply_A_vec(fh, rt, r2);
    rt = r + 0.5 * dt * r2;
    apply_A_vec(fh, rt, r3);
    rt = r + dt * r3;
    apply_A_vec(f1, rt, r4);
    r += (dt / 6.0) * (r1 + 2.0 * r2 + 2.0 * r3 + r4);

    const double tn = t_begin + dt * static_cast<double>(s + 1);
    if ((s + 1) % stride == 0 || s + 1 == steps)
      res.series.push_back({tn, detector_occupation(res.state, opts.exclude_displacement)});
    if (opts.check_stride > 0 && (s + 1) % opts.check_stride == 0) check(tn);
  }
  check(t_end);

  // back to the Schrodinger picture: R = S0 R_I with block rotations S0
  const double tau = t_end - t_begin;
  std::vector<Matrix2d> rot(sys.modes.size() + 1);
  rot[0] = free_rotation(sys.detector_freq, tau);
  for (std::size_t k = 0; k < sys.modes.size(); ++k) rot[k + 1] = free_rotation(sys.modes.modes[k].omega, tau);
  for (std::size_t i = 0; i < rot.size(); ++i) {
    const Index bi = static_cast<Index>(2 * i);
    r.segment<2>(bi) = rot[i] * r.segment<2>(bi);
    for (std::size_t j = 0; j < rot.size(); ++j) {
      const Index bj = static_cast<Index>(2 * j);
      cov.block<2, 2>(bi, bj) = rot[i] * cov.block<2, 2>(bi, bj) * rot[j].transpose();
    }
  }
  return res;
}

DetectorPropagator detector_propagator(const DetectorFieldSystem& sys, double t_begin, double t_end, double dt_req) {
  if (!(t_end >= t_begin)) throw std::invalid_argument("detector_propagator: need t_begin <= t_end");
  if (dt_req <= 0) dt_req = sys.default_dt();
  const std::size_t steps = t_end > t_begin ? static_cast<std::size_t>(std::ceil((t_end - t_begin) / dt_req - 1e-9)) : 0;
  const double dt = steps ? (t_end - t_begin) / static_cast<double>(steps) : 0.0;
  const Index n = static_cast<Index>(sys.dim());

  DetectorPropagator prop;
  prop.steps = steps;
  RowPair P = RowPair::Zero(2, n);
  P(0, 0) = P(1, 1) = 1.0;
  Vector2d J = Vector2d::Zero();

  HamiltonianFrame f0, fh, f1;
  RowPair k1(2, n), k2(2, n), k3(2, n), k4(2, n), tmp(2, n);
  Vector2d j1, j2, j3, j4;
  const double h = -dt;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t_end - dt * static_cast<double>(s);
    interaction_frame(t, t_begin, sys, f0);
    interaction_frame(t + 0.5 * h, t_begin, sys, fh);
    interaction_frame(t + h, t_begin, sys, f1);
    adjoint_rhs(f0, P, k1, j1);
    tmp = P + 0.5 * h * k1;
    adjoint_rhs(fh, tmp, k2, j2);
    tmp = P + 0.5 * h * k2;
    adjoint_rhs(fh, tmp, k3, j3);
    tmp = P + h * k3;
    adjoint_rhs(f1, tmp, k4, j4);
    P += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    J += (h / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
  }
  // rows of S(T, t_b) = S0(T - t_b) S_I(T, t_b); only the detector rotation acts on them
  const Matrix2d Rd = free_rotation(sys.detector_freq, t_end - t_begin);
  prop.rows = Rd * P;
  prop.displacement = Rd * J;
  return prop;
}

std::vector<TimePoint> detector_time_series(const DetectorFieldSystem& sys, double t_begin,
                                            const std::vector<double>& times, const Matrix2d& det_cov,
                                            const Vector2d& det_means, const std::vector<double>& nbar_modes,
                                            double dt, std::size_t threads, bool exclude_displacement) {
  if (nbar_modes.size() != sys.modes.size())
    throw std::invalid_argument("detector_time_series: one occupation per mode required");
  for (double t : times)
    if (!(t >= t_begin)) throw std::invalid_argument("detector_time_series: sample before t_begin");
  std::vector<TimePoint> out(times.size());
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < times.size(); i += std::max<std::size_t>(threads, 1)) {
      const auto prop = detector_propagator(sys, t_begin, times[i], dt);
      out[i] = {times[i], detector_occupation(prop.apply_cov(det_cov, nbar_modes), prop.apply_means(det_means),
                                              exclude_displacement)};
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  return out;
}

Matrix2d DetectorPropagator::apply_cov(const Matrix2d& det_cov, const std::vector<double>& nbar_modes) const {
  const Matrix2d Sdd = detector_block();
  Matrix2d out = Sdd * det_cov * Sdd.transpose();
  for (std::size_t k = 0; k < nbar_modes.size(); ++k) {
    const auto Sk = rows.block<2, 2>(0, static_cast<Index>(2 + 2 * k));
    out.noalias() += (2.0 * nbar_modes[k] + 1.0) * (Sk * Sk.transpose());
  }
  return out;
}

Eigen::Vector2d DetectorPropagator::apply_means(const Vector2d& det_means) const {
  return detector_block() * det_means + displacement;
}

DetectorPassMap DetectorPassMap::from(const DetectorPropagator& prop, const std::vector<double>& nbar_modes) {
  DetectorPassMap m;
  m.S = prop.detector_block();
  m.noise = prop.apply_cov(Matrix2d::Zero(), nbar_modes);
  m.shift = prop.displacement;
  return m;
}

DetectorPassMap DetectorPassMap::then(const DetectorPassMap& next) const {
  DetectorPassMap m;
  m.S = next.S * S;
  m.noise = next.S * noise * next.S.transpose() + next.noise;
  m.shift = next.S * shift + next.shift;
  return m;
}

DetectorFixedPoint fixed_point(const DetectorPassMap& map) {
  const double rho = Eigen::EigenSolver<Matrix2d>(map.S, false).eigenvalues().cwiseAbs().maxCoeff();
  if (!(rho < 1.0)) throw std::domain_error("fixed_point: pass map is not contracting");
  // vec(cov) = (I - S kron S)^{-1} vec(noise), column-major vec
  Eigen::Matrix4d K;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) K.block<2, 2>(2 * i, 2 * j) = map.S(i, j) * map.S;
  const Eigen::Vector4d rhs = Eigen::Map<const Eigen::Vector4d>(map.noise.data());
  const Eigen::Vector4d sol = (Eigen::Matrix4d::Identity() - K).fullPivLu().solve(rhs);
  DetectorFixedPoint fp;
  fp.cov = Eigen::Map<const Matrix2d>(sol.data());
  fp.cov = 0.5 * (fp.cov + fp.cov.transpose()).eval();
  fp.means = (Matrix2d::Identity() - map.S).fullPivLu().solve(map.shift);
  fp.spectral_radius = rho;
  return fp;
}

ProtocolResult repeat_protocol(const GaussianState& initial, const DetectorFieldSystem& sys, const ProtocolOptions& opts) {
  if (opts.n_reps < 1) throw std::invalid_argument("repeat_protocol: n_reps must be at least 1");
  if (static_cast<std::size_t>(initial.means.size()) != sys.dim())
    throw std::invalid_argument("repeat_protocol: state dimension does not match the system");
  const double t0 = sys.schedule.window.t0, t1 = sys.schedule.window.t1;
  const double omega = sys.detector_freq;
  auto record = [&](std::size_t pass, double nbar) {
    return PassRecord{pass, nbar, temperature_from_occupation(std::max(nbar, 0.0), omega)};
  };

  ProtocolResult out;
  DetectorFieldSystem mirrored = sys;
  mirrored.trajectory.direction = -sys.trajectory.direction;

  if (opts.field_reset == FieldReset::keep) {
    GaussianState st = initial;
    for (std::size_t p = 1; p <= opts.n_reps; ++p) {
      const auto& s = (opts.mirror_return && p % 2 == 0) ? mirrored : sys;
      EvolveOptions eo;
      eo.dt = opts.dt;
      eo.record_stride = std::numeric_limits<std::size_t>::max();
      eo.exclude_displacement = opts.exclude_displacement;
      st = evolve(st, s, t0, t1, eo).state;
      // drop detector-field correlations
      const Index n = st.cov.rows();
      st.cov.block(0, 2, 2, n - 2).setZero();
      st.cov.block(2, 0, n - 2, 2).setZero();
      out.passes.push_back(record(p, detector_occupation(st, opts.exclude_displacement)));
    }
    out.final_state = st;
    return out;
  }

  const std::vector<double> nbar_field = opts.field_reset == FieldReset::thermal
                                             ? thermal_occupations(sys.modes, opts.T_bec)
                                             : std::vector<double>(sys.modes.size(), 0.0);
  const DetectorPropagator fwd = detector_propagator(sys, t0, t1, opts.dt);
  const DetectorPropagator back = opts.mirror_return ? detector_propagator(mirrored, t0, t1, opts.dt) : fwd;
  Matrix2d dc = initial.detector_cov();
  Vector2d dm = initial.detector_means();
  for (std::size_t p = 1; p <= opts.n_reps; ++p) {
    const DetectorPropagator& prop = (opts.mirror_return && p % 2 == 0) ? back : fwd;
    dc = prop.apply_cov(dc, nbar_field);
    dm = prop.apply_means(dm);
    out.passes.push_back(record(p, detector_occupation(dc, dm, opts.exclude_displacement)));
  }
  DetectorPassMap map = DetectorPassMap::from(fwd, nbar_field);
  if (opts.mirror_return) map = map.then(DetectorPassMap::from(back, nbar_field));
  try {
    const auto fp = fixed_point(map);
    out.limit_nbar = detector_occupation(fp.cov, fp.means, opts.exclude_displacement);
  } catch (const std::domain_error&) {
  }
  out.final_state = GaussianState::product_thermal(0.0, nbar_field);
  out.final_state.cov.topLeftCorner<2, 2>() = dc;
  out.final_state.means.head<2>() = dm;
  return out;
}

}  // namespace unruhbec
