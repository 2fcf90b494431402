#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "approx.hpp"
#include "oracles.hpp"
#include "unruhbec/gaussian.hpp"
#include "unruhbec/perturbation.hpp"

using namespace unruhbec;
using namespace unruhbec::oracles;

namespace {

constexpr double pi = std::numbers::pi;

double final_occupation(const DetectorFieldSystem& sys, double t0, double t1, double dt, double tol = 1e-8) {
  EvolveOptions o;
  o.dt = dt;
  o.invariant_tol = tol;
  return detector_occupation(evolve(GaussianState::vacuum(sys.modes.size()), sys, t0, t1, o).state);
}

}  // namespace

TEST_CASE("detector occupation conventions") {
  const auto vac = GaussianState::vacuum(3);
  CHECK(detector_occupation(vac) == 0.0);
  CHECK(vac.cov.isIdentity());

  const auto th = GaussianState::product_thermal(0.7, {0.1, 0.2});
  CHECK(detector_occupation(th) == rel_approx(0.7));
  CHECK(th.cov(4, 4) == rel_approx(1.4));

  Eigen::Vector2d r(std::sqrt(2.0), 0.0);
  CHECK(detector_occupation(Eigen::Matrix2d::Identity(), r) == rel_approx(1.0));
  CHECK(detector_occupation(Eigen::Matrix2d::Identity(), r, true) == 0.0);

  CHECK(bose_occupation(1.0, 0.0) == 0.0);
  CHECK(bose_occupation(1.0, 1.0 / pi) == rel_approx(1.0 / std::expm1(pi)));
}

TEST_CASE("hamiltonian assembly") {
  auto sys = small_system();
  SUBCASE("zero coupling is block diagonal") {
    sys.schedule.g0 = 0.0;
    const auto G = assemble_hamiltonian(5.0, sys).dense_G();
    CHECK(G.isApprox(G.diagonal().asDiagonal().toDenseMatrix()));
    CHECK(G(0, 0) == 1.0);
    CHECK(G(2, 2) == rel_approx(2 * pi));
  }
  SUBCASE("pure two-mode squeezing block") {
    auto sq = squeezing_system(0.05);
    const auto f = assemble_hamiltonian(1.0, sq);
    Eigen::Matrix2d expected;
    expected << 0.05, 0.0, 0.0, -0.05;
    CHECK(f.coupling[0].isApprox(expected));
  }
  SUBCASE("symmetric and driven") {
    sys.schedule.mean_field = MeanField::drive;
    sys.schedule.drive = 0.3;
    const auto f = assemble_hamiltonian(5.0, sys);
    const auto G = f.dense_G();
    CHECK((G - G.transpose()).norm() == 0.0);
    CHECK(f.dense_c()(0) == rel_approx(std::sqrt(2.0) * 0.3));
    CHECK(f.dense_c().tail(4).norm() == 0.0);
  }
  SUBCASE("shift multiplies the phases") {
    auto shifted = sys;
    shifted.trajectory.origin = {0.25, 0.0};  // k dx = pi / 2 for k = 2 pi
    const auto f0 = assemble_hamiltonian(3.0, sys);
    const auto f1 = assemble_hamiltonian(3.0, shifted);
    // alpha' = i alpha, beta' = -i beta
    const Eigen::Matrix2d& b0 = f0.coupling[0];
    const double ar = 0.5 * (b0(0, 0) + b0(1, 1)), ai = 0.5 * (b0(1, 0) - b0(0, 1));
    const double br = 0.5 * (b0(0, 0) - b0(1, 1)), bi = 0.5 * (b0(1, 0) + b0(0, 1));
    const double nar = -ai, nai = ar, nbr = bi, nbi = -br;
    Eigen::Matrix2d expected;
    expected << nar + nbr, nbi - nai, nai + nbi, nar - nbr;
    CHECK(f1.coupling[0].isApprox(expected, 1e-12));
  }
}

TEST_CASE("two-mode squeezing oracle") {
  const auto sys = squeezing_system(0.05);
  EvolveOptions o;
  o.dt = 0.01;
  const auto r = evolve(GaussianState::vacuum(1), sys, 0.0, 10.0, o);
  CHECK(std::abs(detector_occupation(r.state) - std::pow(std::sinh(0.5), 2)) < 1e-6);
  CHECK(std::pow(std::sinh(0.5), 2) == rel_approx(0.27154).epsilon(1e-4));
  // the time series follows the closed form
  for (const auto& p : r.series) CHECK(std::abs(p.nbar - std::pow(std::sinh(0.05 * p.t), 2)) < 1e-6);
}

TEST_CASE("truncated Fock oracle") {
  const auto sys = small_system();
  const double fock = fock_detector_occupation(sys, 20.0, 8, 0.002);
  const double gauss = final_occupation(sys, 0.0, 20.0, 0.002);
  CHECK(gauss > 1e-5);
  CHECK(std::abs(gauss - fock) < 1e-4);
  CHECK(std::abs(gauss - fock) / gauss < 1e-3);
}

TEST_CASE("truncated Fock oracle with Bogoliubov weights and a shifted start") {
  auto sys = small_system(0.05);
  sys.modes.modes[0].u = 1.3;
  sys.modes.modes[0].v = 0.8;
  sys.trajectory.origin = {0.3, 0.0};
  const double fock = fock_detector_occupation(sys, 20.0, 8, 0.002);
  const double gauss = final_occupation(sys, 0.0, 20.0, 0.002);
  CHECK(std::abs(gauss - fock) < 1e-4);
}

TEST_CASE("step halving shows fourth order") {
  // errors against the exact squeezing solution
  const auto sq = squeezing_system(0.05);
  const double exact = std::pow(std::sinh(0.5), 2);
  std::vector<double> err;
  for (double dt : {1.0, 0.5, 0.25}) err.push_back(std::abs(final_occupation(sq, 0.0, 10.0, dt) - exact));
  CHECK(err[0] / err[1] >= 12.0);
  CHECK(err[0] / err[1] <= 20.0);
  CHECK(err[1] / err[2] >= 12.0);
  CHECK(err[1] / err[2] <= 20.0);

  // accelerated detector: successive differences shrink at least as fast as order 4
  const auto sys = small_system(0.2);
  const double n1 = final_occupation(sys, 0.0, 20.0, 0.1, 1e-3);
  const double n2 = final_occupation(sys, 0.0, 20.0, 0.05, 1e-3);
  const double n3 = final_occupation(sys, 0.0, 20.0, 0.025, 1e-3);
  CHECK((n1 - n2) / (n2 - n3) >= 12.0);
  // default step is converged to 1e-6
  const double nd = final_occupation(sys, 0.0, 20.0, sys.default_dt(), 1e-5);
  const double nh = final_occupation(sys, 0.0, 20.0, sys.default_dt() / 2, 1e-5);
  CHECK(std::abs(nd - nh) < 1e-6);
}

TEST_CASE("zero coupling conserves occupations") {
  auto sys = small_system(0.0);
  const auto th = GaussianState::product_thermal(0.4, {0.2, 1.5});
  EvolveOptions o;
  o.record_stride = 50;
  const auto r = evolve(th, sys, 0.0, 20.0, o);
  for (const auto& p : r.series) CHECK(std::abs(p.nbar - 0.4) < 1e-10);
  CHECK((r.state.cov - th.cov).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("translation invariance") {
  auto sys = small_system(0.1);
  auto shifted = sys;
  shifted.trajectory.origin = {0.37, 0.0};
  EvolveOptions o;
  o.dt = 0.01;
  o.record_stride = 20;
  const auto a = evolve(GaussianState::vacuum(2), sys, 0.0, 20.0, o);
  const auto b = evolve(GaussianState::vacuum(2), shifted, 0.0, 20.0, o);
  REQUIRE(a.series.size() == b.series.size());
  for (std::size_t i = 0; i < a.series.size(); ++i) CHECK(std::abs(a.series[i].nbar - b.series[i].nbar) < 1e-8);
}

TEST_CASE("purity and positivity") {
  const auto sys = small_system(0.1);
  EvolveOptions o;
  o.dt = 0.01;
  o.check_stride = 200;
  const auto r = evolve(GaussianState::vacuum(2), sys, 0.0, 20.0, o);
  const auto inv = check_invariants(r.state.cov);
  CHECK(inv.asymmetry < 1e-12);
  CHECK(inv.min_eig_uncertainty > -1e-8);
  CHECK(std::abs(inv.min_symplectic - 1.0) < 1e-6);
  CHECK(std::abs(inv.max_symplectic - 1.0) < 1e-6);
  CHECK(std::abs(r.state.cov.determinant() - 1.0) < 1e-6);

  const auto th = check_invariants(GaussianState::product_thermal(0.5, {2.0}).cov);
  CHECK(th.min_symplectic == rel_approx(2.0));
  CHECK(th.max_symplectic == rel_approx(5.0));

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2) * 0.5;
  CHECK(check_invariants(bad).min_eig_uncertainty < 0);
}

TEST_CASE("invariant violation reports the failure time") {
  const auto sys = small_system(0.3);
  GaussianState bad = GaussianState::vacuum(2);
  bad.cov *= 0.5;
  EvolveOptions o;
  o.check_stride = 10;
  try {
    evolve(bad, sys, 0.0, 1.0, o);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.time >= 0.0);
    CHECK(e.time <= 1.0);
  }
}

TEST_CASE("driven mean field") {
  auto sys = small_system(0.0);
  sys.schedule.mean_field = MeanField::drive;
  sys.schedule.drive = 0.1;
  sys.schedule.window = SwitchingWindow(0.0, 20.0, 0.0);
  EvolveOptions o;
  o.dt = 0.005;
  const auto r = evolve(GaussianState::vacuum(2), sys, 0.0, 2.0, o);
  // dr/dt = Omega (w r + c): |alpha(t)| = (drive / w) |1 - e^{-i w t}|, alpha = (x + ip)/sqrt2
  const double expected = std::pow(0.1 * std::abs(1.0 - std::exp(std::complex<double>(0, -2.0))), 2);
  CHECK(detector_occupation(r.state) == rel_approx(expected).epsilon(1e-8));
  CHECK(std::abs(detector_occupation(r.state, true)) < 1e-12);
}

TEST_CASE("weak coupling agrees with perturbation theory") {
  const double g = 1.0 / 50, a = 2.0, wd = 1.0;
  DetectorFieldSystem sys;
  sys.detector_freq = wd;
  GridSpec spec;
  spec.L = 1.0;
  spec.N = 6;
  spec.dispersion = Dispersion::linear;
  sys.modes = mode_grid(spec, 1.0, 1.0);
  sys.trajectory = Trajectory::effective_unruh(a);
  sys.schedule.g0 = g;
  sys.schedule.window = SwitchingWindow(0.0, 8.0, 1.0, 3.0);
  const double n = final_occupation(sys, 0.0, 8.0, sys.default_dt());

  double p = 0;
  for (const auto& m : sys.modes.modes)
    p += g * g / spec.L * dispersion_corrected_amplitude(m, wd, a, 1.0, Channel::excitation, sys.schedule.window).probability();
  CHECK(n == rel_approx(p).epsilon(0.1));
}

TEST_CASE("propagator matches full evolution") {
  auto sys = small_system(0.2);
  const auto prop = detector_propagator(sys, 0.0, 20.0, 0.005);
  SUBCASE("vacuum field") {
    const auto init = GaussianState::product_thermal(0.3, {0.0, 0.0});
    EvolveOptions o;
    o.dt = 0.005;
    const auto full = evolve(init, sys, 0.0, 20.0, o).state;
    CHECK((prop.apply_cov(init.detector_cov(), {0.0, 0.0}) - full.detector_cov()).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("thermal field and drive") {
    sys.schedule.mean_field = MeanField::drive;
    sys.schedule.drive = 0.05;
    const auto pd = detector_propagator(sys, 0.0, 20.0, 0.005);
    auto init = GaussianState::product_thermal(0.1, {0.5, 0.2});
    init.means(0) = 0.3;
    EvolveOptions o;
    o.dt = 0.005;
    const auto full = evolve(init, sys, 0.0, 20.0, o).state;
    CHECK((pd.apply_cov(init.detector_cov(), {0.5, 0.2}) - full.detector_cov()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((pd.apply_means(init.detector_means()) - full.detector_means()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("detector time series") {
  const auto sys = small_system(0.2);
  const auto init = GaussianState::product_thermal(0.3, {0.1, 0.0});
  const std::vector<double> times{0.0, 5.0, 12.5, 20.0};
  const auto serial = detector_time_series(sys, 0.0, times, init.detector_cov(), init.detector_means(), {0.1, 0.0}, 0.005);
  REQUIRE(serial.size() == times.size());
  CHECK(serial[0].nbar == rel_approx(0.3).epsilon(1e-12));
  EvolveOptions o;
  o.dt = 0.005;
  for (std::size_t i = 1; i < times.size(); ++i) {
    CHECK(serial[i].t == times[i]);
    CHECK(serial[i].nbar == rel_approx(detector_occupation(evolve(init, sys, 0.0, times[i], o).state)).epsilon(1e-9));
  }
  const auto threaded =
      detector_time_series(sys, 0.0, times, init.detector_cov(), init.detector_means(), {0.1, 0.0}, 0.005, 3);
  for (std::size_t i = 0; i < times.size(); ++i) CHECK(threaded[i].nbar == serial[i].nbar);
  CHECK_THROWS_AS(detector_time_series(sys, 1.0, {0.5}, init.detector_cov(), init.detector_means(), {0.1, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(detector_time_series(sys, 0.0, {1.0}, init.detector_cov(), init.detector_means(), {0.1}),
                  std::invalid_argument);
}

TEST_CASE("repeat protocol") {
  auto sys = small_system(0.2);
  ProtocolOptions opts;
  opts.dt = 0.005;
  SUBCASE("one pass equals one evolve") {
    opts.n_reps = 1;
    const auto pr = repeat_protocol(GaussianState::vacuum(2), sys, opts);
    REQUIRE(pr.passes.size() == 1);
    CHECK(std::abs(pr.passes[0].nbar - final_occupation(sys, 0.0, 20.0, 0.005)) < 1e-9);
    opts.field_reset = FieldReset::keep;
    const auto pk = repeat_protocol(GaussianState::vacuum(2), sys, opts);
    CHECK(std::abs(pk.passes[0].nbar - pr.passes[0].nbar) < 1e-9);
  }
  SUBCASE("heating and cooling meet") {
    opts.n_reps = 400;
    const auto heat = repeat_protocol(GaussianState::vacuum(2), sys, opts);
    const auto cool = repeat_protocol(GaussianState::product_thermal(2.0, {0.0, 0.0}), sys, opts);
    CHECK(heat.passes.front().nbar < heat.passes.back().nbar);
    CHECK(cool.passes.front().nbar > cool.passes.back().nbar);
    CHECK(heat.passes.back().nbar == rel_approx(cool.passes.back().nbar).epsilon(1e-3));
    CHECK(heat.limit_nbar == rel_approx(heat.passes.back().nbar).epsilon(1e-3));
    CHECK(cool.limit_nbar == rel_approx(heat.limit_nbar).epsilon(1e-12));
  }
  SUBCASE("thermal field heats more than vacuum") {
    opts.n_reps = 3;
    const auto vac = repeat_protocol(GaussianState::vacuum(2), sys, opts);
    opts.field_reset = FieldReset::thermal;
    opts.T_bec = 2.0;
    const auto th = repeat_protocol(GaussianState::vacuum(2), sys, opts);
    CHECK(th.passes.back().nbar > vac.passes.back().nbar);
  }
  SUBCASE("keep drops correlations between passes") {
    opts.n_reps = 2;
    opts.field_reset = FieldReset::keep;
    const auto pk = repeat_protocol(GaussianState::vacuum(2), sys, opts);
    CHECK(pk.final_state.cov.block(0, 2, 2, 4).norm() == 0.0);
    CHECK(pk.passes.size() == 2);
  }
  SUBCASE("fixed point of the pass map") {
    const auto prop = detector_propagator(sys, 0.0, 20.0, 0.005);
    const auto map = DetectorPassMap::from(prop, {0.3, 0.1});
    const auto fp = fixed_point(map);
    CHECK(fp.spectral_radius < 1.0);
    Eigen::Matrix2d c = Eigen::Matrix2d::Identity();
    for (int i = 0; i < 20000; ++i) c = map.S * c * map.S.transpose() + map.noise;
    CHECK((c - fp.cov).cwiseAbs().maxCoeff() < 1e-9);
    const auto two = map.then(map);
    CHECK((fixed_point(two).cov - fp.cov).cwiseAbs().maxCoeff() < 1e-9);
    DetectorPassMap grow;
    grow.S = 1.01 * Eigen::Matrix2d::Identity();
    CHECK_THROWS_AS(fixed_point(grow), std::domain_error);
    opts.field_reset = FieldReset::keep;
    opts.n_reps = 1;
    CHECK(std::isnan(repeat_protocol(GaussianState::vacuum(2), sys, opts).limit_nbar));
  }
  SUBCASE("validation") {
    opts.n_reps = 0;
    CHECK_THROWS_AS(repeat_protocol(GaussianState::vacuum(2), sys, opts), std::invalid_argument);
    opts.n_reps = 1;
    CHECK_THROWS_AS(repeat_protocol(GaussianState::vacuum(3), sys, opts), std::invalid_argument);
  }
}
