#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "approx.hpp"
#include "unruhbec/config.hpp"
#include "unruhbec/presets.hpp"
#include "unruhbec/scenario.hpp"
#include "unruhbec/thermometry.hpp"

using namespace unruhbec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("unruhbec_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Two modes, short smooth window: runs in milliseconds.
const std::string small_passes = R"(
[params]
a = 2
g = 0.05
gamma = 1
T_pass = 4

[modes]
L = 1
N = 2

[protocol]
n_reps = 20
)";

const std::string small_series = R"(
[params]
g = 0.2

[modes]
dimension = 2
L = 6
k_min = 0.5
k_max = 1.5

[trajectory]
kind = circular
v = 0.5
omega_rot = 0.25

[schedule]
gamma_on = 1
gamma_off = 0
plateau_start = 1

[protocol]
mode = time_series
t_max = 6
samples = 6
)";

int error_line(const std::string& text) {
  try {
    (void)load_config_text(text);
  } catch (const ConfigError& e) {
    return static_cast<int>(e.line);
  }
  return -1;
}

std::string error_text(const std::string& text) {
  try {
    (void)load_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("ini parsing") {
  const auto raw = parse_ini("# header\n[params]\na = 3 ; trailing\n\n[modes]\n  N =  4  \n");
  CHECK(raw.at("params").at("a").value == "3");
  CHECK(raw.at("params").at("a").line == 3);
  CHECK(raw.at("modes").at("N").value == "4");

  CHECK(error_line("[params]\na 3\n") == 2);
  CHECK(error_line("a = 3\n") == 1);
  CHECK(error_line("[params]\n\nfoo = 1\n") == 3);
  CHECK(error_line("[nope]\n") == 1);
  CHECK(error_line("[params]\na = 1\na = 2\n") == 3);
  CHECK(error_line("[params\n") == 1);
  CHECK(error_line("[params]\na =\n") == 2);
  CHECK(error_line("[params]\na = two\n") == 2);
  CHECK(error_line("[modes]\nN = -4\n") == 2);
  CHECK(error_line("[protocol]\nmode = forever\n") == 2);
  CHECK(error_text("[protocol]\nmode = forever\n").find("passes, time_series") != std::string::npos);
}

TEST_CASE("minimal config gets every default") {
  const auto c = load_config_text("[trajectory]\nkind = effective_unruh\n[params]\na = 2\n");
  CHECK(c.params.a == 2.0);
  CHECK(c.params.c_s == 1.0);
  CHECK(c.params.omega_d == 1.0);
  CHECK(c.params.g == rel_approx(0.02));
  CHECK(c.modes.grid.N == 20);
  CHECK(c.trajectory.kind == TrajectoryKind::effective_unruh);
  CHECK(c.protocol.mode == RunMode::passes);
  CHECK(c.protocol.n_reps == 1);
  CHECK(c.schedule.plateau_length == c.params.T_pass);
  CHECK_FALSE(c.sweep.has_value());
  const auto text = c.canonical_text();
  for (const char* s : {"[params]", "[modes]", "[trajectory]", "[schedule]", "[protocol]", "[integrator]", "[outputs]"})
    CHECK(text.find(s) != std::string::npos);
  // the canonical text reloads to the same scenario
  CHECK(load_config_text(text).hash() == c.hash());
  CHECK(load_config_text(text).canonical_text() == text);
}

TEST_CASE("validation names the violated precondition") {
  const auto odd = error_text("[modes]\nN = 7\n");
  CHECK(odd.find("N must be even") != std::string::npos);
  CHECK(odd.find("mode_grid") != std::string::npos);
  CHECK(error_text("[params]\na = -1\n").find("a > 0") != std::string::npos);
  CHECK(error_text("[trajectory]\nkind = circular\n").find("dimension = 2") != std::string::npos);
  CHECK(error_text("[modes]\ndimension = 2\nk_max = 1\nk_min = 2\n").find("k_min < k_max") != std::string::npos);
  CHECK(error_text("[protocol]\nmode = time_series\n").find("t_max") != std::string::npos);
  CHECK(error_text("[protocol]\ndetector_init = thermal\n").find("T0") != std::string::npos);
  CHECK(error_text("[outputs]\nname = a/b\n").find("outputs.name") != std::string::npos);
  CHECK(error_text("[sweep]\nparameter = params.g\n").find("both") != std::string::npos);
  // every sweep point is checked before anything runs
  CHECK(error_text("[sweep]\nparameter = modes.N\nvalues = 4, 5\n").find("modes.N = 5") != std::string::npos);
  CHECK(error_line("[sweep]\nparameter = nope\nvalues = 1\n") == 2);
}

TEST_CASE("value lists and keys") {
  CHECK(parse_value_list("1, 3, 7") == std::vector<std::string>{"1", "3", "7"});
  CHECK(parse_value_list("0.7:1.3:7") == std::vector<std::string>{"0.7", "0.8", "0.9", "1", "1.1", "1.2", "1.3"});
  CHECK(parse_value_list("2:2:1") == std::vector<std::string>{"2"});
  CHECK_THROWS_AS(parse_value_list("1,,2"), ConfigError);
  CHECK_THROWS_AS(parse_value_list("1:2"), ConfigError);
  CHECK(qualify_key("gamma_on") == "schedule.gamma_on");
  CHECK(qualify_key("modes.L") == "modes.L");
  CHECK_THROWS_AS(qualify_key("params.L"), ConfigError);
  CHECK_THROWS_AS(qualify_key("nothing"), ConfigError);
}

TEST_CASE("overrides re-validate and the hash ignores outputs") {
  const auto base = load_config_text(small_passes);
  const auto g = with_override(base, "params.g", "0.1");
  CHECK(g.params.g == 0.1);
  CHECK(g.hash() != base.hash());
  CHECK(with_override(base, "outputs.name", "other").hash() == base.hash());
  CHECK_THROWS_AS(with_override(base, "modes.N", "3"), ConfigError);
  // gamma feeds both ramps unless they are set
  const auto ramps = with_override(base, "gamma", "2");
  CHECK(ramps.schedule.gamma_on == 2.0);
  CHECK(ramps.schedule.gamma_off == 2.0);
}

TEST_CASE("presets expand to the documented scenarios") {
  CHECK(presets().size() == 4);
  CHECK_THROWS_AS(find_preset("fig9"), ConfigError);

  const auto fig1a = expand_preset(find_preset("fig1a"));
  REQUIRE(fig1a.size() == 3);
  for (const auto& c : fig1a) {
    CHECK(c.build_modes().size() == 20);
    CHECK(c.params.a == 2.0);
    CHECK(c.params.omega_d == 1.0);
    CHECK(c.params.g == rel_approx(1.0 / 50.0));
    CHECK(c.protocol.n_reps == 150);
  }
  REQUIRE(fig1a[0].sweep);
  CHECK(fig1a[0].sweep->parameter == "params.gamma");
  CHECK(fig1a[0].sweep->values == std::vector<std::string>{"1", "3", "7", "12", "17", "25"});
  CHECK(fig1a[1].schedule.gamma_on == 17.0);
  CHECK(fig1a[2].protocol.detector_init == DetectorInit::thermal);
  CHECK(fig1a[2].protocol.T0 == rel_approx(2.0 / std::numbers::pi));

  const auto fig1b = expand_preset(find_preset("fig1b"));
  REQUIRE(fig1b[0].sweep);
  CHECK(fig1b[0].sweep->parameter == "params.omega_d");
  CHECK(fig1b[0].sweep->values.front() == "0.7");
  CHECK(fig1b[0].sweep->values.back() == "1.3");

  const auto fig2 = expand_preset(find_preset("fig2"));
  CHECK(fig2[0].params.omega_c() / fig2[0].params.omega_d == rel_approx(500.0));
  CHECK(fig2[0].modes.grid.dispersion == Dispersion::bogoliubov);
  CHECK(fig2[0].protocol.n_reps == 300);

  const auto fig3 = expand_preset(find_preset("fig3"));
  REQUIRE(fig3[0].sweep);
  CHECK(fig3[0].trajectory.kind == TrajectoryKind::circular);
  CHECK(fig3[0].modes.grid.dimension == 2);
  const double l0 = std::stod(fig3[0].sweep->values[0]), l1 = std::stod(fig3[0].sweep->values[1]);
  CHECK(l0 / l1 == rel_approx(5.0));
  // the small box is crossed within the sampled interval, the large one is not
  CHECK(l1 < fig3[0].params.c_s * fig3[0].protocol.t_max);
  CHECK(l0 > fig3[0].params.c_s * fig3[0].protocol.t_max);
  REQUIRE(fig3.size() == 3);
  CHECK(fig3[0].trajectory.v == rel_approx(0.8));
  CHECK(fig3[1].trajectory.v == rel_approx(0.95));
  CHECK(fig3[0].trajectory.R == rel_approx(8.0));
}

TEST_CASE("run matches a direct protocol call") {
  const auto c = load_config_text(small_passes);
  const auto r = run(c);

  GridSpec gs;
  gs.L = 1.0;
  gs.N = 2;
  DetectorFieldSystem sys;
  sys.detector_freq = 1.0;
  sys.modes = mode_grid(gs, 1.0, 1e6);
  sys.trajectory = Trajectory::effective_unruh(2.0);
  sys.schedule.g0 = 0.05;
  sys.schedule.window = SwitchingWindow::around_plateau(0.0, 4.0, 1.0);
  ProtocolOptions po;
  po.n_reps = 20;
  po.dt = sys.default_dt();
  const auto direct = repeat_protocol(GaussianState::vacuum(2), sys, po);

  REQUIRE(r.series.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(r.series[i].x == static_cast<double>(i + 1));
    CHECK(r.series[i].nbar == rel_approx(direct.passes[i].nbar).epsilon(1e-12));
  }
  CHECK(r.summary.T_limit == rel_approx(temperature_from_occupation(direct.limit_nbar, 1.0)).epsilon(1e-12));
  CHECK(r.diagnostics.min_uncertainty >= -1e-9);
  CHECK(r.diagnostics.integrator_error < 1e-8);
  CHECK(r.config_hash == c.hash());
}

TEST_CASE("time series run matches the engine") {
  const auto c = load_config_text(small_series);
  const auto r = run(c, 2);
  REQUIRE(r.series.size() == 7);
  const auto sys = c.build_system();
  std::vector<double> times;
  for (int i = 0; i <= 6; ++i) times.push_back(double(i));
  const auto direct = detector_time_series(sys, 0.0, times, Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(),
                                           std::vector<double>(sys.modes.size(), 0.0), sys.default_dt());
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(std::abs(r.series[i].x - times[i]) < 1e-12);
    CHECK(std::abs(r.series[i].nbar - direct[i].nbar) <= 1e-12 * std::abs(direct[i].nbar));
  }
  std::vector<SeriesPoint> tail;
  for (const auto& row : r.series) tail.push_back({row.x, row.T});
  CHECK(r.summary.oscillation == rel_approx(oscillation_metric(tail, 3)).epsilon(1e-12));
  CHECK(r.diagnostics.min_uncertainty >= -1e-9);
}

TEST_CASE("output files are deterministic and atomic") {
  TempDir a("det_a"), b("det_b");
  const auto c = load_config_text(small_passes);
  const auto fa = write_run(run(c), c, a.path / "x");
  const auto fb = write_run(run(c), c, b.path / "x");
  REQUIRE(fa.size() == 3);
  for (std::size_t i = 0; i < fa.size(); ++i) CHECK(slurp(fa[i]) == slurp(fb[i]));

  const auto dat = slurp(a.path / "x.dat");
  CHECK(dat.rfind("# thermalization curve\n", 0) == 0);
  CHECK(dat.find("# units:") != std::string::npos);
  CHECK(dat.find("pass") != std::string::npos);
  const auto csv = slurp(a.path / "x.csv");
  CHECK(csv.rfind("pass,nbar,T[omega_u]\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
  CHECK(load_config_text(slurp(a.path / "x.ini")).hash() == c.hash());
  for (const auto& e : fs::directory_iterator(a.path)) CHECK(e.path().string().find(".tmp") == std::string::npos);
}

TEST_CASE("sweeps isolate failures and do not depend on the worker count") {
  TempDir one("sweep_1"), three("sweep_3");
  // the coarse step makes the full-covariance evolution fail its invariant check
  const std::string text = R"(
[params]
g = 0.1
T_pass = 4
[modes]
L = 1
N = 2
[protocol]
n_reps = 2
field_reset = keep
[integrator]
error_estimate = false
[sweep]
parameter = integrator.dt
values = 0.002, 3, 0.004
)";
  const auto c = load_config_text(text);
  const auto s1 = sweep(c, 1, one.path);
  const auto s3 = sweep(c, 3, three.path);
  REQUIRE(s1.points.size() == 3);
  CHECK(s1.failures() == 1);
  CHECK_FALSE(s1.points[1].result);
  CHECK(s1.points[1].error.find("integration error") != std::string::npos);
  CHECK(s1.points[0].result);
  CHECK(s1.points[2].result);
  CHECK(fs::exists(one.path / "run_001.err"));
  CHECK(fs::exists(one.path / "run_000.dat"));
  CHECK(fs::exists(one.path / "run_002.csv"));
  for (const char* f : {"run_index.dat", "run_index.csv", "run_000.dat", "run_002.dat", "run_001.err"})
    CHECK(slurp(one.path / f) == slurp(three.path / f));
  const auto index = slurp(one.path / "run_index.csv");
  CHECK(index.rfind("point,integrator.dt,status,", 0) == 0);
  CHECK(std::count(index.begin(), index.end(), '\n') == 4);
}

TEST_CASE("worker cap from the environment") {
  ::unsetenv(max_threads_env);
  CHECK(resolve_threads(5) == 5);
  CHECK(resolve_threads(0) >= 1);
  ::setenv(max_threads_env, "2", 1);
  CHECK(resolve_threads(5) == 2);
  CHECK(resolve_threads(1) == 1);
  ::setenv(max_threads_env, "junk", 1);
  CHECK(resolve_threads(5) == 5);
  ::unsetenv(max_threads_env);
}

TEST_CASE("dispersion and amplitude tables") {
  const auto t = dispersion_table(1.0, 500.0, 300.0, 3);
  CHECK(t.columns == std::vector<std::string>{"k[omega_u/c_s]", "omega[omega_u]", "u", "v", "gap_correction[omega_u]"});
  REQUIRE(t.rows.size() == 3);
  CHECK(std::stod(t.rows[2][0]) == 300.0);
  CHECK(std::stod(t.rows[2][1]) == rel_approx(dispersion(300.0, 1.0, 500.0)).epsilon(1e-9));
  CHECK(std::stod(t.rows[0][3]) == rel_approx(bogoliubov_coefficients(100.0, 1.0, 500.0).v).epsilon(1e-9));

  const auto scan = amplitude_scan(400.0, 2.0, 1.0, {0.8, 1.0, 1.2});
  CHECK(scan.fit.temperature == rel_approx(1.0 / std::numbers::pi).epsilon(0.05));
  const auto at = amplitude_table(scan, 400.0, 2.0);
  CHECK(at.rows.size() == 3);
  CHECK(at.columns.front() == "omega_d[omega_u]");
}
