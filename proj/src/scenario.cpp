#include "unruhbec/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <thread>

#include "unruhbec/gaussian.hpp"
#include "unruhbec/thermometry.hpp"

namespace unruhbec {

namespace fs = std::filesystem;

namespace {

const std::string units_line = "units: hbar = k_B = c_s = 1; frequencies, energies and T in omega_u, times in 1/omega_u";

double temperature_or_nan(double nbar, double omega_d) {
  if (!std::isfinite(nbar)) return std::numeric_limits<double>::quiet_NaN();
  return temperature_from_occupation(std::max(nbar, 0.0), omega_d);
}

// Smallest eigenvalue of the Hermitian [[a, b + i], [b - i, c]].
double min_uncertainty_2x2(const Eigen::Matrix2d& s) {
  const double mean = 0.5 * (s(0, 0) + s(1, 1));
  const double half = 0.5 * (s(0, 0) - s(1, 1));
  const double off = 0.5 * (s(0, 1) + s(1, 0));
  return mean - std::sqrt(half * half + off * off + 1.0);
}

GaussianState initial_state(const ScenarioConfig& c, const ModeSet& modes) {
  const double nbar_det = c.protocol.detector_init == DetectorInit::thermal
                              ? occupation_from_temperature(c.protocol.T0, c.params.omega_d)
                              : 0.0;
  return GaussianState::product_thermal(nbar_det, field_occupations(c, modes));
}

std::string describe(const std::exception& e) {
  if (dynamic_cast<const IntegrationError*>(&e)) return std::string("integration error: ") + e.what();
  if (dynamic_cast<const AccuracyError*>(&e)) return std::string("accuracy error: ") + e.what();
  return e.what();
}

RunResult run_passes(const ScenarioConfig& c, const DetectorFieldSystem& sys, RunResult r) {
  const auto init = initial_state(c, sys.modes);
  ProtocolOptions po;
  po.n_reps = c.protocol.n_reps;
  po.field_reset = c.protocol.field_reset;
  po.T_bec = c.params.T_bec;
  po.dt = r.diagnostics.dt;
  po.exclude_displacement = c.protocol.exclude_displacement;
  po.mirror_return = c.protocol.mirror_return;
  const auto pr = repeat_protocol(init, sys, po);

  std::vector<SeriesPoint> ts;
  for (const auto& p : pr.passes) {
    r.series.push_back({static_cast<double>(p.pass), p.nbar, p.temperature});
    ts.push_back({static_cast<double>(p.pass), p.temperature});
  }
  r.summary.T_final = r.series.back().T;
  try {
    const auto ss = steady_state(ts, c.protocol.steady_fraction);
    r.summary.T_ss = ss.value;
    r.summary.ss_converged = ss.converged;
  } catch (const std::invalid_argument&) {
    // too few passes for a trend; leave T_ss unset
  }
  r.summary.T_limit = temperature_or_nan(pr.limit_nbar, c.params.omega_d);
  r.diagnostics.min_uncertainty = check_invariants(pr.final_state.cov).min_eig_uncertainty;

  if (c.integrator.error_estimate && c.protocol.field_reset != FieldReset::keep) {
    const auto& w = sys.schedule.window;
    const auto nb = field_occupations(c, sys.modes);
    auto first_pass = [&](double dt) {
      const auto prop = detector_propagator(sys, w.t0, w.t1, dt);
      return detector_occupation(prop.apply_cov(init.detector_cov(), nb), prop.apply_means(init.detector_means()),
                                 c.protocol.exclude_displacement);
    };
    r.diagnostics.integrator_error = std::abs(first_pass(r.diagnostics.dt) - first_pass(2 * r.diagnostics.dt)) / 15.0;
  }
  return r;
}

RunResult run_time_series(const ScenarioConfig& c, const DetectorFieldSystem& sys, std::size_t threads, RunResult r) {
  const auto init = initial_state(c, sys.modes);
  const auto nb = field_occupations(c, sys.modes);
  const double t0 = sys.schedule.window.t0;
  const std::size_t n = c.protocol.samples;
  std::vector<double> times;
  for (std::size_t i = 0; i <= n; ++i) times.push_back(t0 + c.protocol.t_max * static_cast<double>(i) / static_cast<double>(n));

  const auto pts = detector_time_series(sys, t0, times, init.detector_cov(), init.detector_means(), nb,
                                        r.diagnostics.dt, threads, c.protocol.exclude_displacement);
  std::vector<SeriesPoint> ts;
  for (const auto& p : pts) {
    const double T = temperature_or_nan(p.nbar, c.params.omega_d);
    r.series.push_back({p.t, p.nbar, T});
    ts.push_back({p.t, T});
  }
  const auto begin = static_cast<std::size_t>(std::ceil(c.protocol.metric_from * static_cast<double>(n) - 1e-9));
  r.summary.T_final = r.series.back().T;
  r.summary.oscillation = oscillation_metric(ts, begin);
  double sum = 0.0;
  for (std::size_t i = begin; i < ts.size(); ++i) sum += ts[i].value;
  r.summary.T_mean_tail = sum / static_cast<double>(ts.size() - begin);

  const auto last = detector_propagator(sys, t0, times.back(), r.diagnostics.dt);
  r.diagnostics.min_uncertainty = min_uncertainty_2x2(last.apply_cov(init.detector_cov(), nb));
  if (c.integrator.error_estimate) {
    const auto coarse = detector_propagator(sys, t0, times.back(), 2 * r.diagnostics.dt);
    const double fine_n = pts.back().nbar;
    const double coarse_n = detector_occupation(coarse.apply_cov(init.detector_cov(), nb),
                                                coarse.apply_means(init.detector_means()),
                                                c.protocol.exclude_displacement);
    r.diagnostics.integrator_error = std::abs(fine_n - coarse_n) / 15.0;
  }
  return r;
}

std::string unique_suffix() {
  static std::atomic<unsigned long> counter{0};
  return fmt::format(".tmp{}-{}", std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000,
                     counter.fetch_add(1));
}

}  // namespace

std::vector<double> field_occupations(const ScenarioConfig& c, const ModeSet& modes) {
  if (c.protocol.field_reset == FieldReset::thermal || c.protocol.field_reset == FieldReset::keep)
    return thermal_occupations(modes, c.params.T_bec);
  return std::vector<double>(modes.size(), 0.0);
}

std::size_t resolve_threads(std::size_t requested) {
  std::size_t n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (const char* env = std::getenv(max_threads_env)) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(1, n);
}

RunResult run(const ScenarioConfig& config, std::size_t threads) {
  const auto sys = config.build_system();
  RunResult r;
  r.config_hash = config.hash();
  r.name = config.outputs.name;
  r.mode = config.protocol.mode;
  r.diagnostics.dt = config.integrator.dt > 0 ? config.integrator.dt : sys.default_dt();
  r.diagnostics.n_modes = sys.modes.size();
  if (config.protocol.mode == RunMode::passes) return run_passes(config, sys, std::move(r));
  return run_time_series(config, sys, std::max<std::size_t>(threads, 1), std::move(r));
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const SweepPoint& p) { return !p.result; }));
}

namespace {

fs::path point_stem(const fs::path& dir, const std::string& name, std::size_t i) {
  return dir / fmt::format("{}_{:03}", name, i);
}

}  // namespace

SweepResult sweep(const ScenarioConfig& config, std::size_t threads, const std::optional<fs::path>& out_dir) {
  if (!config.sweep) throw ConfigError("sweep: the config has no [sweep] section");
  const auto& sw = *config.sweep;
  SweepResult result;
  result.parameter = sw.parameter;
  result.points.resize(sw.values.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < sw.values.size(); i = next.fetch_add(1)) {
      auto& pt = result.points[i];
      pt.value = sw.values[i];
      try {
        const auto cfg = with_override(config, sw.parameter, sw.values[i]);
        pt.result = run(cfg, 1);
        if (out_dir) write_run(*pt.result, cfg, point_stem(*out_dir, config.outputs.name, i));
      } catch (const std::exception& e) {
        pt.result.reset();
        pt.error = describe(e);
        if (out_dir) {
          try {
            write_atomic(point_stem(*out_dir, config.outputs.name, i).string() + ".err", pt.error + "\n");
          } catch (const std::exception&) {
            // the index still records the failure
          }
        }
      }
    }
  };
  const std::size_t n = std::min(resolve_threads(threads), std::max<std::size_t>(sw.values.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
  }
  if (out_dir) {
    Formats f{config.outputs.dat, config.outputs.csv};
    emit_plotdata(sweep_table(result), *out_dir / (config.outputs.name + "_index"), f);
  }
  return result;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.10g}", v);
}

Table series_table(const RunResult& r) {
  Table t;
  t.title = r.mode == RunMode::passes ? "thermalization curve" : "detector time series";
  t.comments = {units_line, "config hash: " + r.config_hash,
                fmt::format("modes: {}, dt: {}", r.diagnostics.n_modes, format_number(r.diagnostics.dt)),
                "T_final: " + format_number(r.summary.T_final)};
  if (r.mode == RunMode::passes) {
    t.comments.push_back(fmt::format("T_ss: {} (converged: {})", format_number(r.summary.T_ss), r.summary.ss_converged));
    t.comments.push_back("T_limit: " + format_number(r.summary.T_limit));
    t.columns = {"pass", "nbar", "T[omega_u]"};
  } else {
    t.comments.push_back("oscillation metric: " + format_number(r.summary.oscillation));
    t.comments.push_back("T_mean_tail: " + format_number(r.summary.T_mean_tail));
    t.columns = {"t[1/omega_u]", "nbar", "T[omega_u]"};
  }
  t.comments.push_back(fmt::format("min uncertainty eigenvalue: {}, integrator error: {}",
                                   format_number(r.diagnostics.min_uncertainty),
                                   format_number(r.diagnostics.integrator_error)));
  for (const auto& row : r.series) t.rows.push_back({format_number(row.x), format_number(row.nbar), format_number(row.T)});
  return t;
}

Table sweep_table(const SweepResult& s) {
  Table t;
  t.title = "sweep index over " + s.parameter;
  t.comments = {units_line, "status: 1 ok, 0 failed (see the matching .err file)"};
  t.columns = {"point", s.parameter, "status", "T_final[omega_u]", "T_ss[omega_u]", "ss_converged", "T_limit[omega_u]",
               "oscillation", "T_mean_tail[omega_u]"};
  std::vector<GapTemperature> scan;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& p = s.points[i];
    if (!p.result) {
      t.rows.push_back({std::to_string(i), p.value, "0", "nan", "nan", "0", "nan", "nan", "nan"});
      t.comments.push_back(fmt::format("point {} failed: {}", i, p.error));
      continue;
    }
    const auto& m = p.result->summary;
    const double T = p.result->mode == RunMode::passes ? m.T_ss : m.T_mean_tail;
    if (const double x = std::strtod(p.value.c_str(), nullptr); std::isfinite(T)) scan.push_back({x, T});
    t.rows.push_back({std::to_string(i), p.value, "1", format_number(m.T_final), format_number(m.T_ss),
                      m.ss_converged ? "1" : "0", format_number(m.T_limit), format_number(m.oscillation),
                      format_number(m.T_mean_tail)});
  }
  if (scan.size() >= 3) {
    const auto v = thermality_scan(scan);
    t.comments.push_back(fmt::format("relative spread (max - min) / mean of the steady temperature: {} (mean {})",
                                     format_number(v.relative_spread), format_number(v.mean_T)));
  }
  return t;
}

void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + unique_suffix();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<fs::path> emit_plotdata(const Table& table, const fs::path& stem, Formats formats) {
  std::vector<fs::path> written;
  if (formats.dat) {
    std::vector<std::size_t> width(table.columns.size());
    for (std::size_t j = 0; j < width.size(); ++j) width[j] = table.columns[j].size();
    for (const auto& row : table.rows)
      for (std::size_t j = 0; j < row.size() && j < width.size(); ++j) width[j] = std::max(width[j], row[j].size());
    std::string o = "# " + table.title + "\n";
    for (const auto& c : table.comments) o += "# " + c + "\n";
    o += "#";
    for (std::size_t j = 0; j < width.size(); ++j) o += fmt::format(" {:>{}}", table.columns[j], width[j]);
    o += "\n";
    for (const auto& row : table.rows) {
      o += " ";
      for (std::size_t j = 0; j < row.size(); ++j) o += fmt::format(" {:>{}}", row[j], j < width.size() ? width[j] : 0);
      o += "\n";
    }
    const fs::path p = stem.string() + ".dat";
    write_atomic(p, o);
    written.push_back(p);
  }
  if (formats.csv) {
    std::string o;
    for (std::size_t j = 0; j < table.columns.size(); ++j) o += (j ? "," : "") + table.columns[j];
    o += "\n";
    for (const auto& row : table.rows) {
      for (std::size_t j = 0; j < row.size(); ++j) o += (j ? "," : "") + row[j];
      o += "\n";
    }
    const fs::path p = stem.string() + ".csv";
    write_atomic(p, o);
    written.push_back(p);
  }
  return written;
}

std::vector<fs::path> write_run(const RunResult& result, const ScenarioConfig& config, const fs::path& stem) {
  auto files = emit_plotdata(series_table(result), stem, {config.outputs.dat, config.outputs.csv});
  const fs::path ini = stem.string() + ".ini";
  write_atomic(ini, config.canonical_text());
  files.push_back(ini);
  return files;
}

Table dispersion_table(double c_s, double m, double k_max, std::size_t samples) {
  if (!(k_max > 0) || samples < 1) throw std::domain_error("dispersion_table: need k_max > 0 and samples >= 1");
  Table t;
  t.title = "Bogoliubov dispersion";
  t.comments = {units_line, fmt::format("c_s = {}, m = {}, k_c = {}", format_number(c_s), format_number(m),
                                        format_number(m * c_s))};
  if (const auto kd = divergence_wavevector(1.0, c_s, m, k_max))
    t.comments.push_back("omega - c_s k reaches omega_u (detector gap 1) at k = " + format_number(*kd));
  t.columns = {"k[omega_u/c_s]", "omega[omega_u]", "u", "v", "gap_correction[omega_u]"};
  for (std::size_t i = 1; i <= samples; ++i) {
    const double k = k_max * static_cast<double>(i) / static_cast<double>(samples);
    const auto uv = bogoliubov_coefficients(k, c_s, m);
    t.rows.push_back({format_number(k), format_number(dispersion(k, c_s, m)), format_number(uv.u), format_number(uv.v),
                      format_number(gap_correction(k, c_s, m))});
  }
  return t;
}

AmplitudeScan amplitude_scan(double omega_k, double a, double c_s, const std::vector<double>& gaps, double pad,
                             const QuadratureOptions& opts) {
  AmplitudeScan s;
  for (double wd : gaps) {
    const auto win = saddle_window(omega_k, wd, a, c_s, pad);
    s.data.push_back({wd, transition_amplitude(omega_k, wd, a, c_s, Channel::excitation, win, opts).probability(),
                      transition_amplitude(omega_k, wd, a, c_s, Channel::deexcitation, win, opts).probability()});
    s.analytic_exc.push_back(analytic_probability(wd, a, c_s, Channel::excitation));
    s.analytic_deexc.push_back(analytic_probability(wd, a, c_s, Channel::deexcitation));
  }
  s.fit = detailed_balance_fit(s.data);
  return s;
}

Table amplitude_table(const AmplitudeScan& scan, double omega_k, double a) {
  Table t;
  t.title = "first-order transition probabilities";
  t.comments = {units_line, fmt::format("omega_k = {}, a = {}", format_number(omega_k), format_number(a)),
                fmt::format("detailed balance fit: T = {} (slope {} +- {})", format_number(scan.fit.temperature),
                            format_number(scan.fit.slope), format_number(scan.fit.slope_error))};
  t.columns = {"omega_d[omega_u]", "P_exc", "P_deexc", "P_exc_analytic", "P_deexc_analytic", "ln(P_exc/P_deexc)"};
  for (std::size_t i = 0; i < scan.data.size(); ++i) {
    const auto& d = scan.data[i];
    t.rows.push_back({format_number(d.omega_d), format_number(d.p_exc), format_number(d.p_deexc),
                      format_number(scan.analytic_exc[i]), format_number(scan.analytic_deexc[i]),
                      format_number(std::log(d.p_exc / d.p_deexc))});
  }
  return t;
}

}  // namespace unruhbec
