// Command-line front end: run, sweep, preset, dispersion, amplitudes, validate.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "unruhbec/config.hpp"
#include "unruhbec/presets.hpp"
#include "unruhbec/scenario.hpp"

using namespace unruhbec;
namespace fs = std::filesystem;

namespace {

constexpr int exit_config = 1;
constexpr int exit_runtime = 2;

struct Common {
  std::string config;
  std::string out = ".";
  std::size_t threads = 0;
  double dt = 0.0;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "scenario file");
  if (needs_config) opt->required();
  cmd->add_option("--out", c.out, "output root; every path is relative to it");
  cmd->add_option("--threads", c.threads, "worker count, 0 = all cores (capped by UNRUHBEC_MAX_THREADS)");
  cmd->add_option("--dt", c.dt, "integrator step override")->check(CLI::PositiveNumber);
}

ScenarioConfig set_key(const ScenarioConfig& c, const std::string& key, const std::string& value) {
  RawConfig raw = c.raw;
  const auto q = qualify_key(key);
  const auto dot = q.find('.');
  raw[q.substr(0, dot)][q.substr(dot + 1)].value = value;
  return load_config(raw);
}

ScenarioConfig apply_dt(ScenarioConfig c, double dt) {
  return dt > 0 ? set_key(c, "integrator.dt", fmt::format("{}", dt)) : c;
}

fs::path output_dir(const Common& c, const ScenarioConfig& cfg) {
  return (fs::path(c.out) / cfg.outputs.directory).lexically_normal();
}

void print_run(const RunResult& r) {
  const auto& s = r.summary;
  if (r.mode == RunMode::passes)
    fmt::print("{}: T_final {}  T_ss {} ({})  T_limit {}\n", r.name, format_number(s.T_final), format_number(s.T_ss),
               s.ss_converged ? "converged" : "not converged", format_number(s.T_limit));
  else
    fmt::print("{}: T_final {}  T_mean_tail {}  oscillation {}\n", r.name, format_number(s.T_final),
               format_number(s.T_mean_tail), format_number(s.oscillation));
}

int do_run(const ScenarioConfig& cfg, const Common& c) {
  const auto r = run(cfg, resolve_threads(c.threads));
  for (const auto& f : write_run(r, cfg, output_dir(c, cfg) / cfg.outputs.name)) fmt::print("wrote {}\n", f.string());
  print_run(r);
  return 0;
}

int do_sweep(const ScenarioConfig& cfg, const Common& c) {
  const auto dir = output_dir(c, cfg);
  const auto s = sweep(cfg, c.threads, dir);
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& p = s.points[i];
    fmt::print("  [{}] {} = {}: ", i, s.parameter, p.value);
    if (p.result) print_run(*p.result);
    else fmt::print("FAILED ({})\n", p.error);
  }
  fmt::print("wrote {}\n", (dir / (cfg.outputs.name + "_index")).string());
  return s.failures() ? exit_runtime : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated detector in a condensate: scenario runner"};
  app.require_subcommand(1);

  Common common;
  auto* run_cmd = app.add_subcommand("run", "run the base scenario of a config (ignores [sweep])");
  add_common(run_cmd, common, true);

  std::string sweep_param, sweep_values;
  auto* sweep_cmd = app.add_subcommand("sweep", "run every point of the config's sweep axis");
  add_common(sweep_cmd, common, true);
  sweep_cmd->add_option("--parameter", sweep_param, "override the sweep parameter (section.key)");
  sweep_cmd->add_option("--values", sweep_values, "override the sweep values ('1, 2' or 'start:stop:count')");

  std::string preset_name;
  bool preset_print = false;
  auto* preset_cmd = app.add_subcommand("preset", "run a named preset");
  add_common(preset_cmd, common, false);
  preset_cmd->add_option("name", preset_name, "preset name")->required();
  preset_cmd->add_flag("--print", preset_print, "print the preset's configs instead of running them");

  auto* list_cmd = app.add_subcommand("presets", "list the presets");

  double disp_k_max = 0.0, disp_m = 0.0, disp_c = 1.0;
  std::size_t disp_samples = 200;
  auto* disp_cmd = app.add_subcommand("dispersion", "tabulate omega(k), u_k, v_k and the gap correction");
  add_common(disp_cmd, common, false);
  disp_cmd->add_option("--m", disp_m, "atom mass (default from --config or 500)");
  disp_cmd->add_option("--c-s", disp_c, "speed of sound");
  disp_cmd->add_option("--k-max", disp_k_max, "largest wavevector (default 3 m c_s)");
  disp_cmd->add_option("--samples", disp_samples, "number of rows")->check(CLI::PositiveNumber);

  double amp_a = 2.0, amp_k = 400.0, amp_pad = 5.0;
  std::string amp_gaps = "0.6, 0.8, 1.0, 1.2, 1.4";
  auto* amp_cmd = app.add_subcommand("amplitudes", "first-order transition probabilities and detailed balance");
  add_common(amp_cmd, common, false);
  amp_cmd->add_option("--a", amp_a, "acceleration")->check(CLI::PositiveNumber);
  amp_cmd->add_option("--omega-k", amp_k, "mode frequency")->check(CLI::PositiveNumber);
  amp_cmd->add_option("--gaps", amp_gaps, "detector gaps ('0.6, 1' or 'start:stop:count')");
  amp_cmd->add_option("--pad", amp_pad, "window half-widths around the saddle")->check(CLI::PositiveNumber);

  std::string validate_preset;
  auto* validate_cmd = app.add_subcommand("validate", "check a config (or a preset) and print it with defaults");
  add_common(validate_cmd, common, false);
  validate_cmd->add_option("--preset", validate_preset, "validate a preset instead of a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (*run_cmd) return do_run(apply_dt(load_config_file(common.config), common.dt), common);

    if (*sweep_cmd) {
      auto cfg = apply_dt(load_config_file(common.config), common.dt);
      if (!sweep_param.empty()) cfg = set_key(cfg, "sweep.parameter", sweep_param);
      if (!sweep_values.empty()) cfg = set_key(cfg, "sweep.values", sweep_values);
      if (!cfg.sweep) throw ConfigError("sweep: no [sweep] section and no --parameter/--values given");
      return do_sweep(cfg, common);
    }

    if (*list_cmd) {
      for (const auto& p : presets()) fmt::print("{:8} {}\n", p.name, p.description);
      return 0;
    }

    if (*preset_cmd) {
      const auto& preset = find_preset(preset_name);
      if (preset_print) {
        for (const auto& job : preset.jobs) fmt::print("; --- {} ---{}\n", job.label, job.config_text);
        return 0;
      }
      int status = 0;
      for (auto cfg : expand_preset(preset)) {
        cfg = apply_dt(cfg, common.dt);
        fmt::print("{} / {}\n", preset.name, cfg.outputs.name);
        status = std::max(status, cfg.sweep ? do_sweep(cfg, common) : do_run(cfg, common));
      }
      return status;
    }

    if (*disp_cmd) {
      double m = disp_m, c_s = disp_c;
      if (!common.config.empty()) {
        const auto cfg = load_config_file(common.config);
        if (m <= 0) m = cfg.params.m;
        c_s = cfg.params.c_s;
      }
      if (m <= 0) m = 500.0;
      const double k_max = disp_k_max > 0 ? disp_k_max : 3.0 * m * c_s;
      const auto stem = fs::path(common.out) / "dispersion";
      for (const auto& f : emit_plotdata(dispersion_table(c_s, m, k_max, disp_samples), stem)) fmt::print("wrote {}\n", f.string());
      return 0;
    }

    if (*amp_cmd) {
      std::vector<double> gaps;
      for (const auto& g : parse_value_list(amp_gaps)) {
        std::size_t used = 0;
        double v = 0;
        try {
          v = std::stod(g, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != g.size() || !(v > 0)) throw ConfigError("--gaps: '" + g + "' is not a positive number");
        gaps.push_back(v);
      }
      const auto scan = amplitude_scan(amp_k, amp_a, 1.0, gaps, amp_pad);
      const auto stem = fs::path(common.out) / "amplitudes";
      for (const auto& f : emit_plotdata(amplitude_table(scan, amp_k, amp_a), stem)) fmt::print("wrote {}\n", f.string());
      fmt::print("detailed balance temperature {} (a / 2 pi = {})\n", format_number(scan.fit.temperature),
                 format_number(amp_a / (2 * 3.141592653589793)));
      return 0;
    }

    if (*validate_cmd) {
      if (!validate_preset.empty()) {
        for (const auto& cfg : expand_preset(find_preset(validate_preset)))
          fmt::print("; {} (hash {})\n{}\n", cfg.outputs.name, cfg.hash(), cfg.canonical_text());
        return 0;
      }
      if (common.config.empty()) throw ConfigError("validate: give --config or --preset");
      const auto cfg = apply_dt(load_config_file(common.config), common.dt);
      fmt::print("; hash {}\n{}", cfg.hash(), cfg.canonical_text());
      return 0;
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return exit_config;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_runtime;
  }
  return 0;
}
