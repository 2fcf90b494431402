#include "unruhbec/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace unruhbec {

namespace {

struct KeySpec {
  const char* section;
  const char* key;
};

// Every accepted key. Defaults live in the typed structs.
constexpr KeySpec known_keys[] = {
    {"params", "c_s"},           {"params", "a"},
    {"params", "m"},             {"params", "omega_d"},
    {"params", "g"},             {"params", "gamma"},
    {"params", "T_pass"},        {"params", "T_bec"},
    {"modes", "dimension"},      {"modes", "L"},
    {"modes", "N"},              {"modes", "k_max"},
    {"modes", "k_min"},          {"modes", "dispersion"},
    {"trajectory", "kind"},      {"trajectory", "v"},
    {"trajectory", "R"},         {"trajectory", "omega_rot"},
    {"trajectory", "direction"}, {"trajectory", "x0"},
    {"trajectory", "y0"},        {"trajectory", "hold_before_start"},
    {"schedule", "gamma_on"},    {"schedule", "gamma_off"},
    {"schedule", "plateau_start"}, {"schedule", "plateau_length"},
    {"schedule", "mean_field"},  {"schedule", "drive"},
    {"schedule", "modulation"},  {"protocol", "mode"},
    {"protocol", "n_reps"},      {"protocol", "field_reset"},
    {"protocol", "detector_init"}, {"protocol", "T0"},
    {"protocol", "mirror_return"}, {"protocol", "exclude_displacement"},
    {"protocol", "steady_fraction"}, {"protocol", "t_max"},
    {"protocol", "samples"},     {"protocol", "metric_from"},
    {"integrator", "dt"},
    {"integrator", "error_estimate"}, {"outputs", "directory"},
    {"outputs", "name"},         {"outputs", "formats"},
    {"sweep", "parameter"},      {"sweep", "values"},
};

bool is_known(const std::string& section, const std::string& key) {
  return std::any_of(std::begin(known_keys), std::end(known_keys),
                     [&](const KeySpec& k) { return section == k.section && key == k.key; });
}

bool is_known_section(const std::string& section) {
  return std::any_of(std::begin(known_keys), std::end(known_keys),
                     [&](const KeySpec& k) { return section == k.section; });
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Typed access to the user's entries with line-numbered errors.
class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  const ConfigEntry* find(const char* section, const char* key) const {
    const auto s = raw_.find(section);
    if (s == raw_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }
  bool has(const char* section, const char* key) const { return find(section, key) != nullptr; }

  double number(const char* section, const char* key, double fallback) const {
    const auto* e = find(section, key);
    if (!e) return fallback;
    double v = 0.0;
    const auto& s = e->value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      fail(*e, section, key, "expected a finite number");
    return v;
  }

  std::size_t integer(const char* section, const char* key, std::size_t fallback) const {
    const auto* e = find(section, key);
    if (!e) return fallback;
    std::size_t v = 0;
    const auto& s = e->value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(*e, section, key, "expected a non-negative integer");
    return v;
  }

  bool boolean(const char* section, const char* key, bool fallback) const {
    const auto* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    fail(*e, section, key, "expected true or false");
  }

  std::string text(const char* section, const char* key, const std::string& fallback) const {
    const auto* e = find(section, key);
    return e ? e->value : fallback;
  }

  template <class E>
  E choice(const char* section, const char* key, E fallback,
           std::initializer_list<std::pair<const char*, E>> options) const {
    const auto* e = find(section, key);
    if (!e) return fallback;
    std::string names;
    for (const auto& [name, value] : options) {
      if (e->value == name) return value;
      names += names.empty() ? name : std::string(", ") + name;
    }
    fail(*e, section, key, "expected one of " + names);
  }

  [[noreturn]] static void fail(const ConfigEntry& e, const char* section, const char* key, const std::string& msg) {
    throw ConfigError(fmt::format("line {}: {}.{}: {}", e.line, section, key, msg), e.line);
  }

 private:
  const RawConfig& raw_;
};

[[noreturn]] void invalid(const std::string& msg) { throw ConfigError(msg); }

void require(bool cond, const std::string& msg) {
  if (!cond) invalid(msg);
}

const char* name_of(Dispersion d) { return d == Dispersion::linear ? "linear_cutoff" : "full_bogoliubov"; }

const char* name_of(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::uniform: return "uniform";
    case TrajectoryKind::effective_unruh: return "effective_unruh";
    case TrajectoryKind::relativistic: return "relativistic";
    case TrajectoryKind::circular: return "circular";
    case TrajectoryKind::custom: return "custom";
  }
  return "?";
}

const char* name_of(FieldReset r) {
  switch (r) {
    case FieldReset::vacuum: return "vacuum";
    case FieldReset::thermal: return "thermal";
    case FieldReset::keep: return "keep";
  }
  return "?";
}

std::string num(double v) { return fmt::format("{}", v); }
const char* flag(bool b) { return b ? "true" : "false"; }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Fills everything except the sweep; no cross-point checks.
ScenarioConfig load_point(const RawConfig& raw) {
  const Reader r(raw);
  ScenarioConfig c;
  c.raw = raw;

  auto& p = c.params;
  p.c_s = r.number("params", "c_s", 1.0);
  p.a = r.number("params", "a", 2.0);
  p.m = r.number("params", "m", 1.0e6);
  p.omega_d = r.number("params", "omega_d", 1.0);
  p.delta = p.omega_d;
  p.g = r.number("params", "g", 0.02);
  p.gamma = r.number("params", "gamma", 0.0);
  p.T_pass = r.number("params", "T_pass", 1.0);
  p.T_bec = r.number("params", "T_bec", 0.0);

  auto& grid = c.modes.grid;
  grid.dimension = static_cast<int>(r.integer("modes", "dimension", 1));
  grid.L = r.number("modes", "L", 1.0);
  grid.N = r.integer("modes", "N", 20);
  grid.k_max = r.number("modes", "k_max", 0.0);
  grid.k_min = r.number("modes", "k_min", 0.0);
  grid.dispersion = r.choice("modes", "dispersion", Dispersion::linear,
                             {{"linear_cutoff", Dispersion::linear},
                              {"linear", Dispersion::linear},
                              {"full_bogoliubov", Dispersion::bogoliubov},
                              {"bogoliubov", Dispersion::bogoliubov}});
  p.L = grid.L;

  auto& t = c.trajectory;
  t.kind = r.choice("trajectory", "kind", TrajectoryKind::effective_unruh,
                    {{"effective_unruh", TrajectoryKind::effective_unruh},
                     {"relativistic", TrajectoryKind::relativistic},
                     {"uniform", TrajectoryKind::uniform},
                     {"circular", TrajectoryKind::circular}});
  t.c_s = p.c_s;
  t.a = p.a;
  t.v = r.number("trajectory", "v", 0.0);
  t.omega_rot = r.number("trajectory", "omega_rot", 1.0);
  t.R = r.number("trajectory", "R", 0.0);
  if (t.kind == TrajectoryKind::circular && !r.has("trajectory", "R") && r.has("trajectory", "v"))
    t.R = t.v / t.omega_rot;
  if (t.kind == TrajectoryKind::circular) t.v = t.R * t.omega_rot;
  t.direction = r.number("trajectory", "direction", 1.0);
  t.origin = {r.number("trajectory", "x0", 0.0), r.number("trajectory", "y0", 0.0)};
  t.hold_before_start = r.boolean("trajectory", "hold_before_start", true);

  auto& pr = c.protocol;
  pr.mode = r.choice("protocol", "mode", RunMode::passes,
                     {{"passes", RunMode::passes}, {"time_series", RunMode::time_series}});
  pr.n_reps = r.integer("protocol", "n_reps", 1);
  pr.field_reset = r.choice("protocol", "field_reset", FieldReset::vacuum,
                            {{"vacuum", FieldReset::vacuum}, {"thermal", FieldReset::thermal}, {"keep", FieldReset::keep}});
  pr.detector_init = r.choice("protocol", "detector_init", DetectorInit::vacuum,
                              {{"vacuum", DetectorInit::vacuum}, {"thermal", DetectorInit::thermal}});
  pr.T0 = r.number("protocol", "T0", 0.0);
  pr.mirror_return = r.boolean("protocol", "mirror_return", false);
  pr.exclude_displacement = r.boolean("protocol", "exclude_displacement", false);
  pr.steady_fraction = r.number("protocol", "steady_fraction", 0.2);
  pr.t_max = r.number("protocol", "t_max", 0.0);
  pr.samples = r.integer("protocol", "samples", 40);
  pr.metric_from = r.number("protocol", "metric_from", 0.5);
  p.n_reps = pr.n_reps;

  auto& s = c.schedule;
  s.gamma_on = r.number("schedule", "gamma_on", p.gamma);
  s.gamma_off = r.number("schedule", "gamma_off", p.gamma);
  s.plateau_start = r.number("schedule", "plateau_start", 0.0);
  s.plateau_length =
      r.number("schedule", "plateau_length", pr.mode == RunMode::time_series && pr.t_max > 0 ? pr.t_max : p.T_pass);
  s.mean_field = r.choice("schedule", "mean_field", MeanField::cancelled,
                          {{"cancelled", MeanField::cancelled}, {"drive", MeanField::drive}});
  s.drive = r.number("schedule", "drive", 0.0);
  s.modulation = r.choice("schedule", "modulation", Modulation::constant,
                          {{"constant", Modulation::constant}, {"proper_time_rate", Modulation::proper_time_rate}});

  auto& in = c.integrator;
  in.dt = r.number("integrator", "dt", 0.0);
  in.error_estimate = r.boolean("integrator", "error_estimate", true);

  auto& out = c.outputs;
  out.directory = r.text("outputs", "directory", ".");
  out.name = r.text("outputs", "name", "run");
  if (const auto* e = r.find("outputs", "formats")) {
    out.dat = out.csv = false;
    for (const auto& f : parse_value_list(e->value)) {
      if (f == "dat") out.dat = true;
      else if (f == "csv") out.csv = true;
      else Reader::fail(*e, "outputs", "formats", "unknown format '" + f + "' (dat, csv)");
    }
  }

  // Preconditions of the modules the scenario will call.
  try {
    p.validate();
  } catch (const std::domain_error& e) {
    invalid(std::string("[params] ") + e.what());
  }
  if (grid.dimension == 1) {
    require(grid.N > 0 && grid.N % 2 == 0, "modes.N must be even and positive in 1D (mode_grid precondition)");
  } else if (grid.dimension == 2) {
    require(grid.k_max > 0, "modes.k_max must be positive in 2D (mode_grid precondition)");
    require(grid.k_min >= 0 && grid.k_min < grid.k_max, "modes: need 0 <= k_min < k_max (mode_grid precondition)");
  } else {
    invalid("modes.dimension must be 1 or 2 (mode_grid precondition)");
  }
  p.N = grid.dimension == 1 ? grid.N : 0;
  require(t.direction == 1.0 || t.direction == -1.0, "trajectory.direction must be +1 or -1");
  if (t.kind == TrajectoryKind::circular) {
    require(grid.dimension == 2, "trajectory.kind = circular needs modes.dimension = 2");
    require(t.R > 0 && t.omega_rot > 0, "circular trajectory needs R > 0 and omega_rot > 0");
  }
  require(s.gamma_on >= 0 && s.gamma_off >= 0, "schedule: ramp widths must be non-negative (SwitchingWindow precondition)");
  require(s.plateau_length > 0 || s.gamma_on + s.gamma_off > 0,
          "schedule: the coupling window must have positive length (SwitchingWindow precondition)");
  require(s.plateau_length >= 0, "schedule.plateau_length must be non-negative");
  require(pr.n_reps >= 1, "protocol.n_reps must be at least 1 (repeat_protocol precondition)");
  require(pr.detector_init == DetectorInit::vacuum || pr.T0 > 0, "protocol.detector_init = thermal needs T0 > 0");
  require(pr.T0 >= 0, "protocol.T0 must be non-negative");
  require(pr.steady_fraction > 0 && pr.steady_fraction <= 1, "protocol.steady_fraction must lie in (0, 1]");
  if (pr.mode == RunMode::time_series) {
    require(pr.t_max > 0, "protocol.mode = time_series needs t_max > 0");
    require(pr.samples >= 2, "protocol.samples must be at least 2");
    require(pr.metric_from >= 0 && pr.metric_from < 1, "protocol.metric_from must lie in [0, 1)");
    require(pr.field_reset != FieldReset::keep, "protocol.mode = time_series needs a vacuum or thermal field");
  }
  require(in.dt >= 0, "integrator.dt must be non-negative");
  require(!out.name.empty() && out.name.find('/') == std::string::npos && out.name != "." && out.name != "..",
          "outputs.name must be a plain file name");
  require(out.dat || out.csv, "outputs.formats must list at least one format");

  try {
    (void)c.build_modes();
  } catch (const std::domain_error& e) {
    invalid(std::string("[modes] ") + e.what());
  }
  return c;
}

}  // namespace

RawConfig parse_ini(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find_first_of("#;");
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(fmt::format("line {}: unterminated section header", n), n);
      section = trim(body.substr(1, body.size() - 2));
      if (!is_known_section(section))
        throw ConfigError(fmt::format("line {}: unknown section [{}]", n, section), n);
      raw[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", n), n);
    if (section.empty()) throw ConfigError(fmt::format("line {}: key outside of a section", n), n);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", n), n);
    if (value.empty()) throw ConfigError(fmt::format("line {}: {}.{} has no value", n, section, key), n);
    if (!is_known(section, key)) throw ConfigError(fmt::format("line {}: unknown key {}.{}", n, section, key), n);
    auto& sec = raw[section];
    if (const auto it = sec.find(key); it != sec.end())
      throw ConfigError(fmt::format("line {}: {}.{} already set on line {}", n, section, key, it->second.line), n);
    sec[key] = {value, n};
  }
  return raw;
}

std::vector<std::string> parse_value_list(const std::string& text) {
  std::vector<std::string> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    double start = 0, stop = 0;
    std::size_t count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    in >> start >> c1 >> stop >> c2 >> count;
    if (!in || c1 != ':' || c2 != ':' || count < 1 || !(in >> std::ws).eof())
      throw ConfigError("range must read start:stop:count");
    for (std::size_t i = 0; i < count; ++i) {
      const double v = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
      out.push_back(fmt::format("{:.12g}", v));
    }
    return out;
  }
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty item in list '" + text + "'");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::string qualify_key(const std::string& key) {
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    const auto s = key.substr(0, dot), k = key.substr(dot + 1);
    if (!is_known(s, k)) throw ConfigError("unknown key " + key);
    return key;
  }
  std::string found;
  for (const auto& k : known_keys)
    if (key == k.key) {
      if (!found.empty()) throw ConfigError("ambiguous key '" + key + "'; qualify it as section.key");
      found = std::string(k.section) + "." + k.key;
    }
  if (found.empty()) throw ConfigError("unknown key " + key);
  return found;
}

ScenarioConfig load_config(const RawConfig& raw) {
  ScenarioConfig c = load_point(raw);
  const Reader r(raw);
  const bool has_param = r.has("sweep", "parameter"), has_values = r.has("sweep", "values");
  if (has_param != has_values) invalid("[sweep] needs both parameter and values");
  if (!has_param) return c;

  SweepConfig sw;
  const auto* pe = r.find("sweep", "parameter");
  const auto* ve = r.find("sweep", "values");
  try {
    sw.parameter = qualify_key(pe->value);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("line {}: sweep.parameter: {}", pe->line, e.what()), pe->line);
  }
  if (sw.parameter.starts_with("sweep.") || sw.parameter.starts_with("outputs."))
    Reader::fail(*pe, "sweep", "parameter", "cannot sweep " + sw.parameter);
  try {
    sw.values = parse_value_list(ve->value);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("line {}: sweep.values: {}", ve->line, e.what()), ve->line);
  }
  // Every point must be valid before anything runs.
  for (const auto& v : sw.values) {
    try {
      (void)with_override(c, sw.parameter, v);
    } catch (const ConfigError& e) {
      invalid(fmt::format("sweep point {} = {}: {}", sw.parameter, v, e.what()));
    }
  }
  c.sweep = std::move(sw);
  return c;
}

ScenarioConfig with_override(const ScenarioConfig& base, const std::string& parameter, const std::string& value) {
  const auto q = qualify_key(parameter);
  const auto dot = q.find('.');
  RawConfig raw = base.raw;
  raw.erase("sweep");
  auto& entry = raw[q.substr(0, dot)][q.substr(dot + 1)];
  entry.value = value;
  return load_point(raw);
}

ScenarioConfig load_config_text(const std::string& text) { return load_config(parse_ini(text)); }

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str());
}

std::string ScenarioConfig::canonical_text() const {
  std::string o;
  auto kv = [&](const char* k, const std::string& v) { o += fmt::format("{} = {}\n", k, v); };
  o += "[params]\n";
  kv("c_s", num(params.c_s));
  kv("a", num(params.a));
  kv("m", num(params.m));
  kv("omega_d", num(params.omega_d));
  kv("g", num(params.g));
  kv("gamma", num(params.gamma));
  kv("T_pass", num(params.T_pass));
  kv("T_bec", num(params.T_bec));
  o += "\n[modes]\n";
  kv("dimension", num(modes.grid.dimension));
  kv("L", num(modes.grid.L));
  if (modes.grid.dimension == 1) {
    kv("N", num(static_cast<double>(modes.grid.N)));
  } else {
    kv("k_max", num(modes.grid.k_max));
    kv("k_min", num(modes.grid.k_min));
  }
  kv("dispersion", name_of(modes.grid.dispersion));
  o += "\n[trajectory]\n";
  kv("kind", name_of(trajectory.kind));
  if (trajectory.kind == TrajectoryKind::uniform) kv("v", num(trajectory.v));
  if (trajectory.kind == TrajectoryKind::circular) {
    kv("R", num(trajectory.R));
    kv("omega_rot", num(trajectory.omega_rot));
  }
  kv("direction", num(trajectory.direction));
  kv("x0", num(trajectory.origin[0]));
  kv("y0", num(trajectory.origin[1]));
  kv("hold_before_start", flag(trajectory.hold_before_start));
  o += "\n[schedule]\n";
  kv("gamma_on", num(schedule.gamma_on));
  kv("gamma_off", num(schedule.gamma_off));
  kv("plateau_start", num(schedule.plateau_start));
  kv("plateau_length", num(schedule.plateau_length));
  kv("mean_field", schedule.mean_field == MeanField::drive ? "drive" : "cancelled");
  if (schedule.mean_field == MeanField::drive) kv("drive", num(schedule.drive));
  kv("modulation", schedule.modulation == Modulation::constant ? "constant" : "proper_time_rate");
  o += "\n[protocol]\n";
  kv("mode", protocol.mode == RunMode::passes ? "passes" : "time_series");
  if (protocol.mode == RunMode::passes) {
    kv("n_reps", num(static_cast<double>(protocol.n_reps)));
    kv("mirror_return", flag(protocol.mirror_return));
    kv("steady_fraction", num(protocol.steady_fraction));
  } else {
    kv("t_max", num(protocol.t_max));
    kv("samples", num(static_cast<double>(protocol.samples)));
    kv("metric_from", num(protocol.metric_from));
  }
  kv("field_reset", name_of(protocol.field_reset));
  kv("detector_init", protocol.detector_init == DetectorInit::vacuum ? "vacuum" : "thermal");
  if (protocol.detector_init == DetectorInit::thermal) kv("T0", num(protocol.T0));
  kv("exclude_displacement", flag(protocol.exclude_displacement));
  o += "\n[integrator]\n";
  kv("dt", num(integrator.dt));
  kv("error_estimate", flag(integrator.error_estimate));
  o += "\n[outputs]\n";
  kv("directory", outputs.directory);
  kv("name", outputs.name);
  kv("formats", outputs.dat && outputs.csv ? "dat, csv" : outputs.dat ? "dat" : "csv");
  if (sweep) {
    o += "\n[sweep]\n";
    kv("parameter", sweep->parameter);
    std::string vals;
    for (const auto& v : sweep->values) vals += (vals.empty() ? "" : ", ") + v;
    kv("values", vals);
  }
  return o;
}

std::string ScenarioConfig::hash() const {
  const std::string text = canonical_text();
  const auto cut = text.find("\n[outputs]");
  return fmt::format("{:016x}", fnv1a(text.substr(0, cut)));
}

ModeSet ScenarioConfig::build_modes() const { return mode_grid(modes.grid, params.c_s, params.m); }

DetectorFieldSystem ScenarioConfig::build_system() const {
  DetectorFieldSystem sys;
  sys.detector_freq = params.omega_d;
  sys.modes = build_modes();
  sys.trajectory = trajectory;
  auto& s = sys.schedule;
  s.g0 = params.g;
  s.window = SwitchingWindow::around_plateau(schedule.plateau_start, schedule.plateau_start + schedule.plateau_length,
                                             schedule.gamma_on, schedule.gamma_off);
  s.mean_field = schedule.mean_field;
  s.drive = schedule.drive;
  s.modulation = schedule.modulation;
  s.modulation_a = params.a;
  s.modulation_c_s = params.c_s;
  return sys;
}

}  // namespace unruhbec
