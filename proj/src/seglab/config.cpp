#include "seglab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include "seglab/error.hpp"
#include "seglab/io.hpp"

namespace seglab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_list(const std::string& v, const std::string& what) {
  std::vector<double> out;
  for (const auto& t : split_list(v)) out.push_back(parse_double(t, what));
  if (out.empty()) throw Error(ErrorKind::config, what + ": empty list");
  return out;
}

bool parse_bool(const std::string& v, const std::string& what) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw Error(ErrorKind::config, what + ": expected true or false, got '" + v + "'");
}

int parse_small_int(const std::string& v, const std::string& what) {
  const long long x = parse_int(v, what);
  if (x < -1000000000LL || x > 1000000000LL) throw Error(ErrorKind::config, what + ": out of range");
  return static_cast<int>(x);
}

std::optional<Point> parse_point(const std::string& v, const std::string& what) {
  if (v == "auto") return std::nullopt;
  const auto xs = parse_list(v, what);
  if (xs.size() != 2) throw Error(ErrorKind::config, what + ": expected 'auto' or 'x, y'");
  return Point{xs[0], xs[1]};
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_double(v[k]);
  return s;
}

std::string render_bool(bool b) { return b ? "true" : "false"; }

std::string render_point(const std::optional<Point>& p) {
  return p ? format_double(p->x) + "," + format_double(p->y) : "auto";
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"domain", "preset", "disk", "disk (radius about (0.5, 0.5)) or square (unit square)"},
      {"domain", "n", "129", "nodes per side of the lattice on [0,1]^2"},
      {"domain", "radius", "0.45", "disk radius"},
      {"boundary", "preset", "symmetric_sine", "symmetric_sine, halfcap, two_phase or custom"},
      {"boundary", "c", "1", "halfcap: constant third component"},
      {"boundary", "a1", "1", "two_phase: amplitude of psi1"},
      {"boundary", "a2", "1", "two_phase: amplitude of psi2"},
      {"boundary", "wave", "1", "two_phase: oscillation depth in [0, 1]"},
      {"boundary", "table", "", "custom: CSV with columns theta,psi1,psi2,psi3"},
      {"solver", "beta_schedule", "1,10,100,1000,10000,100000,1000000",
       "increasing beta values of the continuation"},
      {"solver", "lin_tol", "1e-10", "relative residual of each block solve"},
      {"solver", "sweep_tol", "1e-12", "stop when a sweep lowers J by <= sweep_tol*max(1,|J|)"},
      {"solver", "max_sweeps", "500", "sweep budget per stage"},
      {"solver", "max_lin_iter", "50000", "CG iteration budget per block solve"},
      {"solver", "init", "harmonic", "cold start: harmonic extension or zero interior"},
      {"solver", "competitor", "true", "compare each stage with the radial segregated competitor"},
      {"diagnostics", "acf", "true", "ACF scan per stage"},
      {"diagnostics", "acf_perturbed", "true", "perturbed ACF scan per stage"},
      {"diagnostics", "pohozaev", "true", "finite-beta Pohozaev residuals per stage"},
      {"diagnostics", "holder", "true", "Holder seminorms per stage"},
      {"diagnostics", "overlap", "true", "overlap areas per stage"},
      {"diagnostics", "decay", "true", "exponential decay probe per stage"},
      {"diagnostics", "center", "auto", "scan center 'x, y' (auto: lattice center)"},
      {"diagnostics", "radii_count", "32", "log-spaced radii in [4h, dist/2]"},
      {"diagnostics", "nu", "auto", "ACF exponent (auto: sphere search for k = 3)"},
      {"diagnostics", "eps_exponent", "0.1", "exponent loss of the perturbed scan"},
      {"diagnostics", "mono_tol", "1e-3", "relative drop flagged as a violation"},
      {"diagnostics", "seg_tol", "1e-8", "bound on u1*u2*u3 for the ACF hypothesis"},
      {"diagnostics", "threshold", "1e-2", "support threshold, times max psi"},
      {"diagnostics", "threshold_sweep", "0.1,0.01,0.001", "extra overlap thresholds, times max psi"},
      {"diagnostics", "pohozaev_radii", "0.1,0.2", "Pohozaev sphere radii"},
      {"diagnostics", "circle_samples", "720", "samples per circle (multiple of 4)"},
      {"diagnostics", "holder_alpha", "0.5,0.75,0.9", "Holder exponents"},
      {"diagnostics", "holder_radius", "0.3", "Holder region: nodes within this distance of the center"},
      {"diagnostics", "decay_center", "auto", "decay probe center (auto: center + 0.2 at angle pi/3)"},
      {"diagnostics", "decay_component", "2", "decay probe component (1..3)"},
      {"diagnostics", "decay_radius", "0.1", "outer radius of the decay probe"},
      {"diagnostics", "fit_tol", "0.1", "decay probe passes if slope <= -1/2 + fit_tol"},
      {"output", "checkpoints", "true", "write one checkpoint per stage"},
      {"run", "seed", "0", "seed for strided Holder sampling"},
      {"run", "workers", "auto", "worker threads (flag --workers and SEGLAB_WORKERS take precedence)"},
  };
  return keys;
}

std::string config_help() {
  std::ostringstream os;
  os << "Config file keys (key = value, grouped under [section] headers):\n";
  std::string section;
  for (const auto& k : config_keys()) {
    if (k.section != section) {
      section = k.section;
      os << "  [" << section << "]\n";
    }
    std::string lhs = "    " + k.key + " = " + (k.fallback.empty() ? "\"\"" : k.fallback);
    if (lhs.size() < 46) lhs.resize(46, ' ');
    else lhs += "  ";
    os << lhs << k.help << '\n';
  }
  return os.str();
}

RunConfig default_config() {
  RunConfig cfg;
  for (const auto& k : config_keys()) set_config_value(cfg, k.section, k.key, k.fallback);
  cfg.boundary_params.clear();
  return cfg;
}

void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key,
                      const std::string& value) {
  const std::string what = section + "." + key;
  const auto& keys = config_keys();
  const bool known = std::any_of(keys.begin(), keys.end(), [&](const ConfigKey& k) {
    return k.section == section && k.key == key;
  });
  if (!known) {
    const bool section_known = std::any_of(keys.begin(), keys.end(),
                                           [&](const ConfigKey& k) { return k.section == section; });
    throw Error(ErrorKind::config, section_known ? "unknown key '" + key + "' in [" + section + "]"
                                                 : "unknown section [" + section + "]");
  }
  if (section == "domain") {
    if (key == "preset") cfg.domain = value;
    else if (key == "n") cfg.n = parse_small_int(value, what);
    else cfg.radius = parse_double(value, what);
  } else if (section == "boundary") {
    if (key == "preset") cfg.boundary = value;
    else if (key == "table") cfg.table = value;
    else cfg.boundary_params[key] = parse_double(value, what);
  } else if (section == "solver") {
    if (key == "beta_schedule") cfg.schedule = parse_list(value, what);
    else if (key == "lin_tol") cfg.minimize.linear.lin_tol = parse_double(value, what);
    else if (key == "sweep_tol") cfg.minimize.sweep_tol = parse_double(value, what);
    else if (key == "max_sweeps") cfg.minimize.max_sweeps = parse_small_int(value, what);
    else if (key == "max_lin_iter") cfg.minimize.linear.max_iter = parse_small_int(value, what);
    else if (key == "init") cfg.init = value;
    else cfg.competitor = parse_bool(value, what);
  } else if (section == "diagnostics") {
    if (key == "acf") cfg.acf = parse_bool(value, what);
    else if (key == "acf_perturbed") cfg.acf_perturbed = parse_bool(value, what);
    else if (key == "pohozaev") cfg.pohozaev = parse_bool(value, what);
    else if (key == "holder") cfg.holder = parse_bool(value, what);
    else if (key == "overlap") cfg.overlap = parse_bool(value, what);
    else if (key == "decay") cfg.decay = parse_bool(value, what);
    else if (key == "center") cfg.center = parse_point(value, what);
    else if (key == "radii_count") cfg.radii_count = parse_small_int(value, what);
    else if (key == "nu") cfg.nu = value == "auto" ? std::nullopt : std::optional(parse_double(value, what));
    else if (key == "eps_exponent") cfg.eps_exponent = parse_double(value, what);
    else if (key == "mono_tol") cfg.mono_tol = parse_double(value, what);
    else if (key == "seg_tol") cfg.seg_tol = parse_double(value, what);
    else if (key == "threshold") cfg.threshold = parse_double(value, what);
    else if (key == "threshold_sweep") cfg.threshold_sweep = parse_list(value, what);
    else if (key == "pohozaev_radii") cfg.pohozaev_radii = parse_list(value, what);
    else if (key == "circle_samples") cfg.circle_samples = parse_small_int(value, what);
    else if (key == "holder_alpha") cfg.holder_alpha = parse_list(value, what);
    else if (key == "holder_radius") cfg.holder_radius = parse_double(value, what);
    else if (key == "decay_center") cfg.decay_center = parse_point(value, what);
    else if (key == "decay_component") cfg.decay_component = parse_small_int(value, what);
    else if (key == "decay_radius") cfg.decay_radius = parse_double(value, what);
    else cfg.fit_tol = parse_double(value, what);
  } else if (section == "output") {
    cfg.checkpoints = parse_bool(value, what);
  } else {
    if (key == "seed") {
      const long long s = parse_int(value, what);
      if (s < 0) throw Error(ErrorKind::config, what + ": must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else {
      cfg.workers = value == "auto" ? std::nullopt : std::optional(parse_small_int(value, what));
    }
  }
}

void validate_config(const RunConfig& cfg) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::config, m); };
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(std::string(name) + " must be > 0");
  };
  if (cfg.domain != "disk" && cfg.domain != "square") {
    fail("domain.preset: unknown preset '" + cfg.domain + "' (valid: disk, square)");
  }
  if (cfg.n < 5 || cfg.n > 4097) fail("domain.n must lie in [5, 4097]");
  if (cfg.domain == "disk" && !(cfg.radius > 0.0 && cfg.radius < 0.5)) {
    fail("domain.radius must lie in (0, 0.5)");
  }
  static const std::set<std::string> presets{"symmetric_sine", "halfcap", "two_phase", "custom"};
  if (!presets.count(cfg.boundary)) {
    fail("boundary.preset: unknown preset '" + cfg.boundary +
         "' (valid: symmetric_sine, halfcap, two_phase, custom)");
  }
  std::set<std::string> allowed;
  if (cfg.boundary == "halfcap") allowed = {"c"};
  if (cfg.boundary == "two_phase") allowed = {"a1", "a2", "wave"};
  for (const auto& [k, v] : cfg.boundary_params) {
    if (!allowed.count(k)) fail("boundary." + k + " does not apply to preset " + cfg.boundary);
  }
  if (cfg.boundary == "custom" && cfg.table.empty()) fail("boundary.table is required for custom");
  if (cfg.boundary != "custom" && !cfg.table.empty()) fail("boundary.table needs preset = custom");
  try {
    validate_schedule(cfg.schedule);
  } catch (const Error& e) {
    fail(std::string("solver.beta_schedule: ") + e.what());
  }
  positive(cfg.minimize.linear.lin_tol, "solver.lin_tol");
  positive(cfg.minimize.sweep_tol, "solver.sweep_tol");
  if (cfg.minimize.max_sweeps < 1) fail("solver.max_sweeps must be >= 1");
  if (cfg.minimize.linear.max_iter < 1) fail("solver.max_lin_iter must be >= 1");
  if (cfg.init != "harmonic" && cfg.init != "zero") fail("solver.init must be harmonic or zero");
  if (cfg.radii_count < 2) fail("diagnostics.radii_count must be >= 2");
  if (cfg.nu) positive(*cfg.nu, "diagnostics.nu");
  if (!(cfg.eps_exponent >= 0.0)) fail("diagnostics.eps_exponent must be >= 0");
  positive(cfg.mono_tol, "diagnostics.mono_tol");
  if (!(cfg.seg_tol >= 0.0)) fail("diagnostics.seg_tol must be >= 0");
  positive(cfg.threshold, "diagnostics.threshold");
  for (double t : cfg.threshold_sweep) positive(t, "diagnostics.threshold_sweep");
  for (double r : cfg.pohozaev_radii) positive(r, "diagnostics.pohozaev_radii");
  if (cfg.circle_samples < 16 || cfg.circle_samples % 4 != 0) {
    fail("diagnostics.circle_samples must be a multiple of 4 and >= 16");
  }
  for (double a : cfg.holder_alpha) {
    if (!(a > 0.0 && a <= 1.0)) fail("diagnostics.holder_alpha entries must lie in (0, 1]");
  }
  positive(cfg.holder_radius, "diagnostics.holder_radius");
  if (cfg.decay_component < 1 || cfg.decay_component > 3) {
    fail("diagnostics.decay_component must be 1, 2 or 3");
  }
  positive(cfg.decay_radius, "diagnostics.decay_radius");
  if (!(cfg.fit_tol >= 0.0)) fail("diagnostics.fit_tol must be >= 0");
  if (cfg.workers && *cfg.workers < 1) fail("run.workers must be >= 1");
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  RunConfig cfg = default_config();
  std::istringstream in(text);
  std::string line, section;
  std::set<std::string> seen;
  int lineno = 0;
  auto apply = [&](const std::string& key, const std::string& value) {
    const std::string where = name + ":" + std::to_string(lineno) + ": ";
    if (section.empty()) throw Error(ErrorKind::config, where + "key '" + key + "' before any [section]");
    if (!seen.insert(section + "." + key).second) {
      throw Error(ErrorKind::config, where + "duplicate key '" + key + "' in [" + section + "]");
    }
    try {
      set_config_value(cfg, section, key, value);
    } catch (const Error& e) {
      throw Error(ErrorKind::config, where + e.what());
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string::npos) {
        throw Error(ErrorKind::config, name + ":" + std::to_string(lineno) + ": unterminated section header");
      }
      section = trim(line.substr(1, close - 1));
      // Inline `key=value` tokens may follow the header.
      std::istringstream rest(line.substr(close + 1));
      for (std::string tok; rest >> tok;) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw Error(ErrorKind::config, name + ":" + std::to_string(lineno) + ": expected key=value, got '" + tok + "'");
        }
        apply(tok.substr(0, eq), tok.substr(eq + 1));
      }
      if (!std::any_of(config_keys().begin(), config_keys().end(),
                       [&](const ConfigKey& k) { return k.section == section; })) {
        throw Error(ErrorKind::config, name + ":" + std::to_string(lineno) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::config, name + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  try {
    validate_config(cfg);
  } catch (const Error& e) {
    throw Error(ErrorKind::config, name + ": " + e.what());
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::config, e.what());
  }
  return parse_config_text(text, path);
}

std::string RunConfig::render() const {
  std::ostringstream os;
  auto param = [&](const char* k) {
    auto it = boundary_params.find(k);
    return it == boundary_params.end() ? std::string() : format_double(it->second);
  };
  os << "[domain]\npreset = " << domain << "\nn = " << n << "\nradius = " << format_double(radius)
     << "\n\n[boundary]\npreset = " << boundary << '\n';
  for (const char* k : {"c", "a1", "a2", "wave"}) {
    const auto v = param(k);
    if (!v.empty()) os << k << " = " << v << '\n';
  }
  if (!table.empty()) os << "table = " << table << '\n';
  os << "\n[solver]\nbeta_schedule = " << join(schedule)
     << "\nlin_tol = " << format_double(minimize.linear.lin_tol)
     << "\nsweep_tol = " << format_double(minimize.sweep_tol)
     << "\nmax_sweeps = " << minimize.max_sweeps << "\nmax_lin_iter = " << minimize.linear.max_iter
     << "\ninit = " << init << "\ncompetitor = " << render_bool(competitor) << '\n';
  os << "\n[diagnostics]\nacf = " << render_bool(acf) << "\nacf_perturbed = " << render_bool(acf_perturbed)
     << "\npohozaev = " << render_bool(pohozaev) << "\nholder = " << render_bool(holder)
     << "\noverlap = " << render_bool(overlap) << "\ndecay = " << render_bool(decay)
     << "\ncenter = " << render_point(center) << "\nradii_count = " << radii_count
     << "\nnu = " << (nu ? format_double(*nu) : "auto")
     << "\neps_exponent = " << format_double(eps_exponent)
     << "\nmono_tol = " << format_double(mono_tol) << "\nseg_tol = " << format_double(seg_tol)
     << "\nthreshold = " << format_double(threshold) << "\nthreshold_sweep = " << join(threshold_sweep)
     << "\npohozaev_radii = " << join(pohozaev_radii) << "\ncircle_samples = " << circle_samples
     << "\nholder_alpha = " << join(holder_alpha) << "\nholder_radius = " << format_double(holder_radius)
     << "\ndecay_center = " << render_point(decay_center) << "\ndecay_component = " << decay_component
     << "\ndecay_radius = " << format_double(decay_radius) << "\nfit_tol = " << format_double(fit_tol)
     << '\n';
  os << "\n[output]\ncheckpoints = " << render_bool(checkpoints) << "\n\n[run]\nseed = " << seed << '\n';
  return os.str();
}

GridPtr build_grid(const RunConfig& cfg) {
  return cfg.domain == "disk" ? Grid::disk(cfg.n, cfg.radius) : Grid::square(cfg.n);
}

std::shared_ptr<const BoundaryTriplet> build_trace(const RunConfig& cfg, const GridPtr& grid) {
  try {
    if (cfg.boundary == "custom") {
      return std::make_shared<const BoundaryTriplet>(make_custom(read_trace_table(cfg.table), grid));
    }
    return std::make_shared<const BoundaryTriplet>(make_preset(cfg.boundary, grid, cfg.boundary_params));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_argument) throw Error(ErrorKind::config, e.what());
    throw;
  }
}

int resolve_workers(std::optional<int> flag, const RunConfig& cfg) {
  if (flag) {
    if (*flag < 1) throw Error(ErrorKind::config, "--workers must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("SEGLAB_WORKERS"); env && *env) {
    const long long w = parse_int(env, "SEGLAB_WORKERS");
    if (w < 1 || w > 4096) throw Error(ErrorKind::config, "SEGLAB_WORKERS must lie in [1, 4096]");
    return static_cast<int>(w);
  }
  return cfg.workers.value_or(1);
}

}  // namespace seglab
