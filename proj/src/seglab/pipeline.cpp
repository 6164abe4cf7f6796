#include "seglab/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "seglab/error.hpp"
#include "seglab/io.hpp"
#include "seglab/parallel.hpp"
#include "seglab/sphere.hpp"

namespace seglab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string f2s(double v) { return format_double(v); }

std::string join_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t k = 0; k < cells.size(); ++k) s += (k ? "," : "") + cells[k];
  return s + "\n";
}

Point scan_center(const RunConfig& cfg, const Grid& g) { return cfg.center.value_or(g.center()); }

Point probe_center(const RunConfig& cfg, const Grid& g) {
  if (cfg.decay_center) return *cfg.decay_center;
  const Point c = scan_center(cfg, g);
  return {c.x + 0.2 * std::cos(std::numbers::pi / 3.0), c.y + 0.2 * std::sin(std::numbers::pi / 3.0)};
}

std::vector<double> probe_radii(const RunConfig& cfg) {
  std::vector<double> r;
  for (int q = 1; q <= 8; ++q) r.push_back(cfg.decay_radius * q / 8.0);
  return r;
}

json overlap_json(const OverlapReport& o) {
  return {{"threshold", num(o.threshold)},
          {"pair", {num(o.pair[0]), num(o.pair[1]), num(o.pair[2])}},
          {"triple", num(o.triple)},
          {"nodal", num(o.nodal)},
          {"domain_area", num(o.domain_area)}};
}

std::string overlap_row(const OverlapReport& o) {
  return join_row({f2s(o.threshold), f2s(o.pair[0]), f2s(o.pair[1]), f2s(o.pair[2]), f2s(o.triple),
                   f2s(o.nodal)});
}

std::string acf_csv(const AcfReport& r) {
  std::string s = "r,I1,I2,I3,Jnu,violation\n";
  std::vector<double> drop(r.radii.size(), 0.0);
  for (const auto& v : r.violations) drop[v.index + 1] = v.relative_drop;
  for (std::size_t k = 0; k < r.radii.size(); ++k) {
    s += join_row({f2s(r.radii[k]), f2s(r.integrals[k][0]), f2s(r.integrals[k][1]),
                   f2s(r.integrals[k][2]), f2s(r.j_values[k]), f2s(drop[k])});
  }
  return s;
}

json acf_json(const AcfReport& r) {
  json j{{"center", {r.center.x, r.center.y}},
         {"nu", num(r.nu)},
         {"radii", r.radii.size()},
         {"violations", r.violations.size()},
         {"max_violation", num(r.max_violation())},
         {"hypotheses_met", r.hypotheses_met},
         {"max_triple_product", num(r.max_triple_product)}};
  if (r.perturbed) {
    j["eps_exponent"] = num(r.epsilon);
    j["r_bar"] = r.r_bar ? num(*r.r_bar) : json(nullptr);
  }
  return j;
}

json decay_json(const DecayReport& d, int component, Point c) {
  return {{"component", component + 1},
          {"center", {c.x, c.y}},
          {"applicable", d.applicable},
          {"reason", d.reason},
          {"M", num(d.m)},
          {"slope", d.applicable ? num(d.slope) : json(nullptr)},
          {"pass", d.pass}};
}

AcfOptions acf_options(const RunConfig& cfg) {
  AcfOptions o;
  o.mono_tol = cfg.mono_tol;
  o.seg_tol = cfg.seg_tol;
  return o;
}

HolderResult holder_of(const RunConfig& cfg, const Field& f, double alpha) {
  const Grid& g = f.grid();
  const Point c = scan_center(cfg, g);
  const double rad = cfg.holder_radius;
  return holder_seminorm(
      f, alpha,
      [&](std::size_t k) {
        const Point p = g.node(k);
        return std::hypot(p.x - c.x, p.y - c.y) <= rad;
      },
      cfg.seed);
}

struct StageOutput {
  json summary;
  std::vector<std::pair<std::string, std::string>> files;
  std::string continuation_row;
  std::string overlap_rows;
  std::string holder_rows;
  std::string decay_row;
};

StageOutput analyse_stage(const RunConfig& cfg, const TripletState& s, std::size_t stage,
                          double nu, bool with_holder) {
  StageOutput out;
  const Grid& g = s.grid();
  const double psi = s.trace->max_value();
  const double eps = cfg.threshold * psi;
  const Point c = scan_center(cfg, g);
  const std::string tag = stage_tag(stage);
  json& j = out.summary;
  const auto e = energy(s);
  j["beta"] = num(s.beta);
  j["energy"] = {{"dirichlet", {num(e.dirichlet[0]), num(e.dirichlet[1]), num(e.dirichlet[2])}},
                 {"interaction", num(e.interaction)},
                 {"total", num(e.total)}};

  const auto ov = overlap_measures(s.u, eps);
  j["overlap"] = overlap_json(ov);
  out.continuation_row = join_row({f2s(s.beta), f2s(e.interaction), f2s(ov.pair[0]), f2s(ov.pair[1]),
                                   f2s(ov.pair[2]), f2s(ov.triple), f2s(ov.nodal)});
  if (cfg.overlap) {
    json sweep = json::array();
    for (double t : cfg.threshold_sweep) {
      const auto o = overlap_measures(s.u, t * psi);
      sweep.push_back(overlap_json(o));
      out.overlap_rows += f2s(s.beta) + "," + overlap_row(o);
    }
    j["overlap_sweep"] = sweep;
  }

  if (cfg.acf || cfg.acf_perturbed) {
    const auto radii = default_radii(g, c, cfg.radii_count);
    if (cfg.acf) {
      const auto r = acf_scan(s.u, c, radii, nu, acf_options(cfg));
      j["acf"] = acf_json(r);
      out.files.emplace_back("acf_stage" + tag + ".csv", acf_csv(r));
    }
    if (cfg.acf_perturbed) {
      const auto r = acf_perturbed_scan(s, c, radii, nu, cfg.eps_exponent, acf_options(cfg));
      j["acf_perturbed"] = acf_json(r);
      out.files.emplace_back("acf_perturbed_stage" + tag + ".csv", acf_csv(r));
    }
  }

  if (cfg.pohozaev) {
    json arr = json::array();
    json lower = json::array();
    std::string csv = "r,residual\n";
    for (double r : cfg.pohozaev_radii) {
      const auto fb = pohozaev_residual(s, c, r, PohozaevMode::finite_beta, cfg.circle_samples);
      const auto lm = pohozaev_residual(s, c, r, PohozaevMode::limit, cfg.circle_samples);
      arr.push_back({{"r", r}, {"finite_beta", num(fb.residual)}, {"limit", num(lm.residual)}});
      csv += join_row({f2s(r), f2s(fb.residual)});
      for (int i = 0; i < 3; ++i) {
        const auto lb = acf_lower_bound_check(s.u[i], c, r, eps, cfg.circle_samples);
        lower.push_back({{"component", i + 1},
                         {"r", r},
                         {"lambda", num(lb.lambda)},
                         {"lhs", num(lb.lhs)},
                         {"rhs", num(lb.rhs)},
                         {"residual", num(lb.residual)},
                         {"pass", lb.pass}});
      }
    }
    j["pohozaev"] = arr;
    j["lower_bound"] = lower;
    out.files.emplace_back("pohozaev_stage" + tag + ".csv", csv);
  }

  if (cfg.holder && with_holder) {
    json arr = json::array();
    for (double a : cfg.holder_alpha) {
      std::array<HolderResult, 3> h;
      for (int i = 0; i < 3; ++i) h[i] = holder_of(cfg, s.u[i], a);
      arr.push_back({{"alpha", a},
                     {"values", {num(h[0].value), num(h[1].value), num(h[2].value)}},
                     {"stride", h[0].stride}});
      out.holder_rows += join_row({f2s(s.beta), f2s(a), f2s(h[0].value), f2s(h[1].value), f2s(h[2].value)});
    }
    j["holder"] = arr;
  }

  if (cfg.decay) {
    const Point pc = probe_center(cfg, g);
    const int comp = cfg.decay_component - 1;
    const auto d = decay_probe(s, comp, pc, probe_radii(cfg), cfg.fit_tol);
    j["decay"] = decay_json(d, comp, pc);
    out.decay_row = join_row({f2s(s.beta), std::to_string(comp + 1), d.applicable ? "1" : "0", f2s(d.m),
                              d.applicable ? f2s(d.slope) : "nan", d.pass ? "1" : "0"});
  }
  return out;
}

std::string solver_log_csv(const std::vector<std::optional<StageRecord>>& records) {
  std::string s =
      "stage,beta,converged,sweeps,final_decrement,linear_iterations,residual1,residual2,residual3,"
      "min_value,max_excess,competitor_energy,competitor_ok\n";
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (!records[k]) continue;
    const auto& r = *records[k];
    s += join_row({std::to_string(k), f2s(r.beta), r.converged ? "1" : "0", std::to_string(r.sweeps),
                   f2s(r.final_decrement), std::to_string(r.linear_iterations), f2s(r.residual[0]),
                   f2s(r.residual[1]), f2s(r.residual[2]), f2s(r.min_value), f2s(r.max_excess),
                   r.competitor_energy ? f2s(*r.competitor_energy) : "", r.competitor_ok ? "1" : "0"});
  }
  return s;
}

std::vector<std::optional<StageRecord>> parse_solver_log(const std::string& path, std::size_t stages) {
  std::vector<std::optional<StageRecord>> out(stages);
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    if (cells.size() != 13) throw Error(ErrorKind::config, path + ": malformed row '" + line + "'");
    const auto idx = static_cast<std::size_t>(parse_int(cells[0], path));
    if (idx >= stages) continue;
    StageRecord r;
    r.beta = parse_double(cells[1], path);
    r.converged = cells[2] == "1";
    r.sweeps = static_cast<int>(parse_int(cells[3], path));
    r.final_decrement = parse_double(cells[4], path);
    r.linear_iterations = static_cast<int>(parse_int(cells[5], path));
    for (int i = 0; i < 3; ++i) r.residual[i] = parse_double(cells[6 + i], path);
    r.min_value = parse_double(cells[9], path);
    r.max_excess = parse_double(cells[10], path);
    if (!cells[11].empty()) r.competitor_energy = parse_double(cells[11], path);
    r.competitor_ok = cells[12] == "1";
    out[idx] = r;
  }
  return out;
}

StageRecord make_record(const StageResult& sr) {
  StageRecord r;
  r.beta = sr.beta;
  r.converged = sr.report.converged;
  r.sweeps = sr.report.sweeps;
  r.final_decrement = sr.report.final_decrement;
  r.linear_iterations = sr.report.linear_iterations;
  r.residual = sr.report.residual;
  r.min_value = sr.invariants.min_value;
  r.max_excess = sr.invariants.max_excess;
  r.competitor_energy = sr.competitor_energy;
  r.competitor_ok = sr.competitor_ok;
  return r;
}

json config_json(const RunConfig& cfg) {
  json params = json::object();
  for (const auto& [k, v] : cfg.boundary_params) params[k] = v;
  return {{"domain", cfg.domain},
          {"n", cfg.n},
          {"radius", cfg.radius},
          {"boundary", cfg.boundary},
          {"parameters", params},
          {"beta_schedule", cfg.schedule},
          {"seed", cfg.seed}};
}

std::string status_name(int code) {
  switch (code) {
    case exit_ok: return "ok";
    case exit_unconverged: return "unconverged";
    case exit_invariant: return "invariant_violation";
    default: return "error";
  }
}

struct Setup {
  GridPtr grid;
  std::shared_ptr<const BoundaryTriplet> trace;
};

Setup setup(const RunConfig& cfg) {
  validate_config(cfg);
  Setup s;
  s.grid = build_grid(cfg);
  s.trace = build_trace(cfg, s.grid);
  const auto cert = validate_partial_segregation(*s.trace, s.trace->default_seg_tol);
  if (!cert.pass) {
    const Point p = s.grid->node(cert.argmax_node);
    std::ostringstream os;
    os << "boundary trace is not partially segregated: psi1*psi2*psi3 = " << cert.max_product
       << " at (" << p.x << ", " << p.y << ")";
    throw Error(ErrorKind::config, os.str());
  }
  return s;
}

// Runs the configured diagnostics once on the bare trace so that geometry
// errors surface before any solve.
void preflight(const RunConfig& cfg, const std::shared_ptr<const BoundaryTriplet>& trace, double nu) {
  const TripletState s = make_state(trace, cfg.schedule.front());
  try {
    analyse_stage(cfg, s, 0, nu, false);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::domain) throw Error(ErrorKind::config, std::string("diagnostics geometry: ") + e.what());
    throw;
  }
}

TripletState cold_start(const RunConfig& cfg, const std::shared_ptr<const BoundaryTriplet>& trace, double beta) {
  if (cfg.init == "harmonic") return harmonic_initial_state(trace, beta, cfg.minimize.linear);
  return make_state(trace, beta);
}

std::string checkpoint_path(const std::string& out, std::size_t stage) {
  return (fs::path(out) / "checkpoints" / ("stage_" + stage_tag(stage) + ".seg")).string();
}

}  // namespace

std::string stage_tag(std::size_t stage) {
  std::string t = std::to_string(stage);
  return t.size() < 2 ? "0" + t : t;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::unconverged: return exit_unconverged;
    case ErrorKind::invariant: return exit_invariant;
    default: return exit_config;
  }
}

double resolve_nu(const RunConfig& cfg, int workers) {
  if (cfg.nu) return *cfg.nu;
  SearchOptions o;
  o.workers = workers;
  return search_alpha(3, o).best_value;
}

void write_report(const RunConfig& cfg, const std::vector<TripletState>& states,
                  const std::vector<std::optional<StageRecord>>& records, const RunStatus& status,
                  double nu, const std::string& out_dir, int workers) {
  std::vector<StageOutput> outputs(states.size());
  parallel_for(states.size(), workers, [&](std::size_t k) {
    outputs[k] = analyse_stage(cfg, states[k], k, nu, true);
  });

  std::vector<std::pair<std::string, std::string>> files;
  std::string cont = "beta,interaction,pair12,pair13,pair23,triple,nodal\n";
  std::string overlap = "beta,threshold,pair12,pair13,pair23,triple,nodal\n";
  std::string holder = "beta,alpha,u1,u2,u3\n";
  std::string decay = "beta,component,applicable,M,slope,pass\n";
  json stages = json::array();
  json beta = json::array(), inter = json::array(), total = json::array();
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    auto& o = outputs[k];
    cont += o.continuation_row;
    overlap += o.overlap_rows;
    holder += o.holder_rows;
    decay += o.decay_row;
    for (auto& f : o.files) files.push_back(std::move(f));
    json sj = std::move(o.summary);
    sj["index"] = k;
    if (k < records.size() && records[k]) {
      const auto& r = *records[k];
      sj["converged"] = r.converged;
      sj["sweeps"] = r.sweeps;
      sj["final_decrement"] = num(r.final_decrement);
      sj["linear_iterations"] = r.linear_iterations;
      sj["pde_residual"] = {num(r.residual[0]), num(r.residual[1]), num(r.residual[2])};
      sj["invariants"] = {{"min_value", num(r.min_value)}, {"max_excess", num(r.max_excess)}};
      sj["competitor"] = r.competitor_energy
                             ? json{{"energy", num(*r.competitor_energy)}, {"ok", r.competitor_ok}}
                             : json(nullptr);
    } else {
      sj["converged"] = nullptr;
      sj["sweeps"] = states[k].sweeps;
    }
    beta.push_back(sj["beta"]);
    inter.push_back(sj["energy"]["interaction"]);
    total.push_back(sj["energy"]["total"]);
    stages.push_back(std::move(sj));
  }
  files.emplace_back("continuation.csv", cont);
  if (cfg.overlap) files.emplace_back("overlap.csv", overlap);
  if (cfg.holder) files.emplace_back("holder.csv", holder);
  if (cfg.decay) files.emplace_back("decay.csv", decay);

  std::set<std::string> artifacts;
  for (const auto& f : files) artifacts.insert(f.first);
  artifacts.insert("summary.json");
  for (const char* extra : {"config.txt", "run.json", "solver_log.csv"}) {
    if (fs::exists(fs::path(out_dir) / extra)) artifacts.insert(extra);
  }
  for (std::size_t k = 0; k < states.size(); ++k) {
    const std::string ck = "checkpoints/stage_" + stage_tag(k) + ".seg";
    if (fs::exists(fs::path(out_dir) / ck)) artifacts.insert(ck);
  }

  json summary{{"schema_version", 1},
               {"status", status_name(status.exit_code)},
               {"exit_code", status.exit_code},
               {"message", status.message},
               {"config", config_json(cfg)},
               {"nu", num(nu)},
               {"nu_source", cfg.nu ? "config" : "sphere_search"},
               {"threshold", num(cfg.threshold * (states.empty() ? 0.0 : states.front().trace->max_value()))},
               {"beta", beta},
               {"interaction", inter},
               {"total", total},
               {"stages", stages},
               {"artifacts", json(std::vector<std::string>(artifacts.begin(), artifacts.end()))}};
  files.emplace_back("summary.json", summary.dump(2) + "\n");
  for (const auto& [name, content] : files) write_text_file((fs::path(out_dir) / name).string(), content);
}

RunStatus run_sweep(const RunConfig& cfg, const std::string& out_dir, int workers, std::ostream& log) {
  const Setup su = setup(cfg);
  const double nu = resolve_nu(cfg, workers);
  preflight(cfg, su.trace, nu);
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "config.txt").string(), cfg.render());

  ContinuationOptions co;
  co.minimize = cfg.minimize;
  if (cfg.competitor) co.competitor = segregated_competitor(*su.trace);
  std::vector<TripletState> states;
  std::vector<std::optional<StageRecord>> records;
  RunStatus status;
  try {
    TripletState initial = cold_start(cfg, su.trace, cfg.schedule.front());
    continuation(cfg.schedule, std::move(initial), co,
                 [&](std::size_t stage, const TripletState& s, const StageResult& sr) {
                   states.push_back(s);
                   records.emplace_back(make_record(sr));
                   if (cfg.checkpoints) save_checkpoint(checkpoint_path(out_dir, stage), s);
                   log << "stage " << stage << " beta=" << f2s(sr.beta) << " sweeps=" << sr.report.sweeps
                       << (sr.report.converged ? " converged" : " NOT converged")
                       << " J=" << f2s(sr.energy.total) << " interaction=" << f2s(sr.energy.interaction)
                       << '\n';
                   std::ostringstream why;
                   if (!sr.invariants.nonnegative) why << "negative value " << f2s(sr.invariants.min_value);
                   else if (!sr.invariants.max_principle)
                     why << "maximum principle exceeded by " << f2s(sr.invariants.max_excess);
                   else if (sr.report.converged && !sr.competitor_ok)
                     why << "energy " << f2s(sr.energy.total) << " above the segregated competitor "
                         << f2s(*sr.competitor_energy);
                   if (!why.str().empty()) {
                     throw Error(ErrorKind::invariant, "stage " + std::to_string(stage) + ": " + why.str());
                   }
                 });
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::invariant) throw;
    status = {exit_invariant, e.what()};
  }
  if (status.exit_code == exit_ok && !records.empty() && !records.back()->converged) {
    status = {exit_unconverged, "stage " + std::to_string(records.size() - 1) + " (beta=" +
                                    f2s(records.back()->beta) + ") did not converge within " +
                                    std::to_string(cfg.minimize.max_sweeps) + " sweeps"};
  }
  write_text_file((fs::path(out_dir) / "solver_log.csv").string(), solver_log_csv(records));
  const json run{{"status", status_name(status.exit_code)},
                 {"exit_code", status.exit_code},
                 {"message", status.message},
                 {"stages_completed", states.size()}};
  write_text_file((fs::path(out_dir) / "run.json").string(), run.dump(2) + "\n");
  write_report(cfg, states, records, status, nu, out_dir, workers);
  return status;
}

int run_report(const RunConfig& cfg, const std::string& out_dir, int workers, std::ostream& log) {
  const Setup su = setup(cfg);
  std::vector<TripletState> states;
  for (std::size_t k = 0;; ++k) {
    const std::string p = checkpoint_path(out_dir, k);
    if (!fs::exists(p)) break;
    states.push_back(load_checkpoint(p, su.trace));
  }
  if (states.empty()) throw Error(ErrorKind::config, "no checkpoints found under " + out_dir + "/checkpoints");
  const auto records = parse_solver_log((fs::path(out_dir) / "solver_log.csv").string(), states.size());
  RunStatus status;
  const fs::path run_path = fs::path(out_dir) / "run.json";
  if (fs::exists(run_path)) {
    try {
      const json run = json::parse(read_text_file(run_path.string()));
      status.exit_code = run.at("exit_code").get<int>();
      status.message = run.at("message").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::config, run_path.string() + ": " + e.what());
    }
  }
  const double nu = resolve_nu(cfg, workers);
  write_report(cfg, states, records, status, nu, out_dir, workers);
  log << "report rebuilt from " << states.size() << " checkpoint(s)\n";
  return exit_ok;
}

RunStatus run_solve(const RunConfig& cfg, const std::string& out_dir, int workers,
              const std::optional<std::string>& state_path, std::ostream& log) {
  (void)workers;
  const Setup su = setup(cfg);
  const double beta = cfg.schedule.back();
  TripletState s = state_path ? load_checkpoint(*state_path, su.trace) : cold_start(cfg, su.trace, beta);
  s.beta = beta;
  json out{{"beta", beta}, {"warm_start", state_path.has_value()}};
  int code = exit_ok;
  std::string message;
  try {
    auto mr = minimize(std::move(s), cfg.minimize);
    const auto e = energy(mr.state);
    const auto inv = check_invariants(mr.state);
    out["converged"] = mr.report.converged;
    out["sweeps"] = mr.report.sweeps;
    out["final_decrement"] = num(mr.report.final_decrement);
    out["pde_residual"] = {num(mr.report.residual[0]), num(mr.report.residual[1]), num(mr.report.residual[2])};
    out["energy"] = {{"dirichlet", {num(e.dirichlet[0]), num(e.dirichlet[1]), num(e.dirichlet[2])}},
                     {"interaction", num(e.interaction)},
                     {"total", num(e.total)}};
    out["invariants"] = {{"min_value", num(inv.min_value)}, {"max_excess", num(inv.max_excess)}};
    if (cfg.competitor) {
      const double ec = energy(segregated_competitor(*su.trace), beta).total;
      out["competitor"] = {{"energy", num(ec)}, {"ok", e.total <= ec + 1e-10}};
      if (mr.report.converged && !(e.total <= ec + 1e-10)) {
        code = exit_invariant;
        message = "energy above the segregated competitor";
      }
    }
    if (!inv.nonnegative || !inv.max_principle) {
      code = exit_invariant;
      message = "invariant check failed";
    }
    if (code == exit_ok && !mr.report.converged) {
      code = exit_unconverged;
      message = "did not converge within " + std::to_string(cfg.minimize.max_sweeps) + " sweeps";
    }
    save_checkpoint((fs::path(out_dir) / "state.seg").string(), mr.state);
    log << "solve beta=" << f2s(beta) << " sweeps=" << mr.report.sweeps
        << (mr.report.converged ? " converged" : " NOT converged") << " J=" << f2s(e.total) << '\n';
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::invariant) throw;
    code = exit_invariant;
    message = e.what();
  }
  out["status"] = status_name(code);
  out["exit_code"] = code;
  out["message"] = message;
  write_text_file((fs::path(out_dir) / "solve.json").string(), out.dump(2) + "\n");
  return {code, message};
}

int run_diag(const RunConfig& cfg, const std::string& kind, const std::string& state_path,
             const std::string& out_dir, int workers, std::ostream& log) {
  static const std::set<std::string> kinds{"acf", "pohozaev", "holder", "overlap", "decay"};
  if (!kinds.count(kind)) {
    throw Error(ErrorKind::config, "unknown diagnostic '" + kind + "' (valid: acf, pohozaev, holder, overlap, decay)");
  }
  const Setup su = setup(cfg);
  const TripletState s = load_checkpoint(state_path, su.trace);
  const Grid& g = s.grid();
  const Point c = scan_center(cfg, g);
  const double eps = cfg.threshold * s.trace->max_value();
  const fs::path out(out_dir);
  json j{{"kind", kind}, {"beta", s.beta}};
  if (kind == "acf") {
    const double nu = resolve_nu(cfg, workers);
    auto opts = acf_options(cfg);
    opts.workers = workers;
    const auto radii = default_radii(g, c, cfg.radii_count);
    const auto r = acf_scan(s.u, c, radii, nu, opts);
    write_text_file((out / "acf.csv").string(), acf_csv(r));
    j["acf"] = acf_json(r);
    const auto p = acf_perturbed_scan(s, c, radii, nu, cfg.eps_exponent, opts);
    write_text_file((out / "acf_perturbed.csv").string(), acf_csv(p));
    j["acf_perturbed"] = acf_json(p);
    log << "acf: " << r.violations.size() << " violation(s), perturbed r_bar=" << f2s(*p.r_bar) << '\n';
  } else if (kind == "pohozaev") {
    std::string csv = "r,residual\n";
    json arr = json::array();
    for (double r : cfg.pohozaev_radii) {
      const auto fb = pohozaev_residual(s, c, r, PohozaevMode::finite_beta, cfg.circle_samples);
      const auto lm = pohozaev_residual(s, c, r, PohozaevMode::limit, cfg.circle_samples);
      csv += join_row({f2s(r), f2s(fb.residual)});
      arr.push_back({{"r", r}, {"finite_beta", num(fb.residual)}, {"limit", num(lm.residual)}});
      log << "pohozaev r=" << f2s(r) << " residual=" << f2s(fb.residual) << '\n';
    }
    write_text_file((out / "pohozaev.csv").string(), csv);
    j["pohozaev"] = arr;
  } else if (kind == "holder") {
    std::string csv = "alpha,u1,u2,u3\n";
    json arr = json::array();
    for (double a : cfg.holder_alpha) {
      std::array<HolderResult, 3> h;
      parallel_for(3, workers, [&](std::size_t i) { h[i] = holder_of(cfg, s.u[i], a); });
      csv += join_row({f2s(a), f2s(h[0].value), f2s(h[1].value), f2s(h[2].value)});
      arr.push_back({{"alpha", a}, {"values", {h[0].value, h[1].value, h[2].value}}, {"stride", h[0].stride}});
    }
    write_text_file((out / "holder.csv").string(), csv);
    j["holder"] = arr;
  } else if (kind == "overlap") {
    std::string csv = "threshold,pair12,pair13,pair23,triple,nodal\n";
    json arr = json::array();
    std::vector<double> ts{cfg.threshold};
    for (double t : cfg.threshold_sweep) ts.push_back(t);
    for (double t : ts) {
      const auto o = overlap_measures(s.u, t * s.trace->max_value());
      csv += overlap_row(o);
      arr.push_back(overlap_json(o));
    }
    write_text_file((out / "overlap.csv").string(), csv);
    j["overlap"] = arr;
  } else {
    const Point pc = probe_center(cfg, g);
    const int comp = cfg.decay_component - 1;
    const auto d = decay_probe(s, comp, pc, probe_radii(cfg), cfg.fit_tol);
    std::string csv = "radius,sup\n";
    for (std::size_t k = 0; k < d.radii.size(); ++k) csv += join_row({f2s(d.radii[k]), f2s(d.sups[k])});
    write_text_file((out / "decay.csv").string(), csv);
    j["decay"] = decay_json(d, comp, pc);
    log << "decay: " << (d.applicable ? "slope " + f2s(d.slope) : "inapplicable (" + d.reason + ")") << '\n';
  }
  (void)eps;
  write_text_file((out / (kind + ".json")).string(), j.dump(2) + "\n");
  return exit_ok;
}

std::string run_sphere(int k, int max_arcs, int resolution, int workers, const std::string& out_dir) {
  if (k < 2 || k > 8) throw Error(ErrorKind::config, "sphere: k must lie in [2, 8]");
  if (max_arcs < 1 || max_arcs > 3) throw Error(ErrorKind::config, "sphere: max_arcs must lie in [1, 3]");
  if (resolution < 4 || resolution > 720) throw Error(ErrorKind::config, "sphere: resolution must lie in [4, 720]");
  SearchOptions o;
  o.max_arcs = max_arcs;
  o.resolution = resolution;
  o.workers = workers;
  const auto res = search_alpha(k, o);
  const fs::path out(out_dir);
  const std::string trace_name = "sphere_k" + std::to_string(k) + "_trace.csv";
  std::string csv = "phase,step,value\n";
  for (const auto& t : res.trace) csv += join_row({t.phase, std::to_string(t.step), f2s(t.value)});
  write_text_file((out / trace_name).string(), csv);
  json comps = json::array();
  for (const auto& c : res.best.components) {
    json arcs = json::array();
    for (const auto& a : c.arcs) arcs.push_back({{"center", a.center}, {"length", a.length}});
    comps.push_back({{"full_circle", c.full_circle}, {"arcs", arcs}});
  }
  const json j{{"k", k},
               {"best_value", num(res.best_value)},
               {"budget_exhausted", res.budget_exhausted},
               {"config", comps},
               {"trace_csv_path", trace_name}};
  const std::string text = j.dump(2) + "\n";
  write_text_file((out / ("sphere_k" + std::to_string(k) + ".json")).string(), text);
  return text;
}

}  // namespace seglab
