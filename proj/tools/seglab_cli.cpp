#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "seglab/seglab.h"

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  int workers = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "INI configuration file (defaults when omitted)");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--workers", c.workers, "worker threads (else SEGLAB_WORKERS, else [run] workers, else 1)")
      ->check(CLI::PositiveNumber);
}

int fail(int status) {
  std::cerr << "error: " << seglab_last_error() << '\n';
  return seglab_exit_code(status);
}

// Loads the configuration and resolves the worker count.
int prepare(const Common& c, seglab_config** cfg, int* workers) {
  int rc = c.config.empty() ? seglab_config_default(cfg) : seglab_config_load(c.config.c_str(), cfg);
  if (rc != SEGLAB_OK) return rc;
  rc = seglab_resolve_workers(*cfg, c.workers, workers);
  if (rc != SEGLAB_OK) {
    seglab_config_free(*cfg);
    *cfg = nullptr;
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seglab: three-component segregation on planar lattices"};
  app.require_subcommand(1);
  app.footer(seglab_config_help());

  Common sweep_opts, solve_opts, diag_opts, report_opts;
  auto* sweep = app.add_subcommand("sweep", "beta continuation with checkpoints and the full report");
  add_common(sweep, sweep_opts);

  auto* solve = app.add_subcommand("solve", "single minimization at the last beta of the schedule");
  add_common(solve, solve_opts);
  std::string solve_state;
  solve->add_option("--state", solve_state, "warm-start checkpoint");

  auto* diag = app.add_subcommand("diag", "run one diagnostic on a checkpoint");
  add_common(diag, diag_opts);
  std::string diag_kind, diag_state;
  diag->add_option("kind", diag_kind, "acf, pohozaev, holder, overlap or decay")
      ->required()
      ->check(CLI::IsMember({"acf", "pohozaev", "holder", "overlap", "decay"}));
  diag->add_option("--state", diag_state, "checkpoint to analyse")->required();

  auto* report = app.add_subcommand("report", "rebuild the report of a sweep directory");
  add_common(report, report_opts);

  auto* sphere = app.add_subcommand("sphere", "upper bound for the optimal partition value on the circle");
  int k = 3, max_arcs = 1, resolution = 72, sphere_workers = 0;
  std::string sphere_out = ".";
  sphere->add_option("--k", k, "number of components")->capture_default_str();
  sphere->add_option("--max-arcs", max_arcs, "arcs per support")->capture_default_str();
  sphere->add_option("--resolution", resolution, "angular lattice cells")->capture_default_str();
  sphere->add_option("--out", sphere_out, "output directory")->capture_default_str();
  sphere->add_option("--workers", sphere_workers, "worker threads")->check(CLI::PositiveNumber);
  std::string sphere_config;
  sphere->add_option("--config", sphere_config, "configuration file ([run] workers is honoured)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  seglab_config* cfg = nullptr;
  int workers = 1;
  int rc = SEGLAB_OK;
  if (*sweep) {
    if ((rc = prepare(sweep_opts, &cfg, &workers)) != SEGLAB_OK) return fail(rc);
    rc = seglab_run_sweep(cfg, sweep_opts.out.c_str(), workers);
  } else if (*solve) {
    if ((rc = prepare(solve_opts, &cfg, &workers)) != SEGLAB_OK) return fail(rc);
    rc = seglab_run_solve(cfg, solve_opts.out.c_str(), workers, solve_state.empty() ? nullptr : solve_state.c_str());
  } else if (*diag) {
    if ((rc = prepare(diag_opts, &cfg, &workers)) != SEGLAB_OK) return fail(rc);
    rc = seglab_run_diag(cfg, diag_kind.c_str(), diag_state.c_str(), diag_opts.out.c_str(), workers);
  } else if (*report) {
    if ((rc = prepare(report_opts, &cfg, &workers)) != SEGLAB_OK) return fail(rc);
    rc = seglab_run_report(cfg, report_opts.out.c_str(), workers);
  } else if (*sphere) {
    Common c;
    c.config = sphere_config;
    c.workers = sphere_workers;
    if ((rc = prepare(c, &cfg, &workers)) != SEGLAB_OK) return fail(rc);
    char* json = nullptr;
    rc = seglab_sphere(k, max_arcs, resolution, workers, sphere_out.c_str(), &json);
    if (rc == SEGLAB_OK) {
      std::fputs(json, stdout);
      seglab_string_free(json);
    }
  }
  seglab_config_free(cfg);
  if (rc != SEGLAB_OK) return fail(rc);
  return 0;
}
