#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "seglab/config.hpp"
#include "seglab/error.hpp"

namespace seglab {

// Exit-code contract shared by the pipeline, the C API and the CLI.
enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_unconverged = 2, exit_invariant = 3 };

int exit_code_for(ErrorKind kind);

struct StageRecord {
  double beta = 0.0;
  bool converged = false;
  int sweeps = 0;
  double final_decrement = 0.0;
  int linear_iterations = 0;
  std::array<double, 3> residual{};
  double min_value = 0.0;
  double max_excess = 0.0;
  std::optional<double> competitor_energy;
  bool competitor_ok = true;
};

struct RunStatus {
  int exit_code = exit_ok;
  std::string message;
};

// Full pipeline: continuation, checkpoints, solver log, report. Returns the
// exit status; configuration problems throw Error.
RunStatus run_sweep(const RunConfig& cfg, const std::string& out_dir, int workers, std::ostream& log);

// Single minimization at the last beta of the schedule, from --state or the
// configured cold start.
RunStatus run_solve(const RunConfig& cfg, const std::string& out_dir, int workers,
              const std::optional<std::string>& state_path, std::ostream& log);

// kind: acf, pohozaev, holder, overlap or decay, applied to a checkpoint.
int run_diag(const RunConfig& cfg, const std::string& kind, const std::string& state_path,
             const std::string& out_dir, int workers, std::ostream& log);

// Rebuilds the report of an existing run directory from its checkpoints.
int run_report(const RunConfig& cfg, const std::string& out_dir, int workers, std::ostream& log);

// Sphere search; writes sphere.json and the trace CSV into out_dir and
// returns the JSON text.
std::string run_sphere(int k, int max_arcs, int resolution, int workers, const std::string& out_dir);

// ACF exponent: configured value or the k = 3 sphere search.
double resolve_nu(const RunConfig& cfg, int workers);

// Report writer shared by sweep and report.
void write_report(const RunConfig& cfg, const std::vector<TripletState>& states,
                  const std::vector<std::optional<StageRecord>>& records, const RunStatus& status,
                  double nu, const std::string& out_dir, int workers);

std::string stage_tag(std::size_t stage);

}  // namespace seglab
