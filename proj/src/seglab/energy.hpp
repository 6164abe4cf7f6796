#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seglab/boundary.hpp"
#include "seglab/grid.hpp"

namespace seglab {

using Triplet = std::array<Field, 3>;

struct TripletState {
  Triplet u;
  double beta = 0.0;
  std::shared_ptr<const BoundaryTriplet> trace;
  int sweeps = 0;
  double last_decrement = 0.0;
  bool converged = false;

  const Grid& grid() const { return u[0].grid(); }
  const GridPtr& grid_ptr() const { return u[0].grid_ptr(); }
};

struct EnergyBreakdown {
  std::array<double, 3> dirichlet{};
  double interaction = 0.0;
  double total = 0.0;
};

struct LinearSolveOptions {
  double lin_tol = 1e-10;
  int max_iter = 50000;
};

struct MinimizeOptions {
  double sweep_tol = 1e-12;
  int max_sweeps = 500;
  LinearSolveOptions linear;
};

struct MinimizeReport {
  bool converged = false;
  int sweeps = 0;
  double final_decrement = 0.0;
  std::vector<double> energy_history;  // after every block relaxation
  std::array<double, 3> residual{};
  int linear_iterations = 0;
};

struct InvariantReport {
  double min_value = 0.0;           // over components and nodes
  double max_excess = 0.0;          // max_i (max u_i - max psi_i)
  double min_laplacian = 0.0;       // most negative interior Laplacian
  bool nonnegative = true;          // min >= -1e-12 ||psi||_inf
  bool max_principle = true;        // excess <= 1e-10
};

// Builds a state holding the trace on boundary nodes and `interior` inside.
TripletState make_state(std::shared_ptr<const BoundaryTriplet> trace, double beta,
                        const std::optional<Triplet>& interior = std::nullopt);

// Discrete harmonic extension of each trace component (beta = 0 solve),
// returned with the requested beta.
TripletState harmonic_initial_state(std::shared_ptr<const BoundaryTriplet> trace, double beta,
                                    const LinearSolveOptions& opts = {});

// J_beta: Dirichlet energies plus beta * sum_nodes w_n u1^2 u2^2 u3^2 hx hy.
EnergyBreakdown energy(const TripletState& s);
EnergyBreakdown energy(const Triplet& u, double beta);

struct LinearSolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

// Solves -Lap u + c u = 0 at interior nodes with u fixed on boundary nodes
// (Jacobi-preconditioned CG, then one projected Gauss-Seidel sweep). u holds
// the warm start and boundary data on entry.
LinearSolveStats solve_screened_poisson(Field& u, std::span<const double> coeff,
                                        const LinearSolveOptions& opts);

// Exact minimization of J_beta in component i with the others frozen.
TripletState relax_component(TripletState s, int i, const LinearSolveOptions& opts = {},
                             LinearSolveStats* stats = nullptr);

struct MinimizeResult {
  TripletState state;
  MinimizeReport report;
};

// Cyclic block relaxation. Throws Error(invariant) if the energy increases or
// a component turns negative beyond tolerance.
MinimizeResult minimize(TripletState s, const MinimizeOptions& opts = {});

// max_interior |Lap u_i - beta u_i prod_{j != i} u_j^2| / (1 + beta ||u||_inf^3).
std::array<double, 3> pde_residual(const TripletState& s);

InvariantReport check_invariants(const TripletState& s);

// Radial extension v_i(x) = psi_i(theta(x)) * rho(x) of the trace profile; it
// inherits the pointwise segregation of the profile.
Triplet segregated_competitor(const BoundaryTriplet& trace);

struct ContinuationOptions {
  MinimizeOptions minimize;
  std::optional<Triplet> competitor;
  double competitor_slack = 1e-10;
};

struct StageResult {
  double beta = 0.0;
  EnergyBreakdown energy;
  MinimizeReport report;
  InvariantReport invariants;
  std::optional<double> competitor_energy;  // J_beta(competitor)
  bool competitor_ok = true;
};

struct ContinuationResult {
  std::vector<StageResult> stages;
  std::vector<TripletState> states;
  bool truncated = false;
};

using StageCallback = std::function<void(std::size_t stage, const TripletState&, const StageResult&)>;

// Minimizes at schedule[0] from `initial`, then warm-starts every later
// stage from the previous minimizer. Stops after the first unconverged stage.
ContinuationResult continuation(const std::vector<double>& schedule, TripletState initial,
                                const ContinuationOptions& opts = {},
                                const StageCallback& on_stage = {});

void validate_schedule(const std::vector<double>& schedule);

}  // namespace seglab
