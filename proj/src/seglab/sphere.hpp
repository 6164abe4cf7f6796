#pragma once

#include <limits>
#include <string>
#include <vector>

namespace seglab {

// Characteristic exponent sqrt(((N-2)/2)^2 + t) - (N-2)/2.
double gamma_exponent(double t, int dimension);

// Regularized ACF kernel for N >= 3: equals r^(2-N) for r > delta and the
// C^1 quadratic cap (N/2) delta^(2-N) + ((2-N)/2) delta^(-N) r^2 inside.
double phi_delta(double r, double delta, int dimension);

// Arc on the unit circle given by its center angle and angular length.
struct Arc {
  double center = 0.0;
  double length = 0.0;
};

struct ArcSupport {
  bool full_circle = false;
  std::vector<Arc> arcs;

  static ArcSupport full() { return {true, {}}; }
  static ArcSupport single(double center, double length) { return {false, {{center, length}}}; }
  bool empty() const { return !full_circle && arcs.empty(); }
};

struct ArcConfig {
  std::vector<ArcSupport> components;
};

// Merges overlapping arcs; a merged union covering the circle becomes
// full_circle.
ArcSupport normalize_support(const ArcSupport& support);

// First Dirichlet eigenvalue of the support on S^1: 0 for the full circle,
// (pi / L_max)^2 for a union of arcs, +infinity when empty.
double arc_lambda(const ArcSupport& support);

struct FeasibilityReport {
  bool feasible = true;
  double violating_angle = 0.0;
};

// Fails if some angle lies in the interior of all k supports. Checks one
// angle between every pair of consecutive arc endpoints (exact) and m equally
// spaced probe angles.
FeasibilityReport check_feasibility(const ArcConfig& config, int probe_samples = 3600);

// Sum of gamma(arc_lambda(support_j), 2). Throws when the probe finds an
// angle covered by every component; +infinity if a support is empty.
double config_value(const ArcConfig& config, int probe_samples = 3600);

// Competitors: two disjoint half circles plus k-2 full circles (value 2), and
// k arcs of length 2pi(k-1)/k offset by 2pi/k (value k^2/(2(k-1))).
ArcConfig halfcap_config(int k);
ArcConfig symmetric_config(int k);
ArcConfig rotated(const ArcConfig& config, double angle);

struct SearchOptions {
  int resolution = 72;         // angular lattice cells for the coarse search
  int refine_iterations = 40;  // endpoint step halvings
  int max_arcs = 1;            // arcs per support
  int multi_arc_resolution = 12;
  int probe_samples = 3600;
  long long node_budget = 200'000'000;
  int workers = 1;
};

struct SearchTraceEntry {
  std::string phase;
  long long step = 0;
  double value = 0.0;
};

struct SearchResult {
  double best_value = std::numeric_limits<double>::infinity();
  ArcConfig best;
  std::vector<SearchTraceEntry> trace;
  bool budget_exhausted = false;
};

// Upper bound on alpha_{k,2}: seeded lattice search over arc configurations
// followed by coordinate refinement of arc endpoints.
SearchResult search_alpha(int k, const SearchOptions& options = {});

}  // namespace seglab
