#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seglab/energy.hpp"
#include "seglab/grid.hpp"
#include "seglab/sphere.hpp"

namespace seglab {

struct AcfOptions {
  double mono_tol = 1e-3;  // relative drop tolerated between consecutive radii
  double seg_tol = 1e-8;   // bound on u1 u2 u3 inside the largest ball
  int dimension = 2;
  double delta = 0.0;      // Phi_delta regularization for dimension >= 3
  CutRule rule = CutRule::exact_area;
  int workers = 1;
};

struct AcfViolation {
  std::size_t index = 0;  // pair (index, index + 1)
  double r0 = 0.0;
  double r1 = 0.0;
  double relative_drop = 0.0;
};

struct AcfReport {
  Point center;
  std::vector<double> radii;
  std::vector<std::array<double, 3>> integrals;  // I_j or I~_j per radius
  std::vector<double> j_values;                  // J_nu or J~_{nu-eps}
  double nu = 0.0;
  double epsilon = 0.0;  // 0 for the unperturbed scan
  bool perturbed = false;
  std::vector<AcfViolation> violations;
  bool hypotheses_met = true;
  double max_triple_product = 0.0;
  // Smallest radius after which no violation occurs (perturbed scans).
  std::optional<double> r_bar;
  double max_violation() const;
};

// 32 logarithmically spaced radii in [4h, dist(x0, boundary)/2].
std::vector<double> default_radii(const Grid& g, Point x0, int count = 32);
// Distance from x0 to the nearest non-interior node.
double distance_to_boundary(const Grid& g, Point x0);

AcfReport acf_scan(const Triplet& u, Point x0, const std::vector<double>& radii, double nu,
                   const AcfOptions& opts = {});
AcfReport acf_perturbed_scan(const TripletState& s, Point x0, const std::vector<double>& radii,
                             double nu, double eps_exponent, const AcfOptions& opts = {});

struct CircleTrace {
  Point center;
  double radius = 0.0;
  double threshold = 0.0;
  std::array<std::vector<double>, 3> samples;  // angles 2 pi (k + 1/2) / m
  int size() const { return static_cast<int>(samples[0].size()); }
};

CircleTrace circle_trace(const Triplet& u, Point x0, double r, int m, double threshold);

struct ArcEstimate {
  double lambda = 0.0;
  bool full_circle = false;
  std::vector<Arc> arcs;
};

// Support = maximal runs of samples above the threshold; each run end is
// pushed to the threshold crossing, taking the smaller of the interpolation
// towards the outside sample and the extrapolation of the last two inside
// samples (at most one spacing). lambda = (pi / L_max)^2, 0 if every sample
// is above the threshold, +infinity if none is.
ArcEstimate lambda_arcs(const std::vector<double>& samples, double threshold);
ArcEstimate lambda_arcs(const CircleTrace& trace, int component);

struct LowerBoundReport {
  double lhs = 0.0;  // surface integral of |grad f|^2
  double rhs = 0.0;  // (2 gamma(lambda) / r) I(f, x0, r)
  double lambda = 0.0;
  double gamma = 0.0;
  double residual = 0.0;
  bool pass = true;
};

LowerBoundReport acf_lower_bound_check(const Field& f, Point x0, double r, double threshold,
                                       int m = 720, double check_tol = 1e-3,
                                       CutRule rule = CutRule::exact_area);

enum class PohozaevMode { finite_beta, limit };

struct PohozaevReport {
  double surface_energy = 0.0;    // r * int_S (sum |grad u|^2 [+ beta prod u^2])
  double bulk_dirichlet = 0.0;    // (N-2) int_B sum |grad u|^2
  double bulk_interaction = 0.0;  // N int_B beta prod u^2
  double surface_normal = 0.0;    // 2 r int_S sum (d_nu u)^2
  double residual = 0.0;          // scaled by r * int_S sum |grad u|^2
};

PohozaevReport pohozaev_residual(const TripletState& s, Point x0, double r, PohozaevMode mode,
                                 int m = 720);

struct HolderResult {
  double value = 0.0;
  std::size_t node_a = 0;
  std::size_t node_b = 0;
  int stride = 1;
};

HolderResult holder_seminorm(const Field& f, double alpha, const NodePredicate& region,
                             std::uint64_t seed = 0, std::size_t exact_limit = 4096);

struct OverlapReport {
  double threshold = 0.0;
  std::array<double, 3> pair{};  // (1,2), (1,3), (2,3)
  double triple = 0.0;
  double nodal = 0.0;
  double domain_area = 0.0;
};

OverlapReport overlap_measures(const Triplet& u, double threshold);

struct DecayReport {
  bool applicable = false;
  std::string reason;
  double m = 0.0;  // beta * min over the outer ball of prod_{j != i} u_j^2
  double slope = 0.0;
  bool pass = false;
  std::vector<double> radii;
  std::vector<double> sups;
};

// Fits log sup_{B_rho} u_i against the depth (R_out - rho) sqrt(M), where
// R_out is the largest radius. Pure exponential decay e^{-sqrt(M) depth} gives
// slope -1; the comparison bound predicts slope <= -1/2.
DecayReport decay_probe(const TripletState& s, int i, Point center, std::vector<double> radii,
                        double fit_tol = 0.1);

}  // namespace seglab
