#include "seglab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "seglab/error.hpp"
#include "seglab/parallel.hpp"

namespace seglab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

WeightMode acf_weight(const AcfOptions& o) {
  return o.dimension >= 3 ? WeightMode::acf(o.dimension, o.delta) : WeightMode::acf(2);
}

void check_radii(const std::vector<double>& radii) {
  if (radii.empty()) throw Error(ErrorKind::invalid_argument, "scan needs at least one radius");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1]))) {
      throw Error(ErrorKind::invalid_argument, "scan radii must be positive and strictly increasing");
    }
  }
}

double max_triple_in_ball(const Triplet& u, Point x0, double r) {
  const Grid& g = u[0].grid();
  double best = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.kind(k) == NodeKind::exterior) continue;
    const Point p = g.node(k);
    if (std::hypot(p.x - x0.x, p.y - x0.y) > r) continue;
    best = std::max(best, u[0][k] * u[1][k] * u[2][k]);
  }
  return best;
}

void fill_violations(AcfReport& rep, double mono_tol) {
  for (std::size_t k = 0; k + 1 < rep.j_values.size(); ++k) {
    const double a = rep.j_values[k], b = rep.j_values[k + 1];
    if (!(a > 0.0)) continue;
    const double drop = (a - b) / a;
    if (drop > mono_tol) rep.violations.push_back({k, rep.radii[k], rep.radii[k + 1], drop});
  }
}

// Scans with per-component cell densities.
AcfReport scan_densities(const std::array<CellField, 3>& dens, const Triplet& u, Point x0,
                         const std::vector<double>& radii, double exponent,
                         const AcfOptions& opts) {
  check_radii(radii);
  AcfReport rep;
  rep.center = x0;
  rep.radii = radii;
  rep.integrals.resize(radii.size());
  rep.j_values.resize(radii.size());
  const WeightMode w = acf_weight(opts);
  parallel_for(radii.size(), opts.workers, [&](std::size_t k) {
    const BallSpec ball{x0, radii[k], opts.delta};
    double prod = 1.0;
    for (int c = 0; c < 3; ++c) {
      rep.integrals[k][c] = integrate_ball(dens[c], ball, w, opts.rule);
      prod *= rep.integrals[k][c];
    }
    rep.j_values[k] = prod / std::pow(radii[k], 2.0 * exponent);
  });
  rep.max_triple_product = max_triple_in_ball(u, x0, radii.back());
  rep.hypotheses_met = rep.max_triple_product <= opts.seg_tol;
  fill_violations(rep, opts.mono_tol);
  return rep;
}

// Sample positions on the circle, shifted by half a spacing so that no
// sample falls on the coordinate axes through x0 when m is a multiple of 4.
Point circle_point(Point x0, double r, int k, int m, double* theta = nullptr) {
  const double th = kTwoPi * (k + 0.5) / m;
  if (theta) *theta = th;
  return {x0.x + r * std::cos(th), x0.y + r * std::sin(th)};
}

// Trapezoid rule of |grad f|^2 and (d_nu f)^2 on the circle.
std::array<double, 2> circle_gradient_integrals(const Field& f, Point x0, double r, int m) {
  double full = 0.0, normal = 0.0;
  for (int k = 0; k < m; ++k) {
    double th;
    const Point p = circle_point(x0, r, k, m, &th);
    const auto gr = reconstruct_gradient(f, p);
    const double dn = gr[0] * std::cos(th) + gr[1] * std::sin(th);
    full += gr[0] * gr[0] + gr[1] * gr[1];
    normal += dn * dn;
  }
  const double ds = kTwoPi * r / m;
  return {full * ds, normal * ds};
}

Field product_field(const Triplet& u, double beta) {
  const Grid& g = u[0].grid();
  Field p(u[0].grid_ptr());
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.kind(k) == NodeKind::exterior) continue;
    const double t = u[0][k] * u[1][k] * u[2][k];
    p[k] = beta * t * t;
  }
  return p;
}

}  // namespace

double AcfReport::max_violation() const {
  double m = 0.0;
  for (const auto& v : violations) m = std::max(m, v.relative_drop);
  return m;
}

double distance_to_boundary(const Grid& g, Point x0) {
  double best = kInf;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.kind(k) == NodeKind::interior) continue;
    const Point p = g.node(k);
    best = std::min(best, std::hypot(p.x - x0.x, p.y - x0.y));
  }
  return best;
}

std::vector<double> default_radii(const Grid& g, Point x0, int count) {
  if (count < 2) throw Error(ErrorKind::invalid_argument, "default_radii: need count >= 2");
  const double lo = 4.0 * std::max(g.hx(), g.hy());
  const double hi = 0.5 * distance_to_boundary(g, x0);
  if (!(hi > lo)) {
    throw Error(ErrorKind::domain, "default_radii: center too close to the boundary for a scan");
  }
  std::vector<double> r(count);
  const double ratio = std::log(hi / lo);
  for (int k = 0; k < count; ++k) r[k] = lo * std::exp(ratio * k / (count - 1));
  r.back() = hi;
  return r;
}

AcfReport acf_scan(const Triplet& u, Point x0, const std::vector<double>& radii, double nu,
                   const AcfOptions& opts) {
  const std::array<CellField, 3> dens{gradient_density(u[0]), gradient_density(u[1]),
                                      gradient_density(u[2])};
  AcfReport rep = scan_densities(dens, u, x0, radii, nu, opts);
  rep.nu = nu;
  return rep;
}

AcfReport acf_perturbed_scan(const TripletState& s, Point x0, const std::vector<double>& radii,
                             double nu, double eps_exponent, const AcfOptions& opts) {
  // u_i^2 prod_{j != i} u_j^2 is the full product for every i.
  const CellField extra = cell_average(product_field(s.u, s.beta));
  std::array<CellField, 3> dens{gradient_density(s.u[0]), gradient_density(s.u[1]),
                                gradient_density(s.u[2])};
  for (auto& d : dens) {
    auto v = d.values();
    const auto e = extra.values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += e[k];
  }
  AcfReport rep = scan_densities(dens, s.u, x0, radii, nu - eps_exponent, opts);
  rep.nu = nu;
  rep.epsilon = eps_exponent;
  rep.perturbed = true;
  rep.r_bar = rep.violations.empty() ? radii.front() : radii[rep.violations.back().index + 1];
  return rep;
}

CircleTrace circle_trace(const Triplet& u, Point x0, double r, int m, double threshold) {
  if (m < 16) throw Error(ErrorKind::invalid_argument, "circle_trace: need m >= 16");
  if (!(r > 0.0)) throw Error(ErrorKind::invalid_argument, "circle_trace: radius must be > 0");
  CircleTrace t;
  t.center = x0;
  t.radius = r;
  t.threshold = threshold;
  for (auto& s : t.samples) s.resize(m);
  for (int k = 0; k < m; ++k) {
    const Point p = circle_point(x0, r, k, m);
    for (int c = 0; c < 3; ++c) t.samples[c][k] = interpolate(u[c], p);
  }
  return t;
}

ArcEstimate lambda_arcs(const std::vector<double>& v, double eps) {
  const int m = static_cast<int>(v.size());
  if (m < 16) throw Error(ErrorKind::invalid_argument, "lambda_arcs: need >= 16 samples");
  ArcEstimate est;
  int start = -1;
  for (int k = 0; k < m; ++k) {
    if (!(v[k] > eps)) {
      start = k;
      break;
    }
  }
  if (start < 0) {
    est.full_circle = true;
    est.lambda = 0.0;
    return est;
  }
  const double dt = kTwoPi / m;
  auto at = [&](int k) { return v[((k % m) + m) % m]; };
  // Distance from an end sample to the estimated level crossing, in [0, dt].
  auto reach = [&](double in, double in2, double out, bool has_in2) {
    double d = dt * std::min(1.0, (in - eps) / (in - out));
    if (has_in2 && in2 > in) d = std::min(d, dt * (in - eps) / (in2 - in));
    return std::clamp(d, 0.0, dt);
  };
  double lmax = 0.0;
  for (int k = start + 1; k <= start + m; ++k) {
    if (!(at(k) > eps)) continue;
    int e = k;
    while (e + 1 < start + m && at(e + 1) > eps) ++e;
    const int n = e - k + 1;
    const double left = reach(at(k), at(k + 1), at(k - 1), n >= 2);
    const double right = reach(at(e), at(e - 1), at(e + 1), n >= 2);
    const double a0 = (k + 0.5) * dt - left;
    const double len = (n - 1) * dt + left + right;
    est.arcs.push_back({std::fmod(a0 + 0.5 * len, kTwoPi), len});
    lmax = std::max(lmax, len);
    k = e;
  }
  est.lambda = est.arcs.empty() ? kInf : std::pow(std::numbers::pi / lmax, 2);
  return est;
}

ArcEstimate lambda_arcs(const CircleTrace& trace, int component) {
  if (component < 0 || component > 2) {
    throw Error(ErrorKind::invalid_argument, "lambda_arcs: component must be 0, 1 or 2");
  }
  return lambda_arcs(trace.samples[component], trace.threshold);
}

LowerBoundReport acf_lower_bound_check(const Field& f, Point x0, double r, double threshold,
                                       int m, double check_tol, CutRule rule) {
  LowerBoundReport rep;
  rep.lhs = circle_gradient_integrals(f, x0, r, m)[0];
  std::vector<double> samples(m);
  for (int k = 0; k < m; ++k) samples[k] = interpolate(f, circle_point(x0, r, k, m));
  rep.lambda = lambda_arcs(samples, threshold).lambda;
  const double ball = integrate_ball(gradient_density(f), {x0, r}, WeightMode::acf(2), rule);
  if (std::isinf(rep.lambda)) {
    rep.gamma = kInf;
    rep.rhs = ball > 0.0 ? kInf : 0.0;
  } else {
    rep.gamma = gamma_exponent(rep.lambda, 2);
    rep.rhs = 2.0 * rep.gamma / r * ball;
  }
  rep.residual = rep.lhs - rep.rhs;
  rep.pass = rep.residual >= -check_tol;
  return rep;
}

PohozaevReport pohozaev_residual(const TripletState& s, Point x0, double r, PohozaevMode mode,
                                 int m) {
  constexpr int dim = 2;
  PohozaevReport rep;
  double grad_surface = 0.0, normal_surface = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto v = circle_gradient_integrals(s.u[c], x0, r, m);
    grad_surface += v[0];
    normal_surface += v[1];
  }
  double inter_surface = 0.0;
  if (mode == PohozaevMode::finite_beta && s.beta > 0.0) {
    const Field p = product_field(s.u, s.beta);
    double sum = 0.0;
    for (int k = 0; k < m; ++k) sum += interpolate(p, circle_point(x0, r, k, m));
    inter_surface = sum * kTwoPi * r / m;
    rep.bulk_interaction = dim * integrate_ball(p, {x0, r});
  }
  // (N - 2) vanishes for N = 2; the term is kept for the record.
  rep.bulk_dirichlet = 0.0;
  rep.surface_energy = r * (grad_surface + inter_surface);
  rep.surface_normal = 2.0 * r * normal_surface;
  const double scale = r * grad_surface + 1e-300;
  rep.residual = std::abs(rep.surface_energy - rep.bulk_dirichlet - rep.bulk_interaction -
                          rep.surface_normal) / scale;
  return rep;
}

HolderResult holder_seminorm(const Field& f, double alpha, const NodePredicate& region,
                             std::uint64_t seed, std::size_t exact_limit) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "holder_seminorm: alpha must lie in (0, 1]");
  }
  const Grid& g = f.grid();
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.kind(k) != NodeKind::exterior && (!region || region(k))) nodes.push_back(k);
  }
  if (nodes.empty()) throw Error(ErrorKind::invalid_argument, "holder_seminorm: empty region");
  HolderResult res;
  if (nodes.size() > exact_limit) {
    res.stride = static_cast<int>(
        std::ceil(std::sqrt(static_cast<double>(nodes.size()) / static_cast<double>(exact_limit))));
    std::mt19937_64 rng(seed);
    const int oi = static_cast<int>(rng() % static_cast<std::uint64_t>(res.stride));
    const int oj = static_cast<int>(rng() % static_cast<std::uint64_t>(res.stride));
    std::vector<std::size_t> kept;
    for (std::size_t k : nodes) {
      if ((g.col(k) - oi) % res.stride == 0 && (g.row(k) - oj) % res.stride == 0) kept.push_back(k);
    }
    if (kept.empty()) kept.push_back(nodes.front());
    nodes.swap(kept);
  }
  res.node_a = res.node_b = nodes.front();
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const Point pa = g.node(nodes[a]);
    const double fa = f[nodes[a]];
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const Point pb = g.node(nodes[b]);
      const double d = std::hypot(pa.x - pb.x, pa.y - pb.y);
      const double q = std::abs(fa - f[nodes[b]]) / std::pow(d, alpha);
      if (q > res.value) {
        res.value = q;
        res.node_a = nodes[a];
        res.node_b = nodes[b];
      }
    }
  }
  return res;
}

OverlapReport overlap_measures(const Triplet& u, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::invalid_argument, "overlap_measures: eps must be > 0");
  const Grid& g = u[0].grid();
  OverlapReport rep;
  rep.threshold = eps;
  rep.domain_area = g.domain_area();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double w = g.node_weight(k);
    if (w == 0.0) continue;
    const bool a = u[0][k] > eps, b = u[1][k] > eps, c = u[2][k] > eps;
    if (a && b) rep.pair[0] += w;
    if (a && c) rep.pair[1] += w;
    if (b && c) rep.pair[2] += w;
    if (a && b && c) rep.triple += w;
    const int low = (u[0][k] < eps) + (u[1][k] < eps) + (u[2][k] < eps);
    if (low >= 2) rep.nodal += w;
  }
  const double h2 = g.cell_area();
  for (double& p : rep.pair) p *= h2;
  rep.triple *= h2;
  rep.nodal *= h2;
  return rep;
}

DecayReport decay_probe(const TripletState& s, int i, Point center, std::vector<double> radii,
                        double fit_tol) {
  if (i < 0 || i > 2) throw Error(ErrorKind::invalid_argument, "decay_probe: component must be 0, 1 or 2");
  if (radii.size() < 2) throw Error(ErrorKind::invalid_argument, "decay_probe: need >= 2 radii");
  std::sort(radii.begin(), radii.end());
  const Grid& g = s.grid();
  const double rout = radii.back();
  DecayReport rep;
  rep.radii = radii;
  rep.sups.assign(radii.size(), 0.0);
  double minprod = kInf;
  bool outside = false;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point p = g.node(k);
    const double d = std::hypot(p.x - center.x, p.y - center.y);
    if (d > rout) continue;
    if (g.kind(k) == NodeKind::exterior) {
      outside = true;
      continue;
    }
    double prod = 1.0;
    for (int c = 0; c < 3; ++c)
      if (c != i) prod *= s.u[c][k] * s.u[c][k];
    minprod = std::min(minprod, prod);
    for (std::size_t r = 0; r < radii.size(); ++r)
      if (d <= radii[r]) rep.sups[r] = std::max(rep.sups[r], s.u[i][k]);
  }
  if (outside) {
    rep.reason = "ball leaves the domain";
    return rep;
  }
  rep.m = std::isinf(minprod) ? 0.0 : s.beta * minprod;
  if (!(rep.m > 0.0)) {
    rep.reason = "M = 0 on the ball";
    return rep;
  }
  const double sm = std::sqrt(rep.m);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    if (!(rep.sups[r] > 0.0)) continue;
    const double x = (rout - radii[r]) * sm, y = std::log(rep.sups[r]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || !(den > 0.0)) {
    rep.reason = "fewer than two radii with a positive supremum";
    return rep;
  }
  rep.applicable = true;
  rep.slope = (n * sxy - sx * sy) / den;
  rep.pass = rep.slope <= -0.5 + fit_tol;
  return rep;
}

}  // namespace seglab
