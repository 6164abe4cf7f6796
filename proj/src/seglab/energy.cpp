#include "seglab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "seglab/error.hpp"

namespace seglab {

namespace {

double interaction_sum(const Triplet& u) {
  const Grid& g = u[0].grid();
  double sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double w = g.node_weight(k);
    if (w == 0.0) continue;
    const double p = u[0][k] * u[1][k] * u[2][k];
    sum += w * p * p;
  }
  return sum * g.cell_area();
}

}  // namespace

TripletState make_state(std::shared_ptr<const BoundaryTriplet> trace, double beta,
                        const std::optional<Triplet>& interior) {
  if (!trace) throw Error(ErrorKind::invalid_argument, "make_state: missing boundary trace");
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::invalid_argument, "make_state: beta must be finite and >= 0");
  }
  TripletState s;
  s.beta = beta;
  s.trace = trace;
  const GridPtr& g = trace->grid;
  for (int c = 0; c < 3; ++c) {
    s.u[c] = interior ? (*interior)[c] : Field(g);
    if (&s.u[c].grid() != g.get() && s.u[c].size() != g->size()) {
      throw Error(ErrorKind::invalid_argument, "make_state: field/grid mismatch");
    }
    for (std::size_t k = 0; k < g->size(); ++k) {
      switch (g->kind(k)) {
        case NodeKind::boundary: s.u[c][k] = trace->values[c][k]; break;
        case NodeKind::exterior: s.u[c][k] = 0.0; break;
        case NodeKind::interior: break;
      }
    }
  }
  return s;
}

EnergyBreakdown energy(const Triplet& u, double beta) {
  EnergyBreakdown e;
  for (int c = 0; c < 3; ++c) e.dirichlet[c] = dirichlet_energy(u[c]);
  e.interaction = beta * interaction_sum(u);
  e.total = e.dirichlet[0] + e.dirichlet[1] + e.dirichlet[2] + e.interaction;
  return e;
}

EnergyBreakdown energy(const TripletState& s) { return energy(s.u, s.beta); }

LinearSolveStats solve_screened_poisson(Field& u, std::span<const double> coeff,
                                        const LinearSolveOptions& opts) {
  const Grid& g = u.grid();
  const std::size_t n = g.size();
  const std::size_t nx = static_cast<std::size_t>(g.nx());
  const double wx = 1.0 / (g.hx() * g.hx()), wy = 1.0 / (g.hy() * g.hy());
  const double dbase = 2.0 * (wx + wy);
  std::vector<std::size_t> nodes = g.interior_nodes();

  std::vector<double> diag(n, 0.0), b(n, 0.0), r(n, 0.0), z(n, 0.0), p(n, 0.0), ap(n, 0.0);
  for (std::size_t k : nodes) {
    if (!(coeff[k] >= 0.0)) throw Error(ErrorKind::invalid_argument, "screening coefficient must be >= 0");
    diag[k] = dbase + coeff[k];
    // Fixed (non-interior) neighbours move to the right-hand side.
    double rhs = 0.0;
    auto fixed = [&](std::size_t q, double w) {
      if (g.kind(q) != NodeKind::interior) rhs += w * u[q];
    };
    fixed(k + 1, wx);
    fixed(k - 1, wx);
    fixed(k + nx, wy);
    fixed(k - nx, wy);
    b[k] = rhs;
  }
  double bnorm2 = 0.0;
  for (std::size_t k : nodes) bnorm2 += b[k] * b[k];
  LinearSolveStats stats;
  if (bnorm2 == 0.0) {
    for (std::size_t k : nodes) u[k] = 0.0;
    return stats;
  }
  const double bnorm = std::sqrt(bnorm2);

  // x lives in u at interior nodes; direction vectors vanish elsewhere.
  std::vector<double> x(n, 0.0);
  for (std::size_t k : nodes) x[k] = u[k];
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t k : nodes) {
      out[k] = diag[k] * v[k] - wx * (v[k + 1] + v[k - 1]) - wy * (v[k + nx] + v[k - nx]);
    }
  };
  apply(x, ap);
  double rnorm2 = 0.0, rz = 0.0;
  for (std::size_t k : nodes) {
    r[k] = b[k] - ap[k];
    z[k] = r[k] / diag[k];
    p[k] = z[k];
    rnorm2 += r[k] * r[k];
    rz += r[k] * z[k];
  }
  int it = 0;
  while (std::sqrt(rnorm2) > opts.lin_tol * bnorm) {
    if (it >= opts.max_iter) {
      std::ostringstream os;
      os << "screened Poisson solve did not reach relative residual " << opts.lin_tol << " in "
         << opts.max_iter << " iterations (residual " << std::sqrt(rnorm2) / bnorm << ")";
      throw Error(ErrorKind::unconverged, os.str());
    }
    apply(p, ap);
    double pap = 0.0;
    for (std::size_t k : nodes) pap += p[k] * ap[k];
    const double alpha = rz / pap;
    double rz_new = 0.0;
    rnorm2 = 0.0;
    for (std::size_t k : nodes) {
      x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
      z[k] = r[k] / diag[k];
      rz_new += r[k] * z[k];
      rnorm2 += r[k] * r[k];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k : nodes) p[k] = z[k] + beta * p[k];
    ++it;
  }
  stats.iterations = it;
  stats.relative_residual = std::sqrt(rnorm2) / bnorm;
  for (std::size_t k : nodes) u[k] = x[k];
  // Projected Gauss-Seidel: each update is an exact coordinate minimization
  // over u >= 0, so the energy cannot rise and round-off negatives vanish.
  for (std::size_t k : nodes) {
    const double num = wx * (u[k + 1] + u[k - 1]) + wy * (u[k + nx] + u[k - nx]);
    u[k] = std::max(0.0, num / diag[k]);
  }
  return stats;
}

TripletState relax_component(TripletState s, int i, const LinearSolveOptions& opts,
                             LinearSolveStats* stats) {
  if (i < 0 || i > 2) throw Error(ErrorKind::invalid_argument, "relax_component: index out of range");
  const Grid& g = s.grid();
  const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
  std::vector<double> coeff(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.kind(k) != NodeKind::interior) continue;
    const double a = s.u[j1][k], b = s.u[j2][k];
    if (a < 0.0 || b < 0.0) {
      throw Error(ErrorKind::invariant, "relax_component: frozen components must be nonnegative");
    }
    coeff[k] = s.beta * a * a * b * b;
  }
  const auto st = solve_screened_poisson(s.u[i], coeff, opts);
  if (stats) *stats = st;
  return s;
}

MinimizeResult minimize(TripletState s, const MinimizeOptions& opts) {
  if (!(opts.sweep_tol > 0.0) || opts.max_sweeps < 1) {
    throw Error(ErrorKind::invalid_argument, "minimize: sweep_tol must be > 0 and max_sweeps >= 1");
  }
  for (const auto& f : s.u) f.check_valid("minimize");
  MinimizeResult res;
  auto& rep = res.report;
  const double psi_max = s.trace->max_value();
  const double neg_tol = -1e-12 * psi_max;
  double e = energy(s).total;
  rep.energy_history.push_back(e);
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    const double e_start = e;
    for (int i = 0; i < 3; ++i) {
      LinearSolveStats st;
      s = relax_component(std::move(s), i, opts.linear, &st);
      rep.linear_iterations += st.iterations;
      const double e_new = energy(s).total;
      if (e_new > e + 1e-13 * std::abs(e)) {
        std::ostringstream os;
        os.precision(17);
        os << "energy increased from " << e << " to " << e_new << " relaxing component "
           << i + 1 << " in sweep " << sweep;
        throw Error(ErrorKind::invariant, os.str());
      }
      if (s.u[i].min_value() < neg_tol) {
        throw Error(ErrorKind::invariant, "component " + std::to_string(i + 1) +
                                              " became negative beyond tolerance");
      }
      e = e_new;
      rep.energy_history.push_back(e);
    }
    rep.sweeps = sweep;
    rep.final_decrement = e_start - e;
    if (rep.final_decrement <= opts.sweep_tol * std::max(1.0, std::abs(e))) {
      rep.converged = true;
      break;
    }
  }
  s.sweeps = rep.sweeps;
  s.last_decrement = rep.final_decrement;
  s.converged = rep.converged;
  rep.residual = pde_residual(s);
  res.state = std::move(s);
  return res;
}

std::array<double, 3> pde_residual(const TripletState& s) {
  const Grid& g = s.grid();
  double unorm = 0.0;
  for (const auto& f : s.u) unorm = std::max(unorm, f.max_abs());
  const double scale = 1.0 + s.beta * unorm * unorm * unorm;
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const Field lap = apply_laplacian(s.u[i]);
    const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
    double m = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.kind(k) != NodeKind::interior) continue;
      const double a = s.u[j1][k], b = s.u[j2][k];
      m = std::max(m, std::abs(lap[k] - s.beta * s.u[i][k] * a * a * b * b));
    }
    out[i] = m / scale;
  }
  return out;
}

InvariantReport check_invariants(const TripletState& s) {
  InvariantReport rep;
  const Grid& g = s.grid();
  const double psi_max = s.trace->max_value();
  rep.min_value = std::min({s.u[0].min_value(), s.u[1].min_value(), s.u[2].min_value()});
  rep.max_excess = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    rep.max_excess = std::max(rep.max_excess, s.u[i].max_value() - s.trace->max_value(i));
    const Field lap = apply_laplacian(s.u[i]);
    for (std::size_t k = 0; k < g.size(); ++k)
      if (g.kind(k) == NodeKind::interior) rep.min_laplacian = std::min(rep.min_laplacian, lap[k]);
  }
  rep.nonnegative = rep.min_value >= -1e-12 * psi_max;
  rep.max_principle = rep.max_excess <= 1e-10;
  return rep;
}

TripletState harmonic_initial_state(std::shared_ptr<const BoundaryTriplet> trace, double beta,
                                    const LinearSolveOptions& opts) {
  TripletState s = make_state(trace, beta);
  const std::vector<double> zero(s.grid().size(), 0.0);
  for (int i = 0; i < 3; ++i) solve_screened_poisson(s.u[i], zero, opts);
  return s;
}

Triplet segregated_competitor(const BoundaryTriplet& trace) {
  const GridPtr& gp = trace.grid;
  const Grid& g = *gp;
  const Point c = g.center();
  const double xmin = g.ox(), xmax = g.x(g.nx() - 1), ymin = g.oy(), ymax = g.y(g.ny() - 1);
  Triplet v{Field(gp), Field(gp), Field(gp)};
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.kind(k) == NodeKind::exterior) continue;
    if (g.kind(k) == NodeKind::boundary) {
      for (int i = 0; i < 3; ++i) v[i][k] = trace.values[i][k];
      continue;
    }
    const Point p = g.node(k);
    const double dx = p.x - c.x, dy = p.y - c.y;
    const double dist = std::hypot(dx, dy);
    double theta = 0.0, rho = 0.0;
    if (dist > 0.0) {
      // Exit point of the ray from the center through p.
      double reach;
      if (g.shape() == DomainShape::disk) {
        reach = g.disk_radius();
      } else {
        const double ux = dx / dist, uy = dy / dist;
        double tx = std::numeric_limits<double>::infinity(), ty = tx;
        if (ux > 0) tx = (xmax - c.x) / ux;
        if (ux < 0) tx = (xmin - c.x) / ux;
        if (uy > 0) ty = (ymax - c.y) / uy;
        if (uy < 0) ty = (ymin - c.y) / uy;
        reach = std::min(tx, ty);
      }
      rho = std::min(1.0, dist / reach);
      if (g.shape() == DomainShape::square) {
        // Perimeter parametrization of the exit point, as used for the trace.
        const double w = xmax - xmin, h = ymax - ymin, per = 2.0 * (w + h);
        const double ex = c.x + dx / dist * reach, ey = c.y + dy / dist * reach;
        const double tol = 1e-12;
        double sarc;
        if (std::abs(ex - xmax) < tol) {
          sarc = ey - c.y >= 0 ? ey - c.y : per + (ey - c.y);
        } else if (std::abs(ey - ymax) < tol) {
          sarc = 0.5 * h + (xmax - ex);
        } else if (std::abs(ex - xmin) < tol) {
          sarc = 0.5 * h + w + (ymax - ey);
        } else {
          sarc = 0.5 * h + w + h + (ex - xmin);
        }
        theta = 2.0 * std::numbers::pi * sarc / per;
      } else {
        theta = std::atan2(dy, dx);
        if (theta < 0) theta += 2.0 * std::numbers::pi;
      }
    }
    const auto psi = trace.profile(theta);
    for (int i = 0; i < 3; ++i) v[i][k] = psi[i] * rho;
  }
  return v;
}

void validate_schedule(const std::vector<double>& schedule) {
  if (schedule.empty()) throw Error(ErrorKind::config, "beta schedule is empty");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0.0) || !std::isfinite(schedule[k])) {
      throw Error(ErrorKind::config, "beta schedule entries must be positive");
    }
    if (k > 0 && !(schedule[k] > schedule[k - 1])) {
      throw Error(ErrorKind::config, "beta schedule must increase strictly");
    }
  }
}

ContinuationResult continuation(const std::vector<double>& schedule, TripletState initial,
                                const ContinuationOptions& opts, const StageCallback& on_stage) {
  validate_schedule(schedule);
  ContinuationResult out;
  TripletState current = std::move(initial);
  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    current.beta = schedule[stage];
    auto mr = minimize(std::move(current), opts.minimize);
    StageResult sr;
    sr.beta = schedule[stage];
    sr.energy = energy(mr.state);
    sr.report = mr.report;
    sr.invariants = check_invariants(mr.state);
    if (opts.competitor) {
      const double ec = energy(*opts.competitor, sr.beta).total;
      sr.competitor_energy = ec;
      sr.competitor_ok = sr.energy.total <= ec + opts.competitor_slack;
    }
    if (on_stage) on_stage(stage, mr.state, sr);
    out.stages.push_back(sr);
    out.states.push_back(mr.state);
    current = std::move(mr.state);
    if (!sr.report.converged) {
      out.truncated = stage + 1 < schedule.size();
      break;
    }
  }
  return out;
}

}  // namespace seglab
