#include "seglab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "seglab/error.hpp"
#include "seglab/sphere.hpp"

namespace seglab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string node_name(const Grid& g, std::size_t idx) {
  std::ostringstream os;
  os << "node (" << g.col(idx) << ", " << g.row(idx) << ") at ("
     << g.node(idx).x << ", " << g.node(idx).y << ")";
  return os.str();
}

// Antiderivative of sqrt(r^2 - t^2).
double chord_primitive(double t, double r) {
  t = std::clamp(t, -r, r);
  const double s = std::sqrt(std::max(0.0, r * r - t * t));
  return 0.5 * (t * s + r * r * std::asin(t / r));
}

// Area of {t^2 + s^2 <= r^2, t <= a, s <= b}.
double quadrant_area(double a, double b, double r) {
  a = std::min(a, r);
  if (a <= -r || b <= -r) return 0.0;
  auto chord = [r](double lo, double hi) {
    return hi > lo ? chord_primitive(hi, r) - chord_primitive(lo, r) : 0.0;
  };
  if (b >= r) return 2.0 * chord(-r, a);
  const double w = std::sqrt(r * r - b * b);
  auto clip = [a](double hi) { return std::min(hi, a); };
  double area = 0.0;
  if (b >= 0.0) {
    area += 2.0 * chord(-r, clip(-w));
    const double lo = -w, hi = clip(w);
    if (hi > lo) area += b * (hi - lo) + chord(lo, hi);
    area += 2.0 * chord(w, clip(r));
  } else {
    const double lo = -w, hi = clip(w);
    if (hi > lo) area += b * (hi - lo) + chord(lo, hi);
  }
  return area;
}

}  // namespace

Grid::Grid(int nx, int ny, double hx, double hy, double ox, double oy,
           std::vector<NodeKind> mask, DomainShape shape)
    : nx_(nx), ny_(ny), hx_(hx), hy_(hy), ox_(ox), oy_(oy),
      mask_(std::move(mask)), shape_(shape) {
  if (nx < 3 || ny < 3) {
    throw Error(ErrorKind::invalid_argument, "grid needs at least 3x3 nodes");
  }
  if (!(hx > 0.0) || !(hy > 0.0) || !std::isfinite(hx) || !std::isfinite(hy)) {
    throw Error(ErrorKind::invalid_argument, "grid spacings must be positive");
  }
  if (mask_.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)) {
    throw Error(ErrorKind::invalid_argument, "mask size does not match nx*ny");
  }
  validate();
  compute_weights();
}

std::shared_ptr<const Grid> Grid::from_predicate(
    int nx, int ny, double hx, double hy, double ox, double oy,
    const std::function<bool(double, double)>& inside, DomainShape shape) {
  const std::size_t n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  std::vector<char> in(n, 0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      in[static_cast<std::size_t>(j) * nx + i] = inside(ox + i * hx, oy + j * hy) ? 1 : 0;
    }
  }
  auto at = [&](int i, int j) -> bool {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return false;
    return in[static_cast<std::size_t>(j) * nx + i] != 0;
  };
  std::vector<NodeKind> mask(n, NodeKind::exterior);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!at(i, j)) continue;
      const bool inner = at(i + 1, j) && at(i - 1, j) && at(i, j + 1) && at(i, j - 1);
      mask[static_cast<std::size_t>(j) * nx + i] = inner ? NodeKind::interior : NodeKind::boundary;
    }
  }
  // Boundary nodes with no interior node among their 8 neighbours are not on
  // the frontier of the interior set.
  auto interior_at = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return false;
    return mask[static_cast<std::size_t>(j) * nx + i] == NodeKind::interior;
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      auto& m = mask[static_cast<std::size_t>(j) * nx + i];
      if (m != NodeKind::boundary) continue;
      bool touches = false;
      for (int dj = -1; dj <= 1 && !touches; ++dj)
        for (int di = -1; di <= 1 && !touches; ++di)
          if (di != 0 || dj != 0) touches = interior_at(i + di, j + dj);
      if (!touches) m = NodeKind::exterior;
    }
  }
  return std::make_shared<const Grid>(nx, ny, hx, hy, ox, oy, std::move(mask), shape);
}

std::shared_ptr<const Grid> Grid::square(int n) {
  if (n < 3) throw Error(ErrorKind::invalid_argument, "square grid needs n >= 3");
  const double h = 1.0 / (n - 1);
  return from_predicate(n, n, h, h, 0.0, 0.0, [](double, double) { return true; },
                        DomainShape::square);
}

std::shared_ptr<const Grid> Grid::disk(int n, double radius) {
  if (n < 5) throw Error(ErrorKind::invalid_argument, "disk grid needs n >= 5");
  if (!(radius > 0.0) || radius > 0.5) {
    throw Error(ErrorKind::invalid_argument, "disk radius must lie in (0, 0.5]");
  }
  const double h = 1.0 / (n - 1);
  const double r2 = radius * radius;
  auto grid = from_predicate(
      n, n, h, h, 0.0, 0.0,
      [r2](double x, double y) {
        const double dx = x - 0.5, dy = y - 0.5;
        return dx * dx + dy * dy <= r2;
      },
      DomainShape::disk);
  auto copy = std::make_shared<Grid>(*grid);
  copy->disk_radius_ = radius;
  return copy;
}

void Grid::validate() const {
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      if (kind(i, j) != NodeKind::interior) continue;
      const bool on_edge = i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
      if (on_edge || !active(i + 1, j) || !active(i - 1, j) || !active(i, j + 1) ||
          !active(i, j - 1)) {
        throw Error(ErrorKind::invalid_argument,
                    "interior " + node_name(*this, index(i, j)) + " touches the exterior");
      }
    }
  }
}

bool Grid::cell_complete(int ci, int cj) const {
  return active(ci, cj) && active(ci + 1, cj) && active(ci, cj + 1) &&
         active(ci + 1, cj + 1);
}

void Grid::compute_weights() {
  node_weight_.assign(mask_.size(), 0.0);
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      const std::size_t idx = index(i, j);
      if (mask_[idx] == NodeKind::interior) {
        node_weight_[idx] = 1.0;
      } else if (mask_[idx] == NodeKind::boundary) {
        int cells = 0;
        for (int cj = j - 1; cj <= j; ++cj)
          for (int ci = i - 1; ci <= i; ++ci)
            if (ci >= 0 && cj >= 0 && ci < nx_ - 1 && cj < ny_ - 1 && cell_complete(ci, cj))
              ++cells;
        node_weight_[idx] = 0.25 * cells;
      }
    }
  }
}

Point Grid::center() const {
  return {ox_ + 0.5 * (nx_ - 1) * hx_, oy_ + 0.5 * (ny_ - 1) * hy_};
}

double Grid::domain_area() const {
  double s = 0.0;
  for (double w : node_weight_) s += w;
  return s * cell_area();
}

double Grid::boundary_angle(std::size_t idx) const {
  const int i = col(idx), j = row(idx);
  const Point c = center();
  if (shape_ != DomainShape::square) {
    double a = std::atan2(y(j) - c.y, x(i) - c.x);
    if (a < 0.0) a += kTwoPi;
    return a >= kTwoPi ? 0.0 : a;
  }
  const double w = (nx_ - 1) * hx_, h = (ny_ - 1) * hy_;
  const double per = 2.0 * (w + h);
  double s;
  if (i == nx_ - 1) {
    const double dy = y(j) - c.y;
    s = dy >= 0.0 ? dy : per + dy;
  } else if (j == ny_ - 1) {
    s = 0.5 * h + (x(nx_ - 1) - x(i));
  } else if (i == 0) {
    s = 0.5 * h + w + (y(ny_ - 1) - y(j));
  } else if (j == 0) {
    s = 0.5 * h + w + h + (x(i) - ox_);
  } else {
    double a = std::atan2(y(j) - c.y, x(i) - c.x);
    if (a < 0.0) a += kTwoPi;
    return a;
  }
  double a = kTwoPi * s / per;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

std::vector<std::size_t> Grid::boundary_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < mask_.size(); ++k)
    if (mask_[k] == NodeKind::boundary) out.push_back(k);
  return out;
}

std::vector<std::size_t> Grid::interior_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < mask_.size(); ++k)
    if (mask_[k] == NodeKind::interior) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------

Field::Field(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) {
    throw Error(ErrorKind::invalid_argument, "field size does not match its grid");
  }
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (grid_->kind(k) == NodeKind::exterior) values_[k] = 0.0;
}

Field Field::paint(GridPtr grid, const std::function<double(double, double)>& fn) {
  Field f(grid);
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (grid->kind(k) == NodeKind::exterior) continue;
    const Point p = grid->node(k);
    f.values_[k] = fn(p.x, p.y);
  }
  return f;
}

double Field::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < size(); ++k)
    if (grid_->kind(k) != NodeKind::exterior) m = std::max(m, values_[k]);
  return m;
}

double Field::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < size(); ++k)
    if (grid_->kind(k) != NodeKind::exterior) m = std::min(m, values_[k]);
  return m;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void Field::check_valid(const char* what) const {
  for (std::size_t k = 0; k < size(); ++k) {
    if (grid_->kind(k) == NodeKind::exterior) {
      if (values_[k] != 0.0) {
        throw Error(ErrorKind::invariant, std::string(what) + ": exterior " +
                                              node_name(*grid_, k) + " holds a nonzero value");
      }
    } else if (!std::isfinite(values_[k])) {
      throw Error(ErrorKind::invalid_argument,
                  std::string(what) + ": non-finite value at " + node_name(*grid_, k));
    }
  }
}

CellField::CellField(GridPtr grid)
    : grid_(std::move(grid)),
      values_(static_cast<std::size_t>(grid_->cells_x()) * grid_->cells_y(), 0.0) {}

// ---------------------------------------------------------------------------

Field apply_laplacian(const Field& f) {
  const Grid& g = f.grid();
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (g.kind(k) != NodeKind::exterior && !std::isfinite(f[k])) {
      throw Error(ErrorKind::invalid_argument,
                  "apply_laplacian: non-finite value at " + node_name(g, k));
    }
  }
  Field out(f.grid_ptr());
  const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
  const std::size_t nx = static_cast<std::size_t>(g.nx());
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (g.kind(k) != NodeKind::interior) continue;
    const double c = f[k];
    out[k] = (f[k + 1] + f[k - 1] - 2.0 * c) * ihx2 + (f[k + nx] + f[k - nx] - 2.0 * c) * ihy2;
  }
  return out;
}

namespace {

// Weight of the edge between nodes a and b (both active), in units of hx*hy.
double edge_weight(const Grid& g, int ia, int ja, int ib, int jb) {
  if (g.kind(ia, ja) == NodeKind::interior || g.kind(ib, jb) == NodeKind::interior) return 1.0;
  int cells = 0;
  if (ja == jb) {  // horizontal edge, cells below and above
    const int ci = std::min(ia, ib);
    if (ja - 1 >= 0 && g.cell_complete(ci, ja - 1)) ++cells;
    if (ja < g.ny() - 1 && g.cell_complete(ci, ja)) ++cells;
  } else {
    const int cj = std::min(ja, jb);
    if (ia - 1 >= 0 && g.cell_complete(ia - 1, cj)) ++cells;
    if (ia < g.nx() - 1 && g.cell_complete(ia, cj)) ++cells;
  }
  return 0.5 * cells;
}

}  // namespace

RegionEnergy dirichlet_energy(const Field& f, const NodePredicate& region) {
  const Grid& g = f.grid();
  const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
  RegionEnergy out;
  bool any = false;
  double sum = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t k = g.index(i, j);
      if (!g.active(i, j) || !region(k)) continue;
      any = true;
      const double v = f[k];
      if (i + 1 < g.nx() && g.active(i + 1, j) && region(k + 1)) {
        const double d = f[k + 1] - v;
        sum += edge_weight(g, i, j, i + 1, j) * d * d * ihx2;
      }
      if (j + 1 < g.ny() && g.active(i, j + 1) && region(k + g.nx())) {
        const double d = f[k + g.nx()] - v;
        sum += edge_weight(g, i, j, i, j + 1) * d * d * ihy2;
      }
    }
  }
  out.value = sum * g.cell_area();
  out.empty_region = !any;
  return out;
}

double dirichlet_energy(const Field& f) {
  return dirichlet_energy(f, [](std::size_t) { return true; }).value;
}

CellField gradient_density(const Field& f) {
  const Grid& g = f.grid();
  CellField out(f.grid_ptr());
  const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
  for (int cj = 0; cj < g.cells_y(); ++cj) {
    for (int ci = 0; ci < g.cells_x(); ++ci) {
      if (!g.cell_complete(ci, cj)) continue;
      const double a = f.at(ci, cj), b = f.at(ci + 1, cj);
      const double c = f.at(ci, cj + 1), d = f.at(ci + 1, cj + 1);
      const double dx0 = b - a, dx1 = d - c, dy0 = c - a, dy1 = d - b;
      out.at(ci, cj) = 0.5 * (dx0 * dx0 + dx1 * dx1) * ihx2 + 0.5 * (dy0 * dy0 + dy1 * dy1) * ihy2;
    }
  }
  return out;
}

CellField cell_average(const Field& f) {
  const Grid& g = f.grid();
  CellField out(f.grid_ptr());
  for (int cj = 0; cj < g.cells_y(); ++cj)
    for (int ci = 0; ci < g.cells_x(); ++ci)
      if (g.cell_complete(ci, cj))
        out.at(ci, cj) =
            0.25 * (f.at(ci, cj) + f.at(ci + 1, cj) + f.at(ci, cj + 1) + f.at(ci + 1, cj + 1));
  return out;
}

double rect_disk_area(double x0, double x1, double y0, double y1, Point c, double r) {
  if (x1 <= x0 || y1 <= y0 || r <= 0.0) return 0.0;
  const double a0 = x0 - c.x, a1 = x1 - c.x, b0 = y0 - c.y, b1 = y1 - c.y;
  // Fully inside: all corners in the disk.
  const double r2 = r * r;
  const double fx = std::max(a0 * a0, a1 * a1), fy = std::max(b0 * b0, b1 * b1);
  if (fx + fy <= r2) return (x1 - x0) * (y1 - y0);
  // Fully outside: nearest point of the rectangle lies outside.
  const double nx = std::clamp(0.0, a0, a1), ny = std::clamp(0.0, b0, b1);
  if (nx * nx + ny * ny >= r2) return 0.0;
  const double area = quadrant_area(a1, b1, r) - quadrant_area(a0, b1, r) -
                      quadrant_area(a1, b0, r) + quadrant_area(a0, b0, r);
  return std::clamp(area, 0.0, (x1 - x0) * (y1 - y0));
}

double integrate_ball(const CellField& f, const BallSpec& ball, const WeightMode& weight,
                      CutRule rule) {
  const Grid& g = f.grid();
  const double r = ball.radius;
  if (!(r > 0.0)) throw Error(ErrorKind::invalid_argument, "integrate_ball: radius must be > 0");
  if (weight.kind == WeightMode::Kind::acf && weight.dimension >= 3 && !(weight.delta > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "integrate_ball: N >= 3 weight needs delta > 0");
  }
  const Point c = ball.center;
  const double xlo = c.x - r, xhi = c.x + r, ylo = c.y - r, yhi = c.y + r;
  const double xmax = g.x(g.nx() - 1), ymax = g.y(g.ny() - 1);
  if (xlo < g.ox() || ylo < g.oy() || xhi > xmax || yhi > ymax) {
    std::ostringstream os;
    os << "integrate_ball: ball [" << xlo << ", " << xhi << "] x [" << ylo << ", " << yhi
       << "] exits the lattice [" << g.ox() << ", " << xmax << "] x [" << g.oy() << ", "
       << ymax << "]";
    throw Error(ErrorKind::domain, os.str());
  }
  const int ci0 = std::max(0, static_cast<int>(std::floor((xlo - g.ox()) / g.hx())));
  const int ci1 = std::min(g.cells_x() - 1, static_cast<int>(std::floor((xhi - g.ox()) / g.hx())));
  const int cj0 = std::max(0, static_cast<int>(std::floor((ylo - g.oy()) / g.hy())));
  const int cj1 = std::min(g.cells_y() - 1, static_cast<int>(std::floor((yhi - g.oy()) / g.hy())));
  const bool acf3 = weight.kind == WeightMode::Kind::acf && weight.dimension >= 3;
  double sum = 0.0;
  for (int cj = cj0; cj <= cj1; ++cj) {
    double row = 0.0;
    for (int ci = ci0; ci <= ci1; ++ci) {
      const double x0 = g.x(ci), x1 = g.x(ci + 1), y0 = g.y(cj), y1 = g.y(cj + 1);
      const double mx = 0.5 * (x0 + x1) - c.x, my = 0.5 * (y0 + y1) - c.y;
      double area;
      if (rule == CutRule::center) {
        area = (mx * mx + my * my < r * r) ? g.cell_area() : 0.0;
      } else {
        area = rect_disk_area(x0, x1, y0, y1, c, r);
      }
      if (area == 0.0) continue;
      if (!g.cell_complete(ci, cj)) {
        std::ostringstream os;
        os << "integrate_ball: ball of radius " << r << " at (" << c.x << ", " << c.y
           << ") covers cell (" << ci << ", " << cj << ") outside the domain";
        throw Error(ErrorKind::domain, os.str());
      }
      double w = 1.0;
      if (acf3) w = phi_delta(std::sqrt(mx * mx + my * my), weight.delta, weight.dimension);
      row += f.at(ci, cj) * w * area;
    }
    sum += row;
  }
  return sum;
}

double integrate_ball(const Field& f, const BallSpec& ball, const WeightMode& weight,
                      CutRule rule) {
  return integrate_ball(cell_average(f), ball, weight, rule);
}

namespace {

struct CellLocation {
  int ci;
  int cj;
  double tx;
  double ty;
};

CellLocation locate(const Grid& g, Point p, const char* what) {
  double fx = (p.x - g.ox()) / g.hx(), fy = (p.y - g.oy()) / g.hy();
  const double eps = 1e-12;
  // snap to lattice lines so that node-coincident points hit the node exactly
  if (std::abs(fx - std::round(fx)) < eps) fx = std::round(fx);
  if (std::abs(fy - std::round(fy)) < eps) fy = std::round(fy);
  if (!(fx >= -eps && fy >= -eps && fx <= g.nx() - 1 + eps && fy <= g.ny() - 1 + eps)) {
    std::ostringstream os;
    os << what << ": point (" << p.x << ", " << p.y << ") lies outside the lattice";
    throw Error(ErrorKind::domain, os.str());
  }
  int ci = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx() - 2);
  int cj = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny() - 2);
  if (!g.cell_complete(ci, cj)) {
    std::ostringstream os;
    os << what << ": point (" << p.x << ", " << p.y << ") lies in cell (" << ci << ", " << cj
       << ") outside the domain";
    throw Error(ErrorKind::domain, os.str());
  }
  return {ci, cj, std::clamp(fx - ci, 0.0, 1.0), std::clamp(fy - cj, 0.0, 1.0)};
}

}  // namespace

double interpolate(const Field& f, Point p) {
  const Grid& g = f.grid();
  const auto loc = locate(g, p, "interpolate");
  const double a = f.at(loc.ci, loc.cj), b = f.at(loc.ci + 1, loc.cj);
  const double c = f.at(loc.ci, loc.cj + 1), d = f.at(loc.ci + 1, loc.cj + 1);
  const double lo = (1.0 - loc.tx) * a + loc.tx * b;
  const double hi = (1.0 - loc.tx) * c + loc.tx * d;
  return (1.0 - loc.ty) * lo + loc.ty * hi;
}

std::array<double, 2> interpolate_gradient(const Field& f, Point p) {
  const Grid& g = f.grid();
  const auto loc = locate(g, p, "interpolate_gradient");
  const double a = f.at(loc.ci, loc.cj), b = f.at(loc.ci + 1, loc.cj);
  const double c = f.at(loc.ci, loc.cj + 1), d = f.at(loc.ci + 1, loc.cj + 1);
  const double gx0 = (b - a) / g.hx(), gx1 = (d - c) / g.hx();
  const double gy0 = (c - a) / g.hy(), gy1 = (d - b) / g.hy();
  return {gx0 + loc.ty * (gx1 - gx0), gy0 + loc.tx * (gy1 - gy0)};
}

namespace {

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Second difference along x at (i, j), or 0 if a neighbour is inactive.
double second_x(const Field& f, int i, int j) {
  const Grid& g = f.grid();
  if (i <= 0 || i >= g.nx() - 1 || !g.active(i - 1, j) || !g.active(i + 1, j)) return 0.0;
  return (f.at(i + 1, j) - 2.0 * f.at(i, j) + f.at(i - 1, j)) / (g.hx() * g.hx());
}

double second_y(const Field& f, int i, int j) {
  const Grid& g = f.grid();
  if (j <= 0 || j >= g.ny() - 1 || !g.active(i, j - 1) || !g.active(i, j + 1)) return 0.0;
  return (f.at(i, j + 1) - 2.0 * f.at(i, j) + f.at(i, j - 1)) / (g.hy() * g.hy());
}

}  // namespace

std::array<double, 2> reconstruct_gradient(const Field& f, Point p) {
  const Grid& g = f.grid();
  const auto loc = locate(g, p, "reconstruct_gradient");
  const int i = loc.ci, j = loc.cj;
  const double sx = (loc.tx - 0.5) * g.hx(), sy = (loc.ty - 0.5) * g.hy();
  auto dx = [&](int row) {
    return (f.at(i + 1, row) - f.at(i, row)) / g.hx() +
           sx * minmod(second_x(f, i, row), second_x(f, i + 1, row));
  };
  auto dy = [&](int c) {
    return (f.at(c, j + 1) - f.at(c, j)) / g.hy() +
           sy * minmod(second_y(f, c, j), second_y(f, c, j + 1));
  };
  const double gx0 = dx(j), gx1 = dx(j + 1), gy0 = dy(i), gy1 = dy(i + 1);
  return {gx0 + loc.ty * (gx1 - gx0), gy0 + loc.tx * (gy1 - gy0)};
}

double integrate_circle(const Field& f, Point center, double r, int m, double offset) {
  if (m < 16) throw Error(ErrorKind::invalid_argument, "integrate_circle: need m >= 16");
  if (!(r > 0.0)) throw Error(ErrorKind::invalid_argument, "integrate_circle: radius must be > 0");
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    const double th = offset + kTwoPi * k / m;
    sum += interpolate(f, {center.x + r * std::cos(th), center.y + r * std::sin(th)});
  }
  return kTwoPi * r / m * sum;
}

}  // namespace seglab
