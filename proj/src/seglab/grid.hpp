#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace seglab {

enum class NodeKind : std::uint8_t { interior, boundary, exterior };

enum class DomainShape : std::uint8_t { square, disk, custom };

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Uniform rectangular lattice with a per-node mask. Node (i, j) sits at
// (ox + i*hx, oy + j*hy) and has flat index j*nx + i.
class Grid {
 public:
  Grid(int nx, int ny, double hx, double hy, double ox, double oy,
       std::vector<NodeKind> mask, DomainShape shape = DomainShape::custom);

  // Unit square [0,1]^2 with n nodes per side.
  static std::shared_ptr<const Grid> square(int n);
  // Disk of the given radius centered in the unit square, n nodes per side.
  static std::shared_ptr<const Grid> disk(int n, double radius = 0.45);
  // Builds the mask from a closed "inside" predicate: boundary nodes are the
  // inside nodes touching the outside (or the lattice edge).
  static std::shared_ptr<const Grid> from_predicate(
      int nx, int ny, double hx, double hy, double ox, double oy,
      const std::function<bool(double, double)>& inside,
      DomainShape shape = DomainShape::custom);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double ox() const { return ox_; }
  double oy() const { return oy_; }
  std::size_t size() const { return mask_.size(); }
  DomainShape shape() const { return shape_; }
  // Disk radius for DomainShape::disk, 0 otherwise.
  double disk_radius() const { return disk_radius_; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(i);
  }
  int col(std::size_t idx) const { return static_cast<int>(idx % nx_); }
  int row(std::size_t idx) const { return static_cast<int>(idx / nx_); }
  double x(int i) const { return ox_ + i * hx_; }
  double y(int j) const { return oy_ + j * hy_; }
  Point node(std::size_t idx) const { return {x(col(idx)), y(row(idx))}; }

  NodeKind kind(std::size_t idx) const { return mask_[idx]; }
  NodeKind kind(int i, int j) const { return mask_[index(i, j)]; }
  bool active(int i, int j) const {
    return mask_[index(i, j)] != NodeKind::exterior;
  }
  std::span<const NodeKind> mask() const { return mask_; }

  // Center of the lattice bounding box.
  Point center() const;
  double cell_area() const { return hx_ * hy_; }

  // Cell (ci, cj) spans nodes (ci..ci+1, cj..cj+1). A cell is complete when
  // all four corners are interior or boundary.
  int cells_x() const { return nx_ - 1; }
  int cells_y() const { return ny_ - 1; }
  std::size_t cell_index(int ci, int cj) const {
    return static_cast<std::size_t>(cj) * static_cast<std::size_t>(nx_ - 1) +
           static_cast<std::size_t>(ci);
  }
  bool cell_complete(int ci, int cj) const;

  // Quadrature weight of a node (fraction of hx*hy): 1 at interior nodes,
  // (#complete incident cells)/4 at boundary nodes, 0 outside.
  double node_weight(std::size_t idx) const { return node_weight_[idx]; }
  // Total area of the discrete domain, sum of node weights times hx*hy.
  double domain_area() const;

  // Angle in [0, 2pi) used to parametrize boundary data. Disks use the polar
  // angle about the center; the square (and custom masks) use arc length
  // along the bounding-box perimeter, starting at the midpoint of the right
  // edge and running counter-clockwise, mapped affinely to [0, 2pi).
  double boundary_angle(std::size_t idx) const;

  std::vector<std::size_t> boundary_nodes() const;
  std::vector<std::size_t> interior_nodes() const;

 private:
  void validate() const;
  void compute_weights();

  int nx_;
  int ny_;
  double hx_;
  double hy_;
  double ox_;
  double oy_;
  std::vector<NodeKind> mask_;
  std::vector<double> node_weight_;
  DomainShape shape_;
  double disk_radius_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

// One scalar grid function. Values at exterior nodes are kept at exactly 0.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid);
  Field(GridPtr grid, std::vector<double> values);
  // Paints fn(x, y) on all non-exterior nodes.
  static Field paint(GridPtr grid, const std::function<double(double, double)>& fn);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t idx) const { return values_[idx]; }
  double& operator[](std::size_t idx) { return values_[idx]; }
  double at(int i, int j) const { return values_[grid_->index(i, j)]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double max_value() const;
  double min_value() const;
  double max_abs() const;

  // Throws if a non-exterior node is NaN/Inf or an exterior node is nonzero.
  void check_valid(const char* what) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

// Per-cell scalar, (nx-1)*(ny-1) values; incomplete cells hold 0.
class CellField {
 public:
  explicit CellField(GridPtr grid);
  const Grid& grid() const { return *grid_; }
  double& at(int ci, int cj) { return values_[grid_->cell_index(ci, cj)]; }
  double at(int ci, int cj) const { return values_[grid_->cell_index(ci, cj)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

struct BallSpec {
  Point center;
  double radius = 0.0;
  double delta = 0.0;  // regularization of the N >= 3 kernel
};

struct WeightMode {
  enum class Kind { unit, acf } kind = Kind::unit;
  int dimension = 2;   // only used by Kind::acf
  double delta = 0.0;  // Phi_delta regularization, N >= 3 only

  static WeightMode unit() { return {}; }
  static WeightMode acf(int dimension, double delta = 0.0) {
    return {Kind::acf, dimension, delta};
  }
};

// How cells crossed by the sphere of the ball are counted.
enum class CutRule {
  center,      // include a cell iff its center lies in the ball
  exact_area,  // weight every cell by the exact area of cell ∩ ball
};

using NodePredicate = std::function<bool(std::size_t)>;

struct RegionEnergy {
  double value = 0.0;
  bool empty_region = false;
};

// 5-point Laplacian at interior nodes, 0 elsewhere.
Field apply_laplacian(const Field& f);

// Sum over lattice edges of ((f(q)-f(p))/h)^2 * hx*hy. Edges with an
// interior endpoint weigh 1; boundary-boundary edges weigh
// (#complete incident cells)/2. Its gradient at interior nodes is exactly
// -2*hx*hy times the 5-point Laplacian.
double dirichlet_energy(const Field& f);
RegionEnergy dirichlet_energy(const Field& f, const NodePredicate& region);

// Edge-averaged |grad f|^2 per complete cell; summing it times hx*hy over all
// cells reproduces dirichlet_energy on the square.
CellField gradient_density(const Field& f);
// Average of the four corner values per complete cell.
CellField cell_average(const Field& f);

double integrate_ball(const CellField& f, const BallSpec& ball,
                      const WeightMode& weight = WeightMode::unit(),
                      CutRule rule = CutRule::exact_area);
double integrate_ball(const Field& f, const BallSpec& ball,
                      const WeightMode& weight = WeightMode::unit(),
                      CutRule rule = CutRule::exact_area);

// Trapezoid rule on m equally spaced angles (starting at `offset`), with
// bilinear interpolation of f.
double integrate_circle(const Field& f, Point center, double r, int m,
                        double offset = 0.0);

// Bilinear interpolation from the complete cell enclosing p.
double interpolate(const Field& f, Point p);
// Gradient of the bilinear interpolant at p.
std::array<double, 2> interpolate_gradient(const Field& f, Point p);
// Second-order gradient reconstruction: the one-sided slopes of the enclosing
// cell plus a minmod-limited curvature correction. Exact for piecewise linear
// fields whose kinks lie on grid lines.
std::array<double, 2> reconstruct_gradient(const Field& f, Point p);

// Area of the intersection of an axis-aligned rectangle with a disk.
double rect_disk_area(double x0, double x1, double y0, double y1, Point c,
                      double r);

}  // namespace seglab
