#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "seglab/error.hpp"
#include "seglab/grid.hpp"

using namespace seglab;

namespace {

constexpr double pi = std::numbers::pi;

// Independent edge sum for the full square: boundary-boundary edges on the
// outer frame carry weight 1/2, every other edge weight 1.
double brute_dirichlet_square(const Field& f) {
  const Grid& g = f.grid();
  const int n = g.nx();
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i + 1 < n) {
        const double d = (f.at(i + 1, j) - f.at(i, j)) / g.hx();
        const bool frame_edge = (j == 0 || j == n - 1);
        s += (frame_edge ? 0.5 : 1.0) * d * d;
      }
      if (j + 1 < n) {
        const double d = (f.at(i, j + 1) - f.at(i, j)) / g.hy();
        const bool frame_edge = (i == 0 || i == n - 1);
        s += (frame_edge ? 0.5 : 1.0) * d * d;
      }
    }
  }
  return s * g.hx() * g.hy();
}

}  // namespace

TEST_CASE("laplacian annihilates constants and affine functions") {
  auto g = Grid::square(9);
  for (auto fn : {+[](double, double) { return 7.0; }, +[](double x, double y) { return x + 2 * y; }}) {
    const Field lap = apply_laplacian(Field::paint(g, fn));
    for (std::size_t k = 0; k < g->size(); ++k) CHECK(std::abs(lap[k]) < 1e-10);
  }
}

TEST_CASE("laplacian of x^2 is 2 on the 5x5 grid") {
  auto g = Grid::square(5);
  const Field lap = apply_laplacian(Field::paint(g, [](double x, double) { return x * x; }));
  for (std::size_t k = 0; k < g->size(); ++k) {
    if (g->kind(k) == NodeKind::interior) CHECK(lap[k] == doctest::Approx(2.0).epsilon(1e-12));
    else CHECK(lap[k] == 0.0);
  }
}

TEST_CASE("dirichlet energy small cases") {
  SUBCASE("constant") {
    auto g = Grid::square(7);
    CHECK(dirichlet_energy(Field::paint(g, [](double, double) { return 3.5; })) == 0.0);
  }
  SUBCASE("x on the unit square is 1") {
    for (int n : {3, 5, 17, 33}) {
      auto g = Grid::square(n);
      CHECK(dirichlet_energy(Field::paint(g, [](double x, double) { return x; })) ==
            doctest::Approx(1.0).epsilon(1e-13));
    }
  }
  SUBCASE("3x3 bump, twelve edges") {
    auto g = Grid::square(3);
    Field f(g);
    f[g->index(1, 1)] = 1.0;
    // four edges touch the center: ((1/h)^2 h^2) each
    CHECK(dirichlet_energy(f) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(dirichlet_energy(f) == doctest::Approx(brute_dirichlet_square(f)).epsilon(1e-14));
  }
  SUBCASE("random 5x5 against the brute-force edge sum") {
    auto g = Grid::square(5);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int rep = 0; rep < 20; ++rep) {
      Field f(g);
      for (std::size_t k = 0; k < g->size(); ++k) f[k] = U(rng);
      CHECK(std::abs(dirichlet_energy(f) - brute_dirichlet_square(f)) < 1e-10);
    }
  }
}

TEST_CASE("dirichlet energy gradient is -2 h^2 times the laplacian") {
  auto g = Grid::disk(17);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  Field f(g);
  for (std::size_t k = 0; k < g->size(); ++k)
    if (g->kind(k) != NodeKind::exterior) f[k] = U(rng);
  const Field lap = apply_laplacian(f);
  const double e0 = dirichlet_energy(f);
  const double t = 1e-6;
  for (std::size_t k : g->interior_nodes()) {
    Field p = f;
    p[k] += t;
    const double e1 = dirichlet_energy(p);
    // quadratic: the finite difference is exact up to the t^2 term
    const double quad = 4.0 * t * t;
    CHECK((e1 - e0 - quad) / t == doctest::Approx(-2.0 * g->cell_area() * lap[k]).epsilon(1e-6).scale(1e-9));
  }
}

TEST_CASE("node weights sum to the discrete area") {
  auto g = Grid::square(11);
  CHECK(g->domain_area() == doctest::Approx(1.0).epsilon(1e-14));
  auto d = Grid::disk(129);
  CHECK(d->domain_area() == doctest::Approx(pi * 0.45 * 0.45).epsilon(2e-2));
}

TEST_CASE("ball and circle integrals") {
  auto g = Grid::disk(129);
  const Point c = g->center();
  SUBCASE("unit density gives the disk area") {
    const Field one = Field::paint(g, [](double, double) { return 1.0; });
    for (double r : {0.1, 0.2, 0.3}) {
      CHECK(integrate_ball(one, {c, r}) == doctest::Approx(pi * r * r).epsilon(1e-3));
    }
  }
  SUBCASE("zero") {
    CHECK(integrate_ball(Field(g), {c, 0.2}) == 0.0);
    CHECK(integrate_circle(Field(g), c, 0.2, 64) == 0.0);
  }
  SUBCASE("|grad x|^2 over a ball") {
    const Field x = Field::paint(g, [](double px, double) { return px; });
    CHECK(integrate_ball(gradient_density(x), {c, 0.2}) == doctest::Approx(pi * 0.04).epsilon(1e-3));
  }
  SUBCASE("circle of a constant") {
    const Field one = Field::paint(g, [](double, double) { return 1.0; });
    for (int m : {16, 64, 720}) CHECK(std::abs(integrate_circle(one, c, 0.2, m) - 2 * pi * 0.2) < 1e-12);
  }
  SUBCASE("cos^2 on the circle") {
    const Field cos2 = Field::paint(g, [c](double x, double y) {
      const double dx = x - c.x, dy = y - c.y;
      const double r2 = dx * dx + dy * dy;
      return r2 > 0 ? dx * dx / r2 : 0.0;
    });
    CHECK(integrate_circle(cos2, c, 0.2, 720) == doctest::Approx(pi * 0.2).epsilon(5e-3));
  }
}

TEST_CASE("rectangle-disk area") {
  const Point c{0, 0};
  CHECK(rect_disk_area(-2, 2, -2, 2, c, 1) == doctest::Approx(pi).epsilon(1e-13));
  CHECK(rect_disk_area(0, 2, 0, 2, c, 1) == doctest::Approx(pi / 4).epsilon(1e-13));
  CHECK(rect_disk_area(-0.1, 0.1, -0.1, 0.1, c, 1) == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(rect_disk_area(2, 3, 2, 3, c, 1) == 0.0);
  // half-disk strip x in [0, 1]
  CHECK(rect_disk_area(0, 5, -5, 5, c, 1) == doctest::Approx(pi / 2).epsilon(1e-13));
}

TEST_CASE("bilinear interpolation") {
  auto g = Grid::square(5);
  const Field x = Field::paint(g, [](double px, double) { return px; });
  CHECK(interpolate(x, {0.37, 0.9}) == doctest::Approx(0.37).epsilon(1e-15));
  const Field xy = Field::paint(g, [](double px, double py) { return px * py; });
  CHECK(interpolate(xy, {0.125, 0.375}) == doctest::Approx(0.046875).epsilon(1e-15));
  const Field r = Field::paint(g, [](double px, double py) { return std::sin(3 * px) + py * py; });
  for (std::size_t k = 0; k < g->size(); ++k) CHECK(interpolate(r, g->node(k)) == r[k]);
}

TEST_CASE("gradient reconstruction is exact across a kink on a grid line") {
  auto g = Grid::square(33);
  const Field f = Field::paint(g, [](double x, double) { return std::max(x - 0.5, 0.0); });
  for (double px : {0.3, 0.49, 0.51, 0.7}) {
    const auto gr = reconstruct_gradient(f, {px, 0.4});
    CHECK(gr[0] == doctest::Approx(px > 0.5 ? 1.0 : 0.0).scale(1e-12));
    CHECK(gr[1] == doctest::Approx(0.0).scale(1e-12));
  }
  const Field q = Field::paint(g, [](double x, double y) { return x * x + 3 * y; });
  const auto gq = reconstruct_gradient(q, {0.41, 0.62});
  CHECK(gq[0] == doctest::Approx(0.82).epsilon(1e-10));
  CHECK(gq[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("masks and validation") {
  auto g = Grid::disk(33);
  int boundary = 0;
  for (std::size_t k = 0; k < g->size(); ++k) {
    if (g->kind(k) != NodeKind::boundary) continue;
    ++boundary;
    const int i = g->col(k), j = g->row(k);
    bool touches_outside = false;
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      touches_outside |= g->kind(i + di, j + dj) == NodeKind::exterior;
    }
    CHECK(touches_outside);
  }
  CHECK(boundary > 0);
  Field bad(g);
  bad[0] = 1.0;
  CHECK_THROWS_AS(bad.check_valid("test"), Error);
  CHECK_THROWS_AS(Grid::square(1), Error);
}
