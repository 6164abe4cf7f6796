#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "seglab/boundary.hpp"
#include "seglab/diagnostics.hpp"
#include "seglab/energy.hpp"

using namespace seglab;

namespace {

constexpr double pi = std::numbers::pi;

Triplet paint3(const GridPtr& g, double (*a)(double, double, Point), double (*b)(double, double, Point),
               double (*c)(double, double, Point)) {
  const Point x0 = g->center();
  return {Field::paint(g, [&](double x, double y) { return a(x, y, x0); }),
          Field::paint(g, [&](double x, double y) { return b(x, y, x0); }),
          Field::paint(g, [&](double x, double y) { return c(x, y, x0); })};
}

double x1p(double x, double, Point c) { return std::max(x - c.x, 0.0); }
double x1m(double x, double, Point c) { return std::max(c.x - x, 0.0); }
double x2p(double, double y, Point c) { return std::max(y - c.y, 0.0); }
double one(double, double, Point) { return 1.0; }

TripletState bare_state(Triplet u, double beta) {
  TripletState s;
  s.u = std::move(u);
  s.beta = beta;
  return s;
}

}  // namespace

TEST_CASE("acf scan on half-plane profiles") {
  auto g = Grid::disk(129);
  const Point c = g->center();
  const auto radii = default_radii(*g, c);
  REQUIRE(radii.size() == 32);
  CHECK(radii.front() == doctest::Approx(4 * g->hx()).epsilon(1e-12));
  CHECK(radii.back() <= 0.5 * distance_to_boundary(*g, c) + 1e-12);

  const Triplet seg = paint3(g, x1p, x1m, one);
  const auto rep = acf_scan(seg, c, radii, 2.0);
  CHECK(rep.violations.empty());
  CHECK(rep.hypotheses_met);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double half = pi * radii[k] * radii[k] / 2;
    CHECK(rep.integrals[k][0] == doctest::Approx(half).epsilon(1e-10));
    CHECK(rep.integrals[k][1] == doctest::Approx(half).epsilon(1e-10));
    CHECK(rep.integrals[k][2] == 0.0);
    CHECK(rep.j_values[k] == 0.0);
  }

  const auto flagged = acf_scan(paint3(g, x1p, x2p, one), c, radii, 2.0);
  CHECK_FALSE(flagged.hypotheses_met);
  CHECK(flagged.max_triple_product > 1e-3);
}

TEST_CASE("acf scan with a constant component") {
  auto g = Grid::disk(65);
  const Point c = g->center();
  const auto rep = acf_scan(paint3(g, x1p, one, one), c, default_radii(*g, c), 2.0);
  CHECK(rep.violations.empty());
  for (double j : rep.j_values) CHECK(j == 0.0);
}

TEST_CASE("acf flags a decreasing J") {
  // J = r^-4 * (pi r^2)^3 grows like r^2 for affine profiles; nu = 4 makes it
  // decay like r^-2
  auto g = Grid::disk(65);
  const Point c = g->center();
  Triplet u{Field::paint(g, [](double x, double) { return x; }), Field::paint(g, [](double, double y) { return y; }),
            Field::paint(g, [](double x, double y) { return x + y; })};
  const auto radii = default_radii(*g, c, 8);
  CHECK(acf_scan(u, c, radii, 2.0).violations.empty());
  const auto bad = acf_scan(u, c, radii, 4.0);
  CHECK(bad.violations.size() == radii.size() - 1);
  CHECK(bad.max_violation() > 0.1);
}

TEST_CASE("perturbed scan") {
  auto g = Grid::disk(65);
  const Point c = g->center();
  const auto radii = default_radii(*g, c, 12);
  SUBCASE("beta = 0 reproduces the plain scan") {
    Triplet u{Field::paint(g, [](double x, double) { return x * x; }), Field::paint(g, [](double, double y) { return y; }),
              Field::paint(g, [](double x, double y) { return x * y + 1; })};
    const auto s = bare_state(u, 0.0);
    const auto plain = acf_scan(u, c, radii, 2.0);
    const auto pert = acf_perturbed_scan(s, c, radii, 2.0, 0.0);
    for (std::size_t k = 0; k < radii.size(); ++k)
      for (int i = 0; i < 3; ++i) CHECK(pert.integrals[k][i] == plain.integrals[k][i]);
    CHECK(pert.r_bar.has_value());
  }
  SUBCASE("a vanishing component gives J = 0") {
    auto t = std::make_shared<const BoundaryTriplet>(make_preset("two_phase", g));
    const auto s = minimize(harmonic_initial_state(t, 10.0), {}).state;
    const auto pert = acf_perturbed_scan(s, c, radii, 2.0, 0.1);
    for (std::size_t k = 0; k < radii.size(); ++k) {
      CHECK(pert.integrals[k][2] == 0.0);
      CHECK(pert.j_values[k] == 0.0);
    }
    CHECK(pert.violations.empty());
    REQUIRE(pert.r_bar.has_value());
    CHECK(*pert.r_bar == radii.front());
  }
}

TEST_CASE("arc eigenvalue estimates from samples") {
  const int m = 720;
  auto sample = [m](auto fn) {
    std::vector<double> v(m);
    for (int k = 0; k < m; ++k) v[k] = fn(2 * pi * (k + 0.5) / m);
    return v;
  };
  const auto half = lambda_arcs(sample([](double t) { return std::max(std::cos(t), 0.0); }), 1e-3);
  CHECK(half.lambda == doctest::Approx(1.0).epsilon(1e-3));
  const auto third = lambda_arcs(sample([](double t) { return t < 4 * pi / 3 ? std::sin(0.75 * t) : 0.0; }), 1e-3);
  CHECK(third.lambda == doctest::Approx(9.0 / 16.0).epsilon(1e-3));
  const auto full = lambda_arcs(sample([](double t) { return 2 + std::cos(t); }), 1e-3);
  CHECK(full.full_circle);
  CHECK(full.lambda == 0.0);
  CHECK(std::isinf(lambda_arcs(std::vector<double>(m, 0.0), 1e-3).lambda));
  // raising the threshold never lengthens the support
  const auto v = sample([](double t) { return std::max(std::sin(t), 0.0); });
  double prev = 0.0;
  for (double eps : {1e-4, 1e-3, 1e-2, 0.1, 0.5}) {
    const double l = lambda_arcs(v, eps).lambda;
    CHECK(l >= prev);
    prev = l;
  }
}

TEST_CASE("spherical lower bound") {
  auto g = Grid::disk(129);
  const Point c = g->center();
  const Field f = Field::paint(g, [c](double x, double) { return std::max(x - c.x, 0.0); });
  for (double r : {0.1, 0.2, 0.3}) {
    const auto rep = acf_lower_bound_check(f, c, r, 1e-6);
    CHECK(rep.lhs == doctest::Approx(pi * r).epsilon(1e-3));
    CHECK(rep.lambda == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(std::abs(rep.residual) < 1e-3);
    CHECK(rep.pass);
  }
  const Field k = Field::paint(g, [](double, double) { return 0.4; });
  const auto rep = acf_lower_bound_check(k, c, 0.2, 1e-6);
  CHECK(rep.lambda == 0.0);
  CHECK(rep.lhs == 0.0);
  CHECK(rep.rhs == 0.0);
  CHECK(rep.residual == 0.0);
}

TEST_CASE("local Pohozaev identity") {
  auto g = Grid::disk(129);
  const Point c = g->center();
  const auto s = bare_state(paint3(g, x1p, x1m, one), 0.0);
  for (double r : {0.1, 0.2, 0.3}) {
    const auto rep = pohozaev_residual(s, c, r, PohozaevMode::limit);
    CHECK(rep.surface_energy == doctest::Approx(2 * pi * r * r).epsilon(1e-3));
    CHECK(rep.residual <= 1e-3);
  }
  const auto flat = bare_state(paint3(g, one, one, one), 0.0);
  for (auto mode : {PohozaevMode::limit, PohozaevMode::finite_beta}) {
    const auto rep = pohozaev_residual(flat, c, 0.2, mode);
    CHECK(rep.surface_energy == 0.0);
    CHECK(rep.surface_normal == 0.0);
    CHECK(rep.residual == 0.0);
  }
}

TEST_CASE("Pohozaev residual of smooth harmonic fields converges") {
  std::vector<double> res;
  for (int n : {65, 129, 257}) {
    auto g = Grid::disk(n);
    const Point c = g->center();
    Triplet u{Field::paint(g, [c](double x, double y) { return std::exp(x - c.x) * std::cos(y - c.y); }),
              Field::paint(g, [c](double x, double y) { return (x - c.x) * (x - c.x) - (y - c.y) * (y - c.y); }),
              Field::paint(g, [c](double x, double y) { return 1 + (x - c.x) * (y - c.y); })};
    res.push_back(pohozaev_residual(bare_state(u, 0.0), c, 0.2, PohozaevMode::limit).residual);
    MESSAGE("n = " << n << " residual " << res.back());
  }
  for (double r : res) CHECK(r < 1e-5);
  // two halvings of h: order >= 1 overall
  CHECK(res[2] <= res[0] / 4);
}

TEST_CASE("Holder seminorm") {
  auto g = Grid::square(33);
  auto all = [](std::size_t) { return true; };
  CHECK(holder_seminorm(Field::paint(g, [](double, double) { return 2.0; }), 0.5, all).value == 0.0);
  CHECK(holder_seminorm(Field::paint(g, [](double x, double) { return x; }), 1.0, all).value ==
        doctest::Approx(1.0).epsilon(1e-12));

  const std::size_t centre = g->index(16, 16);
  const Point x0 = g->node(centre);
  const Field f = Field::paint(g, [x0](double x, double y) { return std::pow(std::hypot(x - x0.x, y - x0.y), 0.75); });
  const auto h = holder_seminorm(f, 0.75, all);
  // all-pairs brute force
  double best = 0.0;
  for (std::size_t a = 0; a < g->size(); ++a)
    for (std::size_t b = a + 1; b < g->size(); ++b) {
      const Point p = g->node(a), q = g->node(b);
      best = std::max(best, std::abs(f[a] - f[b]) / std::pow(std::hypot(p.x - q.x, p.y - q.y), 0.75));
    }
  CHECK(h.value == doctest::Approx(best).epsilon(1e-14));
  CHECK(h.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((h.node_a == centre || h.node_b == centre));
  CHECK(h.stride == 1);
}

TEST_CASE("strided Holder seminorm is seeded and bounded by the exact value") {
  auto g = Grid::square(97);
  auto all = [](std::size_t) { return true; };
  const Field f = Field::paint(g, [](double x, double y) { return std::sin(5 * x) * std::cos(3 * y); });
  const auto a = holder_seminorm(f, 0.5, all, 3);
  const auto b = holder_seminorm(f, 0.5, all, 3);
  CHECK(a.stride > 1);
  CHECK(a.value == b.value);
  CHECK(a.node_a == b.node_a);
  const auto exact = holder_seminorm(f, 0.5, all, 3, g->size());
  CHECK(exact.stride == 1);
  CHECK(a.value <= exact.value);
  CHECK(a.value >= 0.5 * exact.value);
}

TEST_CASE("overlap measures") {
  auto g = Grid::disk(65);
  const double area = g->domain_area();
  Triplet u{Field::paint(g, [](double, double) { return 1.0; }), Field::paint(g, [](double, double) { return 1.0; }),
            Field(g)};
  auto o = overlap_measures(u, 0.5);
  CHECK(o.pair[0] == doctest::Approx(area).epsilon(1e-14));
  CHECK(o.pair[1] == 0.0);
  CHECK(o.pair[2] == 0.0);
  CHECK(o.triple == 0.0);
  CHECK(o.nodal == 0.0);
  o = overlap_measures({Field(g), Field(g), Field(g)}, 0.5);
  CHECK(o.pair[0] == 0.0);
  CHECK(o.triple == 0.0);
  CHECK(o.nodal == doctest::Approx(area).epsilon(1e-14));
  CHECK(o.domain_area == doctest::Approx(area).epsilon(1e-14));
}

TEST_CASE("decay probe") {
  auto g = Grid::disk(129);
  const Point c = g->center();
  std::vector<double> radii;
  for (int q = 1; q <= 8; ++q) radii.push_back(0.0125 * q);
  SUBCASE("synthetic exponential profile") {
    const double m = 400.0;
    const double rout = radii.back();
    Triplet u{Field::paint(g, [&](double x, double y) { return std::exp(-std::sqrt(m) * (rout - std::hypot(x - c.x, y - c.y))); }),
              Field::paint(g, [](double, double) { return 1.0; }), Field::paint(g, [](double, double) { return 1.0; })};
    const auto d = decay_probe(bare_state(u, m), 0, c, radii);
    REQUIRE(d.applicable);
    CHECK(d.m == doctest::Approx(m).epsilon(1e-14));
    CHECK(d.slope == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(d.slope <= -0.5);
    CHECK(d.pass);
  }
  SUBCASE("a vanishing partner makes the probe inapplicable") {
    auto t = std::make_shared<const BoundaryTriplet>(make_preset("two_phase", g));
    const auto s = minimize(harmonic_initial_state(t, 100.0), {}).state;
    for (int i = 0; i < 2; ++i) {
      const auto d = decay_probe(s, i, c, radii);
      CHECK_FALSE(d.applicable);
      CHECK_FALSE(d.reason.empty());
    }
  }
  SUBCASE("a ball leaving the domain is inapplicable") {
    const auto d = decay_probe(bare_state(paint3(g, one, one, one), 1.0), 0, {0.1, 0.5}, radii);
    CHECK_FALSE(d.applicable);
  }
}
