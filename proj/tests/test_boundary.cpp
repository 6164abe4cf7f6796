#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "seglab/boundary.hpp"
#include "seglab/error.hpp"

using namespace seglab;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("symmetric_sine profile") {
  const auto p = symmetric_sine_profile(pi / 3);
  CHECK(p[0] == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
  CHECK(p[1] == 0.0);
  CHECK(p[2] == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
  // one component vanishes at every angle
  for (int k = 0; k < 3600; ++k) {
    const auto q = symmetric_sine_profile(2 * pi * k / 3600.0);
    CHECK(q[0] * q[1] * q[2] == 0.0);
    for (double v : q) CHECK(v >= 0.0);
  }
}

TEST_CASE("presets sample the profile on boundary nodes only") {
  auto g = Grid::disk(65);
  const auto t = make_preset("symmetric_sine", g);
  for (std::size_t k = 0; k < g->size(); ++k) {
    for (int c = 0; c < 3; ++c) {
      if (g->kind(k) == NodeKind::boundary) {
        CHECK(t.values[c][k] == t.profile(g->boundary_angle(k))[c]);
      } else {
        CHECK(t.values[c][k] == 0.0);
      }
    }
  }
  const auto cert = validate_partial_segregation(t, 0.0);
  CHECK(cert.pass);
  CHECK(cert.max_product == 0.0);
}

TEST_CASE("halfcap and two_phase") {
  auto g = Grid::disk(33);
  const auto h = make_preset("halfcap", g, {{"c", 1.0}});
  const auto v = h.profile(0.0);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 0.0);
  CHECK(v[2] == 1.0);
  CHECK(validate_partial_segregation(h, 0.0).pass);

  const auto tp = make_preset("two_phase", g, {{"a1", 1.0}, {"a2", 1.0}, {"wave", 0.0}});
  for (std::size_t k = 0; k < g->size(); ++k) {
    CHECK(tp.values[2][k] == 0.0);
    if (g->kind(k) == NodeKind::boundary) {
      CHECK(tp.values[0][k] == 1.0);
      CHECK(tp.values[1][k] == 1.0);
    }
  }
  CHECK(validate_partial_segregation(tp, 0.0).max_product == 0.0);
  CHECK_THROWS_AS(make_preset("halfcap", g, {{"c", -1.0}}), Error);
  CHECK_THROWS_AS(make_preset("nope", g), Error);
}

TEST_CASE("segregation certificate on constant triplets") {
  auto g = Grid::square(9);
  auto t = make_preset("two_phase", g);
  for (auto& comp : t.values)
    for (std::size_t k = 0; k < g->size(); ++k) comp[k] = g->kind(k) == NodeKind::boundary ? 1.0 : 0.0;
  auto cert = validate_partial_segregation(t, 1e-12);
  CHECK_FALSE(cert.pass);
  CHECK(cert.max_product == 1.0);
  CHECK(g->kind(cert.argmax_node) == NodeKind::boundary);
  for (auto& comp : t.values) std::fill(comp.begin(), comp.end(), 0.0);
  cert = validate_partial_segregation(t, 0.0);
  CHECK(cert.pass);
  CHECK(cert.max_product == 0.0);
}

TEST_CASE("custom table is periodic and piecewise linear") {
  const auto dir = std::filesystem::temp_directory_path() / "seglab_test_table";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "t.csv").string();
  {
    std::ofstream out(path);
    out << "theta,psi1,psi2,psi3\n0,1,0,0\n2.0943951023931953,0,1,0\n4.1887902047863905,0,0,1\n";
  }
  auto g = Grid::disk(33);
  const auto t = make_custom(read_trace_table(path), g);
  const auto mid = t.profile(2.0943951023931953 / 2);
  CHECK(mid[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mid[1] == doctest::Approx(0.5).epsilon(1e-14));
  const auto wrap = t.profile(2 * pi - 2.0943951023931953 / 2);
  CHECK(wrap[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(wrap[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(validate_partial_segregation(t, t.default_seg_tol).pass);
  CHECK(t.lipschitz_bound == doctest::Approx(3.0 / (2 * pi)).epsilon(1e-2));
  CHECK_THROWS_AS(make_custom({{1.0, {1, 0, 0}}, {0.5, {0, 1, 0}}}, g), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("lipschitz estimate of the symmetric profile") {
  // steepest slope: (3/4) cos(0) on the support of each component
  CHECK(estimate_lipschitz(symmetric_sine_profile) == doctest::Approx(0.75).epsilon(1e-3));
}
