#include "seglab/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "seglab/error.hpp"

namespace seglab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

BoundaryTriplet assemble(GridPtr grid, TraceProfile profile, std::string name,
                         std::map<std::string, double> params, double seg_tol) {
  BoundaryTriplet t;
  t.grid = grid;
  t.profile = std::move(profile);
  t.preset_name = std::move(name);
  t.parameters = std::move(params);
  t.default_seg_tol = seg_tol;
  for (auto& v : t.values) v.assign(grid->size(), 0.0);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    if (grid->kind(k) != NodeKind::boundary) continue;
    const auto psi = t.profile(grid->boundary_angle(k));
    for (int c = 0; c < 3; ++c) {
      if (!(psi[c] >= 0.0) || !std::isfinite(psi[c])) {
        throw Error(ErrorKind::invalid_argument,
                    "boundary trace must be finite and nonnegative (preset " + t.preset_name + ")");
      }
      t.values[c][k] = psi[c];
    }
  }
  t.lipschitz_bound = estimate_lipschitz(t.profile);
  return t;
}

}  // namespace

double BoundaryTriplet::max_value(int component) const {
  double m = 0.0;
  for (double v : values[component]) m = std::max(m, v);
  return m;
}

double BoundaryTriplet::max_value() const {
  return std::max({max_value(0), max_value(1), max_value(2)});
}

std::array<double, 3> symmetric_sine_profile(double theta) {
  constexpr double third = kTwoPi / 3.0;
  constexpr double support = 2.0 * third;
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  const int sector = std::clamp(static_cast<int>(std::floor(theta / third)), 0, 2);
  // Each sector lies outside exactly one support; that component is pinned
  // to zero so every node has an exactly vanishing component.
  const int silent = (sector + 1) % 3;
  std::array<double, 3> psi{};
  for (int c = 0; c < 3; ++c) {
    if (c == silent) continue;
    double phi = std::fmod(theta - third * c, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    psi[c] = phi < support ? std::max(0.0, std::sin(0.75 * phi)) : 0.0;
  }
  return psi;
}

double estimate_lipschitz(const TraceProfile& profile, int samples) {
  double lip = 0.0;
  const double dt = kTwoPi / samples;
  auto prev = profile(0.0);
  const auto first = prev;
  for (int s = 1; s <= samples; ++s) {
    const auto cur = s == samples ? first : profile(dt * s);
    for (int c = 0; c < 3; ++c) lip = std::max(lip, std::abs(cur[c] - prev[c]) / dt);
    prev = cur;
  }
  return lip;
}

BoundaryTriplet make_preset(const std::string& name, GridPtr grid,
                            const std::map<std::string, double>& params) {
  if (name == "symmetric_sine") {
    const double k = param(params, "k", 3.0);
    if (k != 3.0) throw Error(ErrorKind::invalid_argument, "symmetric_sine supports k = 3 only");
    return assemble(grid, symmetric_sine_profile, name, {{"k", 3.0}}, 0.0);
  }
  if (name == "halfcap") {
    const double c = param(params, "c", 1.0);
    if (!(c > 0.0)) throw Error(ErrorKind::invalid_argument, "halfcap needs c > 0");
    auto profile = [c](double theta) -> std::array<double, 3> {
      const double co = std::cos(theta);
      return {std::max(co, 0.0), std::max(-co, 0.0), c};
    };
    return assemble(grid, profile, name, {{"c", c}}, 0.0);
  }
  if (name == "two_phase") {
    const double a1 = param(params, "a1", 1.0), a2 = param(params, "a2", 1.0);
    const double wave = param(params, "wave", 1.0);
    if (!(a1 >= 0.0) || !(a2 >= 0.0) || !(wave >= 0.0 && wave <= 1.0)) {
      throw Error(ErrorKind::invalid_argument, "two_phase needs a1, a2 >= 0 and wave in [0, 1]");
    }
    auto profile = [a1, a2, wave](double theta) -> std::array<double, 3> {
      return {a1 * (1.0 - 0.5 * wave + 0.5 * wave * std::cos(theta)),
              a2 * (1.0 - 0.5 * wave + 0.5 * wave * std::sin(theta)), 0.0};
    };
    return assemble(grid, profile, name, {{"a1", a1}, {"a2", a2}, {"wave", wave}}, 0.0);
  }
  throw Error(ErrorKind::invalid_argument,
              "unknown boundary preset '" + name +
                  "' (valid: symmetric_sine, halfcap, two_phase, custom)");
}

BoundaryTriplet make_custom(std::vector<TableRow> rows, GridPtr grid) {
  if (rows.size() < 2) throw Error(ErrorKind::invalid_argument, "custom trace table needs >= 2 rows");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k].theta > rows[k - 1].theta)) {
      throw Error(ErrorKind::invalid_argument, "custom trace table: theta must increase strictly");
    }
  }
  if (rows.back().theta - rows.front().theta >= kTwoPi) {
    throw Error(ErrorKind::invalid_argument, "custom trace table: theta must span less than 2pi");
  }
  auto profile = [rows = std::move(rows)](double theta) -> std::array<double, 3> {
    const double t0 = rows.front().theta;
    double t = std::fmod(theta - t0, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    t += t0;
    auto it = std::upper_bound(rows.begin(), rows.end(), t,
                               [](double v, const TableRow& r) { return v < r.theta; });
    const TableRow& a = *(it - 1);
    const TableRow& b = it == rows.end() ? rows.front() : *it;
    const double tb = it == rows.end() ? b.theta + kTwoPi : b.theta;
    const double s = (t - a.theta) / (tb - a.theta);
    std::array<double, 3> psi{};
    for (int c = 0; c < 3; ++c) psi[c] = a.psi[c] + s * (b.psi[c] - a.psi[c]);
    return psi;
  };
  return assemble(grid, profile, "custom", {}, 1e-12);
}

std::vector<TableRow> read_trace_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open trace table " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::config, "trace table " + path + " is empty");
  std::vector<TableRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    TableRow r{};
    if (!(ls >> r.theta >> r.psi[0] >> r.psi[1] >> r.psi[2])) {
      throw Error(ErrorKind::config,
                  "trace table " + path + ":" + std::to_string(lineno) + ": expected 4 numbers");
    }
    rows.push_back(r);
  }
  return rows;
}

SegregationCertificate validate_partial_segregation(const BoundaryTriplet& t, double seg_tol) {
  SegregationCertificate cert;
  bool first = true;
  for (std::size_t k = 0; k < t.grid->size(); ++k) {
    if (t.grid->kind(k) != NodeKind::boundary) continue;
    const double p = t.values[0][k] * t.values[1][k] * t.values[2][k];
    if (first || p > cert.max_product) {
      cert.max_product = p;
      cert.argmax_node = k;
      first = false;
    }
  }
  cert.pass = cert.max_product <= seg_tol;
  return cert;
}

}  // namespace seglab
