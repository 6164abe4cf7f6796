#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "seglab/grid.hpp"

namespace seglab {

// Trace values (psi1, psi2, psi3) as a function of the boundary angle.
using TraceProfile = std::function<std::array<double, 3>(double theta)>;

struct BoundaryTriplet {
  GridPtr grid;
  // Per-node values; nonzero only on boundary nodes.
  std::array<std::vector<double>, 3> values;
  double lipschitz_bound = 0.0;
  std::string preset_name;
  std::map<std::string, double> parameters;
  TraceProfile profile;
  double default_seg_tol = 0.0;

  double max_value() const;
  double max_value(int component) const;
};

struct TableRow {
  double theta;
  std::array<double, 3> psi;
};

// Presets: "symmetric_sine" (k = 3), "halfcap" (parameter c > 0),
// "two_phase" (parameters a1, a2, wave). Unknown names throw and list the
// valid ones.
BoundaryTriplet make_preset(const std::string& name, GridPtr grid,
                            const std::map<std::string, double>& params = {});

// Piecewise-linear periodic profile through the table rows.
BoundaryTriplet make_custom(std::vector<TableRow> rows, GridPtr grid);

// Reads `theta,psi1,psi2,psi3` rows (header line required).
std::vector<TableRow> read_trace_table(const std::string& path);

std::array<double, 3> symmetric_sine_profile(double theta);

struct SegregationCertificate {
  double max_product = 0.0;
  std::size_t argmax_node = 0;
  bool pass = true;
};

SegregationCertificate validate_partial_segregation(const BoundaryTriplet& t, double seg_tol);

// Lipschitz constant in theta, estimated on a fine uniform angle sample.
double estimate_lipschitz(const TraceProfile& profile, int samples = 4096);

}  // namespace seglab
