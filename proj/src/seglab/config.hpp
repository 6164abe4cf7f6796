#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seglab/boundary.hpp"
#include "seglab/diagnostics.hpp"
#include "seglab/energy.hpp"
#include "seglab/grid.hpp"

namespace seglab {

struct ConfigKey {
  std::string section;
  std::string key;
  std::string fallback;
  std::string help;
};

// Every accepted key with its default, in documentation order.
const std::vector<ConfigKey>& config_keys();
// Text block listing the keys and defaults, used by --help.
std::string config_help();

struct RunConfig {
  // [domain]
  std::string domain = "disk";
  int n = 129;
  double radius = 0.45;
  // [boundary]
  std::string boundary = "symmetric_sine";
  std::map<std::string, double> boundary_params;
  std::string table;
  // [solver]
  std::vector<double> schedule;
  MinimizeOptions minimize;
  std::string init = "harmonic";
  bool competitor = true;
  // [diagnostics]
  bool acf = true;
  bool acf_perturbed = true;
  bool pohozaev = true;
  bool holder = true;
  bool overlap = true;
  bool decay = true;
  std::optional<Point> center;  // default: lattice center
  int radii_count = 32;
  std::optional<double> nu;     // default: sphere search for k = 3
  double eps_exponent = 0.1;
  double mono_tol = 1e-3;
  double seg_tol = 1e-8;
  double threshold = 1e-2;      // relative to the trace maximum
  std::vector<double> threshold_sweep{1e-1, 1e-2, 1e-3};
  std::vector<double> pohozaev_radii{0.1, 0.2};
  int circle_samples = 720;
  std::vector<double> holder_alpha{0.5, 0.75, 0.9};
  double holder_radius = 0.3;
  std::optional<Point> decay_center;
  int decay_component = 2;
  double decay_radius = 0.1;
  double fit_tol = 0.1;
  // [output]
  bool checkpoints = true;
  // [run]
  std::uint64_t seed = 0;
  std::optional<int> workers;

  // Canonical key = value listing of the effective configuration; never
  // includes the worker count.
  std::string render() const;
};

RunConfig default_config();
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& name = "<config>");
// Applies one key; throws Error(config).
void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key,
                      const std::string& value);
void validate_config(const RunConfig& cfg);

GridPtr build_grid(const RunConfig& cfg);
std::shared_ptr<const BoundaryTriplet> build_trace(const RunConfig& cfg, const GridPtr& grid);

// --workers, then SEGLAB_WORKERS, then the config, then 1.
int resolve_workers(std::optional<int> flag, const RunConfig& cfg);

}  // namespace seglab
