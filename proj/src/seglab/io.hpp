#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "seglab/energy.hpp"
#include "seglab/grid.hpp"

namespace seglab {

// Shortest decimal that parses back to the same double.
std::string format_double(double v);
// Strict parse of a whole token; throws Error(config) naming the token.
double parse_double(const std::string& token, const std::string& what);
long long parse_int(const std::string& token, const std::string& what);

struct DumpHeader {
  int nx = 0;
  int ny = 0;
  double hx = 0.0;
  double hy = 0.0;
  double ox = 0.0;
  double oy = 0.0;
  int comp = 0;
};

struct CheckpointMeta {
  double beta = 0.0;
  int sweeps = 0;
  double total = 0.0;
  double interaction = 0.0;
};

struct FieldDump {
  DumpHeader header;
  std::optional<CheckpointMeta> meta;
  std::vector<std::vector<double>> components;  // comp vectors of nx*ny values
};

void write_dump(std::ostream& out, const std::vector<const Field*>& fields,
                const std::optional<CheckpointMeta>& meta = std::nullopt);
FieldDump read_dump(std::istream& in, const std::string& name = "<stream>");

void dump_field(const std::string& path, const Field& f);
Field load_field(const std::string& path, const GridPtr& grid);

void save_checkpoint(const std::string& path, const TripletState& s);
// Rebuilds the state on the given grid and trace. The header must match the
// grid exactly; boundary values must equal the trace and the state must pass
// the invariant gate (Error(invariant) otherwise).
TripletState load_checkpoint(const std::string& path, std::shared_ptr<const BoundaryTriplet> trace);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace seglab
