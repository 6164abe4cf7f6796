#include "seglab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "seglab/error.hpp"

namespace seglab {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::map<std::string, std::string> parse_pairs(const std::vector<std::string>& tokens,
                                               std::size_t first, const std::string& where) {
  std::map<std::string, std::string> kv;
  for (std::size_t k = first; k < tokens.size(); ++k) {
    const auto eq = tokens[k].find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::config, where + ": malformed header token '" + tokens[k] + "'");
    }
    kv[tokens[k].substr(0, eq)] = tokens[k].substr(eq + 1);
  }
  return kv;
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key,
                           const std::string& where) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorKind::config, where + ": header lacks '" + key + "='");
  return it->second;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, const std::string& what) {
  double v = 0.0;
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorKind::config, what + ": cannot parse '" + token + "' as a number");
  }
  return v;
}

long long parse_int(const std::string& token, const std::string& what) {
  long long v = 0;
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorKind::config, what + ": cannot parse '" + token + "' as an integer");
  }
  return v;
}

void write_dump(std::ostream& out, const std::vector<const Field*>& fields,
                const std::optional<CheckpointMeta>& meta) {
  if (fields.empty()) throw Error(ErrorKind::invalid_argument, "write_dump: no fields");
  const Grid& g = fields.front()->grid();
  out << "# segfield v1 nx=" << g.nx() << " ny=" << g.ny() << " hx=" << format_double(g.hx())
      << " hy=" << format_double(g.hy()) << " ox=" << format_double(g.ox())
      << " oy=" << format_double(g.oy()) << " comp=" << fields.size() << '\n';
  if (meta) {
    out << "# meta beta=" << format_double(meta->beta) << " sweeps=" << meta->sweeps
        << " total=" << format_double(meta->total)
        << " interaction=" << format_double(meta->interaction) << '\n';
  }
  for (std::size_t c = 0; c < fields.size(); ++c) {
    if (c > 0) out << '\n';
    const Field& f = *fields[c];
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        if (i > 0) out << ' ';
        out << format_double(f.at(i, j));
      }
      out << '\n';
    }
  }
}

FieldDump read_dump(std::istream& in, const std::string& name) {
  FieldDump d;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::config, name + ": empty file");
  auto tokens = split_ws(line);
  if (tokens.size() < 3 || tokens[0] != "#" || tokens[1] != "segfield" || tokens[2] != "v1") {
    throw Error(ErrorKind::config, name + ": line 1 must start with '# segfield v1'");
  }
  {
    const auto kv = parse_pairs(tokens, 3, name);
    for (const auto& [k, v] : kv) {
      if (k != "nx" && k != "ny" && k != "hx" && k != "hy" && k != "ox" && k != "oy" && k != "comp") {
        throw Error(ErrorKind::config, name + ": unknown header token '" + k + "=" + v + "'");
      }
    }
    auto& h = d.header;
    h.nx = static_cast<int>(parse_int(require(kv, "nx", name), name + " nx"));
    h.ny = static_cast<int>(parse_int(require(kv, "ny", name), name + " ny"));
    h.hx = parse_double(require(kv, "hx", name), name + " hx");
    h.hy = parse_double(require(kv, "hy", name), name + " hy");
    h.ox = parse_double(require(kv, "ox", name), name + " ox");
    h.oy = parse_double(require(kv, "oy", name), name + " oy");
    h.comp = static_cast<int>(parse_int(require(kv, "comp", name), name + " comp"));
    if (h.nx < 2 || h.ny < 2 || h.comp < 1 || !(h.hx > 0.0) || !(h.hy > 0.0)) {
      throw Error(ErrorKind::config, name + ": header values out of range");
    }
  }
  const auto pos = in.tellg();
  if (std::getline(in, line) && line.rfind("# meta", 0) == 0) {
    tokens = split_ws(line);
    const auto kv = parse_pairs(tokens, 2, name);
    CheckpointMeta m;
    m.beta = parse_double(require(kv, "beta", name), name + " beta");
    m.sweeps = static_cast<int>(parse_int(require(kv, "sweeps", name), name + " sweeps"));
    m.total = parse_double(require(kv, "total", name), name + " total");
    m.interaction = parse_double(require(kv, "interaction", name), name + " interaction");
    d.meta = m;
  } else {
    in.clear();
    in.seekg(pos);
  }
  const auto& h = d.header;
  for (int c = 0; c < h.comp; ++c) {
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(h.nx) * h.ny);
    int rows = 0;
    while (rows < h.ny && std::getline(in, line)) {
      tokens = split_ws(line);
      if (tokens.empty()) {
        if (rows == 0) continue;
        break;
      }
      if (static_cast<int>(tokens.size()) != h.nx) {
        std::ostringstream os;
        os << name << ": component " << c + 1 << " row " << rows + 1 << " has " << tokens.size()
           << " values, expected " << h.nx;
        throw Error(ErrorKind::config, os.str());
      }
      for (const auto& t : tokens) vals.push_back(parse_double(t, name));
      ++rows;
    }
    if (rows != h.ny) {
      std::ostringstream os;
      os << name << ": truncated data, component " << c + 1 << " expected " << h.ny
         << " rows, found " << rows;
      throw Error(ErrorKind::config, os.str());
    }
    d.components.push_back(std::move(vals));
  }
  return d;
}

void dump_field(const std::string& path, const Field& f) {
  std::ostringstream os;
  write_dump(os, {&f});
  write_text_file(path, os.str());
}

namespace {

void check_header(const DumpHeader& h, const Grid& g, const std::string& name) {
  if (h.nx != g.nx() || h.ny != g.ny() || !same_bits(h.hx, g.hx()) || !same_bits(h.hy, g.hy()) ||
      !same_bits(h.ox, g.ox()) || !same_bits(h.oy, g.oy())) {
    throw Error(ErrorKind::config, name + ": lattice in the file does not match the configured grid (nx=" +
                                       std::to_string(g.nx()) + " ny=" + std::to_string(g.ny()) +
                                       " hx=" + format_double(g.hx()) + ")");
  }
}

}  // namespace

Field load_field(const std::string& path, const GridPtr& grid) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  auto d = read_dump(in, path);
  check_header(d.header, *grid, path);
  if (d.header.comp != 1) throw Error(ErrorKind::config, path + ": expected comp=1");
  const auto& v = d.components.front();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (grid->kind(k) == NodeKind::exterior && v[k] != 0.0) {
      throw Error(ErrorKind::invariant, path + ": nonzero value at an exterior node");
    }
  }
  return Field(grid, v);
}

void save_checkpoint(const std::string& path, const TripletState& s) {
  const auto e = energy(s);
  std::ostringstream os;
  write_dump(os, {&s.u[0], &s.u[1], &s.u[2]},
             CheckpointMeta{s.beta, s.sweeps, e.total, e.interaction});
  write_text_file(path, os.str());
}

TripletState load_checkpoint(const std::string& path, std::shared_ptr<const BoundaryTriplet> trace) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open checkpoint " + path);
  auto d = read_dump(in, path);
  const Grid& g = *trace->grid;
  check_header(d.header, g, path);
  if (d.header.comp != 3) throw Error(ErrorKind::config, path + ": a checkpoint needs comp=3");
  if (!d.meta) throw Error(ErrorKind::config, path + ": missing '# meta' line");
  if (!(d.meta->beta >= 0.0) || !std::isfinite(d.meta->beta)) {
    throw Error(ErrorKind::config, path + ": beta in the meta line must be finite and >= 0");
  }
  Triplet u;
  for (int c = 0; c < 3; ++c) {
    const auto& v = d.components[c];
    for (std::size_t k = 0; k < v.size(); ++k) {
      const NodeKind kind = g.kind(k);
      std::string problem;
      if (!std::isfinite(v[k])) problem = "non-finite value";
      else if (kind == NodeKind::exterior && v[k] != 0.0) problem = "nonzero value outside the domain";
      else if (kind == NodeKind::boundary && v[k] != trace->values[c][k])
        problem = "boundary value differs from the trace";
      if (!problem.empty()) {
        std::ostringstream os;
        os << path << ": " << problem << " in component " << c + 1 << " at node (" << g.col(k)
           << ", " << g.row(k) << ")";
        throw Error(ErrorKind::invariant, os.str());
      }
    }
    u[c] = Field(trace->grid, v);
  }
  TripletState s = make_state(trace, d.meta->beta, u);
  s.sweeps = d.meta->sweeps;
  const auto inv = check_invariants(s);
  if (!inv.nonnegative || !inv.max_principle) {
    std::ostringstream os;
    os << path << ": invariant violated (min value " << format_double(inv.min_value)
       << ", excess over the trace maximum " << format_double(inv.max_excess) << ")";
    throw Error(ErrorKind::invariant, os.str());
  }
  return s;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace seglab
