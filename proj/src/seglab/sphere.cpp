#include "seglab/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "seglab/error.hpp"
#include "seglab/parallel.hpp"

namespace seglab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Tolerance of the open-interior membership test used by the probe.
constexpr double kInteriorTol = 1e-12;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a >= kTwoPi ? 0.0 : a;
}

bool in_interior(const ArcSupport& s, double theta) {
  if (s.full_circle) return true;
  for (const Arc& a : s.arcs) {
    const double start = a.center - 0.5 * a.length;
    const double d = wrap_angle(theta - start);
    if (d > kInteriorTol && d < a.length - kInteriorTol) return true;
  }
  return false;
}

}  // namespace

double gamma_exponent(double t, int dimension) {
  if (dimension < 2) throw Error(ErrorKind::invalid_argument, "gamma: dimension must be >= 2");
  if (!(t >= 0.0)) throw Error(ErrorKind::invalid_argument, "gamma: argument must be >= 0");
  if (std::isinf(t)) return kInf;
  const double half = 0.5 * (dimension - 2);
  if (dimension == 2) return std::sqrt(t);
  return std::sqrt(half * half + t) - half;
}

double phi_delta(double r, double delta, int dimension) {
  if (dimension == 2) {
    throw Error(ErrorKind::invalid_argument,
                "phi_delta is defined for N >= 3; use the unit weight in dimension 2");
  }
  if (dimension < 2) throw Error(ErrorKind::invalid_argument, "phi_delta: dimension must be >= 3");
  if (!(delta > 0.0)) throw Error(ErrorKind::invalid_argument, "phi_delta: delta must be > 0");
  if (!(r >= 0.0)) throw Error(ErrorKind::invalid_argument, "phi_delta: r must be >= 0");
  const double n = dimension;
  if (r > delta) return std::pow(r, 2.0 - n);
  return 0.5 * n * std::pow(delta, 2.0 - n) + 0.5 * (2.0 - n) * std::pow(delta, -n) * r * r;
}

ArcSupport normalize_support(const ArcSupport& support) {
  if (support.full_circle) return ArcSupport::full();
  struct Interval {
    double lo, hi;
  };
  std::vector<Interval> iv;
  for (const Arc& a : support.arcs) {
    if (!(a.length > 0.0)) continue;
    if (a.length >= kTwoPi) return ArcSupport::full();
    const double lo = wrap_angle(a.center - 0.5 * a.length);
    const double hi = lo + a.length;
    if (hi > kTwoPi) {
      iv.push_back({lo, kTwoPi});
      iv.push_back({0.0, hi - kTwoPi});
    } else {
      iv.push_back({lo, hi});
    }
  }
  if (iv.empty()) return {};
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  std::vector<Interval> merged{iv.front()};
  for (std::size_t k = 1; k < iv.size(); ++k) {
    if (iv[k].lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv[k].hi);
    } else {
      merged.push_back(iv[k]);
    }
  }
  // Join the piece ending at 2pi with the one starting at 0.
  if (merged.size() > 1 && merged.front().lo <= 0.0 && merged.back().hi >= kTwoPi) {
    merged.front().lo = merged.back().lo - kTwoPi;
    merged.pop_back();
  }
  if (merged.size() == 1 && merged.front().hi - merged.front().lo >= kTwoPi) {
    return ArcSupport::full();
  }
  ArcSupport out;
  for (const auto& m : merged) {
    out.arcs.push_back({wrap_angle(0.5 * (m.lo + m.hi)), m.hi - m.lo});
  }
  return out;
}

double arc_lambda(const ArcSupport& support) {
  const ArcSupport s = normalize_support(support);
  if (s.full_circle) return 0.0;
  if (s.arcs.empty()) return kInf;
  double longest = 0.0;
  for (const Arc& a : s.arcs) longest = std::max(longest, a.length);
  const double q = kPi / longest;
  return q * q;
}

FeasibilityReport check_feasibility(const ArcConfig& config, int probe_samples) {
  FeasibilityReport rep;
  if (config.components.empty()) return rep;
  auto covered = [&](double theta) {
    for (const auto& c : config.components)
      if (!in_interior(c, theta)) return false;
    return true;
  };
  // Membership is constant between consecutive arc endpoints, so testing one
  // angle per gap is exact; the uniform probe runs on top of it.
  std::vector<double> cuts;
  for (const auto& c : config.components) {
    if (c.full_circle) continue;
    for (const Arc& a : c.arcs) {
      cuts.push_back(wrap_angle(a.center - 0.5 * a.length));
      cuts.push_back(wrap_angle(a.center + 0.5 * a.length));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> tests;
  if (cuts.empty()) {
    tests.push_back(0.0);
  } else {
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      const double a = cuts[k];
      const double b = k + 1 < cuts.size() ? cuts[k + 1] : cuts.front() + kTwoPi;
      if (b - a > 4.0 * kInteriorTol) tests.push_back(wrap_angle(0.5 * (a + b)));
    }
  }
  for (int s = 0; s < probe_samples; ++s) tests.push_back(kTwoPi * s / probe_samples);
  for (double theta : tests) {
    if (covered(theta)) {
      rep.feasible = false;
      rep.violating_angle = theta;
      return rep;
    }
  }
  return rep;
}

double config_value(const ArcConfig& config, int probe_samples) {
  const auto feas = check_feasibility(config, probe_samples);
  if (!feas.feasible) {
    std::ostringstream os;
    os << "config_value: angle " << feas.violating_angle << " lies in every support";
    throw Error(ErrorKind::invalid_argument, os.str());
  }
  double value = 0.0;
  for (const auto& c : config.components) {
    if (c.empty()) return kInf;
    value += gamma_exponent(arc_lambda(c), 2);
  }
  return value;
}

ArcConfig halfcap_config(int k) {
  ArcConfig c;
  c.components.push_back(ArcSupport::single(0.0, kPi));
  c.components.push_back(ArcSupport::single(kPi, kPi));
  for (int j = 2; j < k; ++j) c.components.push_back(ArcSupport::full());
  return c;
}

ArcConfig symmetric_config(int k) {
  ArcConfig c;
  const double len = kTwoPi * (k - 1) / k;
  for (int j = 0; j < k; ++j) {
    c.components.push_back(ArcSupport::single(wrap_angle(0.5 * len + kTwoPi * j / k), len));
  }
  return c;
}

ArcConfig rotated(const ArcConfig& config, double angle) {
  ArcConfig out = config;
  for (auto& c : out.components)
    for (auto& a : c.arcs) a.center = wrap_angle(a.center + angle);
  return out;
}

namespace {

// Arc support on an n-cell angular lattice.
struct LatticeOption {
  bool full = false;
  std::vector<std::pair<int, int>> arcs;  // (start cell, length in cells), longest first
  int key = 0;                            // longest arc length; n for the full circle
  double value = 0.0;
};

std::vector<LatticeOption> lattice_options(int n, int max_arcs) {
  std::vector<LatticeOption> out;
  out.push_back({true, {}, n, 0.0});
  for (int len = n - 1; len >= 1; --len) {
    const double value = 0.5 * n / len;
    for (int start = 0; start < n; ++start) {
      out.push_back({false, {{start, len}}, len, value});
    }
  }
  if (max_arcs >= 2) {
    // Extra arcs no longer than the first, separated from it and each other
    // by at least one cell.
    std::vector<LatticeOption> extra;
    for (const auto& base : out) {
      if (base.full) continue;
      std::vector<LatticeOption> frontier{base};
      for (int level = 1; level < max_arcs; ++level) {
        std::vector<LatticeOption> next;
        for (const auto& opt : frontier) {
          std::vector<char> used(n, 0);
          for (auto [s, l] : opt.arcs)
            for (int c = -1; c <= l; ++c) used[((s + c) % n + n) % n] = 1;
          const auto [last_start, last_len] = opt.arcs.back();
          for (int start = 0; start < n; ++start) {
            for (int len = 1; len <= opt.key; ++len) {
              // Canonical order: later arcs start after the previous one.
              if (opt.arcs.size() > 1 && start <= last_start) continue;
              bool ok = true;
              for (int c = 0; c < len && ok; ++c) ok = !used[(start + c) % n];
              if (!ok) continue;
              LatticeOption o = opt;
              o.arcs.push_back({start, len});
              next.push_back(o);
            }
          }
          (void)last_len;
        }
        extra.insert(extra.end(), next.begin(), next.end());
        frontier = std::move(next);
      }
    }
    out.insert(out.end(), extra.begin(), extra.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const LatticeOption& a, const LatticeOption& b) { return a.key > b.key; });
  }
  return out;
}

ArcSupport to_support(const LatticeOption& o, int n) {
  if (o.full) return ArcSupport::full();
  ArcSupport s;
  const double cell = kTwoPi / n;
  for (auto [start, len] : o.arcs) s.arcs.push_back({wrap_angle((start + 0.5 * len) * cell), len * cell});
  return s;
}

struct LatticeSearch {
  int n = 0;
  int k = 0;
  const std::vector<LatticeOption>* options = nullptr;
  long long budget = 0;
  long long nodes = 0;
  bool exhausted = false;
  double best = 0.0;
  std::vector<std::size_t> best_choice;
  std::vector<std::size_t> choice;
  std::vector<int> counts;

  bool apply(const LatticeOption& o, int delta) {
    bool ok = true;
    auto bump = [&](int c) {
      counts[c] += delta;
      if (counts[c] >= k) ok = false;
    };
    if (o.full) {
      for (int c = 0; c < n; ++c) bump(c);
    } else {
      for (auto [s, l] : o.arcs)
        for (int c = 0; c < l; ++c) bump((s + c) % n);
    }
    return ok;
  }

  void dfs(int comp, double partial, int prev_key, bool have_arc) {
    if (++nodes > budget) {
      exhausted = true;
      return;
    }
    if (comp == k) {
      if (partial < best - 1e-12) {
        best = partial;
        best_choice = choice;
      }
      return;
    }
    const auto& opts = *options;
    for (std::size_t idx = 0; idx < opts.size() && !exhausted; ++idx) {
      const auto& o = opts[idx];
      if (o.key > prev_key) continue;
      if (partial + o.value >= best - 1e-12) break;  // values ascend along the list
      if (!have_arc && !o.full && o.arcs.front().first != 0) continue;
      const bool ok = apply(o, +1);
      if (ok) {
        choice.push_back(idx);
        dfs(comp + 1, partial + o.value, o.key, have_arc || !o.full);
        choice.pop_back();
      }
      apply(o, -1);
    }
  }
};

struct LatticeResult {
  double value = kInf;
  ArcConfig config;
  bool exhausted = false;
  long long nodes = 0;
};

LatticeResult lattice_search(int k, int n, int max_arcs, double seed_value, long long budget,
                             int workers) {
  const auto options = lattice_options(n, max_arcs);
  // Top-level tasks: the option of the first component.
  std::vector<std::size_t> firsts;
  for (std::size_t idx = 0; idx < options.size(); ++idx) {
    const auto& o = options[idx];
    if (!o.full && o.arcs.front().first != 0) continue;
    if (o.value >= seed_value - 1e-12) continue;
    firsts.push_back(idx);
  }
  const long long per_task = std::max<long long>(1, budget / std::max<std::size_t>(1, firsts.size()));
  std::vector<LatticeSearch> tasks(firsts.size());
  parallel_for(firsts.size(), workers, [&](std::size_t t) {
    LatticeSearch s;
    s.n = n;
    s.k = k;
    s.options = &options;
    s.budget = per_task;
    s.best = seed_value;
    s.counts.assign(n, 0);
    const auto& o = options[firsts[t]];
    if (s.apply(o, +1)) {
      s.choice.push_back(firsts[t]);
      s.dfs(1, o.value, o.key, !o.full);
    }
    tasks[t] = std::move(s);
  });
  LatticeResult res;
  double best = seed_value;
  for (const auto& s : tasks) {
    res.nodes += s.nodes;
    res.exhausted = res.exhausted || s.exhausted;
    if (!s.best_choice.empty() && s.best < best - 1e-12) {
      best = s.best;
      ArcConfig c;
      for (std::size_t idx : s.best_choice) c.components.push_back(to_support(options[idx], n));
      res.config = c;
      res.value = s.best;
    }
  }
  return res;
}

// Coordinate descent on arc endpoints; only strict improvements are taken.
double refine(ArcConfig& config, double value, const SearchOptions& opt, double step,
              std::vector<SearchTraceEntry>& trace) {
  long long it = 0;
  for (int halving = 0; halving < opt.refine_iterations; ++halving) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (auto& comp : config.components) {
        if (comp.full_circle) continue;
        for (auto& arc : comp.arcs) {
          for (int side = 0; side < 2; ++side) {
            for (int dir = -1; dir <= 1; dir += 2) {
              const Arc saved = arc;
              const double d = dir * step;
              double lo = arc.center - 0.5 * arc.length, hi = arc.center + 0.5 * arc.length;
              (side == 0 ? lo : hi) += (side == 0 ? -d : d);
              if (!(hi - lo > 0.0)) continue;
              arc.length = hi - lo;
              arc.center = wrap_angle(0.5 * (lo + hi));
              double v = kInf;
              if (check_feasibility(config, opt.probe_samples).feasible) v = config_value(config, opt.probe_samples);
              if (v < value - 1e-15) {
                value = v;
                improved = true;
                trace.push_back({"refine", ++it, value});
              } else {
                arc = saved;
              }
            }
          }
        }
      }
    }
    step *= 0.5;
  }
  return value;
}

}  // namespace

SearchResult search_alpha(int k, const SearchOptions& opt) {
  if (k < 2) throw Error(ErrorKind::invalid_argument, "search_alpha: k must be >= 2");
  if (opt.resolution < 4) throw Error(ErrorKind::invalid_argument, "search_alpha: resolution must be >= 4");
  if (opt.max_arcs < 1) throw Error(ErrorKind::invalid_argument, "search_alpha: max_arcs must be >= 1");
  SearchResult res;
  long long step = 0;
  // Seeds first, so the search never reports worse than the explicit competitors.
  for (const ArcConfig& seed : {halfcap_config(k), symmetric_config(k)}) {
    if (!check_feasibility(seed, opt.probe_samples).feasible) continue;
    const double v = config_value(seed, opt.probe_samples);
    res.trace.push_back({"seed", ++step, v});
    if (v < res.best_value) {
      res.best_value = v;
      res.best = seed;
    }
  }
  auto consider = [&](const LatticeResult& lr, const char* phase) {
    res.budget_exhausted = res.budget_exhausted || lr.exhausted;
    if (lr.config.components.empty()) return;
    if (!check_feasibility(lr.config, opt.probe_samples).feasible) return;
    const double v = config_value(lr.config, opt.probe_samples);
    res.trace.push_back({phase, ++step, v});
    if (v < res.best_value - 1e-12) {
      res.best_value = v;
      res.best = lr.config;
    }
  };
  consider(lattice_search(k, opt.resolution, 1, res.best_value, opt.node_budget, opt.workers), "lattice");
  if (opt.max_arcs >= 2) {
    consider(lattice_search(k, opt.multi_arc_resolution, opt.max_arcs, res.best_value,
                            opt.node_budget, opt.workers),
             "lattice_multi_arc");
  }
  res.best_value = refine(res.best, res.best_value, opt, kTwoPi / opt.resolution, res.trace);
  return res;
}

}  // namespace seglab
