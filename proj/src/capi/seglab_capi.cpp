#include "seglab/seglab.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>
#include <new>
#include <optional>
#include <streambuf>
#include <string>

#include "seglab/config.hpp"
#include "seglab/io.hpp"
#include "seglab/pipeline.hpp"

struct seglab_config {
  seglab::RunConfig cfg;
};

struct seglab_state {
  seglab::TripletState state;
};

namespace {

thread_local std::string g_last_error;

std::mutex g_log_mutex;
seglab_log_fn g_log_fn = nullptr;
void* g_log_user = nullptr;

// Line-buffered sink forwarding to the registered callback or stderr.
class LogBuf : public std::streambuf {
 protected:
  int overflow(int ch) override {
    if (ch == traits_type::eof()) return 0;
    if (ch == '\n') {
      flush_line();
    } else {
      line_.push_back(static_cast<char>(ch));
    }
    return ch;
  }

 public:
  ~LogBuf() override {
    if (!line_.empty()) flush_line();
  }

 private:
  void flush_line() {
    std::lock_guard<std::mutex> lock(g_log_mutex);
    if (g_log_fn) {
      g_log_fn(line_.c_str(), g_log_user);
    } else {
      std::cerr << line_ << '\n';
    }
    line_.clear();
  }

  std::string line_;
};

int status_of(seglab::ErrorKind kind) {
  switch (kind) {
    case seglab::ErrorKind::config: return SEGLAB_ERR_CONFIG;
    case seglab::ErrorKind::unconverged: return SEGLAB_ERR_UNCONVERGED;
    case seglab::ErrorKind::invariant: return SEGLAB_ERR_INVARIANT;
    case seglab::ErrorKind::io: return SEGLAB_ERR_IO;
    case seglab::ErrorKind::invalid_argument: return SEGLAB_ERR_INVALID_ARGUMENT;
    case seglab::ErrorKind::domain: return SEGLAB_ERR_DOMAIN;
  }
  return SEGLAB_ERR_INTERNAL;
}

template <class Fn>
int guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const seglab::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return SEGLAB_ERR_INTERNAL;
}

int invalid(const char* what) {
  g_last_error = what;
  return SEGLAB_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

int finished(const seglab::RunStatus& st) {
  if (st.exit_code != SEGLAB_OK) g_last_error = st.message;
  return st.exit_code;
}

}  // namespace

extern "C" {

const char* seglab_version(void) { return "1.0.0"; }

const char* seglab_last_error(void) { return g_last_error.c_str(); }

int seglab_exit_code(int status) {
  if (status >= 0 && status <= 3) return status;
  return 1;
}

void seglab_set_log(seglab_log_fn fn, void* user) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  g_log_fn = fn;
  g_log_user = user;
}

void seglab_string_free(char* s) { std::free(s); }

int seglab_config_default(seglab_config** out) {
  if (!out) return invalid("seglab_config_default: out is NULL");
  return guarded([&] {
    *out = new seglab_config{seglab::default_config()};
    return SEGLAB_OK;
  });
}

int seglab_config_load(const char* path, seglab_config** out) {
  if (!path || !out) return invalid("seglab_config_load: NULL argument");
  return guarded([&] {
    *out = new seglab_config{seglab::parse_config(path)};
    return SEGLAB_OK;
  });
}

int seglab_config_parse(const char* text, seglab_config** out) {
  if (!text || !out) return invalid("seglab_config_parse: NULL argument");
  return guarded([&] {
    *out = new seglab_config{seglab::parse_config_text(text)};
    return SEGLAB_OK;
  });
}

int seglab_config_set(seglab_config* cfg, const char* section, const char* key, const char* value) {
  if (!cfg || !section || !key || !value) return invalid("seglab_config_set: NULL argument");
  return guarded([&] {
    seglab::RunConfig copy = cfg->cfg;
    seglab::set_config_value(copy, section, key, value);
    seglab::validate_config(copy);
    cfg->cfg = std::move(copy);
    return SEGLAB_OK;
  });
}

int seglab_config_render(const seglab_config* cfg, char** out) {
  if (!cfg || !out) return invalid("seglab_config_render: NULL argument");
  return guarded([&] {
    *out = dup_string(cfg->cfg.render());
    return SEGLAB_OK;
  });
}

const char* seglab_config_help(void) {
  static const std::string text = seglab::config_help();
  return text.c_str();
}

int seglab_resolve_workers(const seglab_config* cfg, int flag, int* out) {
  if (!cfg || !out) return invalid("seglab_resolve_workers: NULL argument");
  return guarded([&] {
    *out = seglab::resolve_workers(flag > 0 ? std::optional<int>(flag) : std::nullopt, cfg->cfg);
    return SEGLAB_OK;
  });
}

void seglab_config_free(seglab_config* cfg) { delete cfg; }

int seglab_run_sweep(const seglab_config* cfg, const char* out_dir, int workers) {
  if (!cfg || !out_dir) return invalid("seglab_run_sweep: NULL argument");
  return guarded([&] {
    LogBuf buf;
    std::ostream log(&buf);
    return finished(seglab::run_sweep(cfg->cfg, out_dir, workers < 1 ? 1 : workers, log));
  });
}

int seglab_run_solve(const seglab_config* cfg, const char* out_dir, int workers, const char* state_path) {
  if (!cfg || !out_dir) return invalid("seglab_run_solve: NULL argument");
  return guarded([&] {
    LogBuf buf;
    std::ostream log(&buf);
    const auto state = state_path ? std::optional<std::string>(state_path) : std::nullopt;
    return finished(seglab::run_solve(cfg->cfg, out_dir, workers < 1 ? 1 : workers, state, log));
  });
}

int seglab_run_diag(const seglab_config* cfg, const char* kind, const char* state_path, const char* out_dir,
                    int workers) {
  if (!cfg || !kind || !out_dir) return invalid("seglab_run_diag: NULL argument");
  if (!state_path) {
    g_last_error = "diag needs a state file (--state)";
    return SEGLAB_ERR_CONFIG;
  }
  return guarded([&] {
    LogBuf buf;
    std::ostream log(&buf);
    return seglab::run_diag(cfg->cfg, kind, state_path, out_dir, workers < 1 ? 1 : workers, log);
  });
}

int seglab_run_report(const seglab_config* cfg, const char* out_dir, int workers) {
  if (!cfg || !out_dir) return invalid("seglab_run_report: NULL argument");
  return guarded([&] {
    LogBuf buf;
    std::ostream log(&buf);
    return seglab::run_report(cfg->cfg, out_dir, workers < 1 ? 1 : workers, log);
  });
}

int seglab_sphere(int k, int max_arcs, int resolution, int workers, const char* out_dir, char** json_out) {
  if (!out_dir) return invalid("seglab_sphere: out_dir is NULL");
  return guarded([&] {
    const std::string text = seglab::run_sphere(k, max_arcs, resolution, workers < 1 ? 1 : workers, out_dir);
    if (json_out) *json_out = dup_string(text);
    return SEGLAB_OK;
  });
}

int seglab_state_load(const seglab_config* cfg, const char* path, seglab_state** out) {
  if (!cfg || !path || !out) return invalid("seglab_state_load: NULL argument");
  return guarded([&] {
    seglab::validate_config(cfg->cfg);
    auto grid = seglab::build_grid(cfg->cfg);
    auto trace = seglab::build_trace(cfg->cfg, grid);
    *out = new seglab_state{seglab::load_checkpoint(path, trace)};
    return SEGLAB_OK;
  });
}

int seglab_state_info(const seglab_state* st, int* nx, int* ny, double* beta) {
  if (!st) return invalid("seglab_state_info: state is NULL");
  if (nx) *nx = st->state.grid().nx();
  if (ny) *ny = st->state.grid().ny();
  if (beta) *beta = st->state.beta;
  return SEGLAB_OK;
}

int seglab_state_energy(const seglab_state* st, double out[5]) {
  if (!st || !out) return invalid("seglab_state_energy: NULL argument");
  return guarded([&] {
    const auto e = seglab::energy(st->state);
    for (int i = 0; i < 3; ++i) out[i] = e.dirichlet[i];
    out[3] = e.interaction;
    out[4] = e.total;
    return SEGLAB_OK;
  });
}

int seglab_state_values(const seglab_state* st, int comp, double* buf, size_t len) {
  if (!st || !buf) return invalid("seglab_state_values: NULL argument");
  if (comp < 0 || comp > 2) return invalid("seglab_state_values: component must be 0, 1 or 2");
  const auto& f = st->state.u[comp];
  const auto v = f.values();
  if (len != v.size()) return invalid("seglab_state_values: buffer length must equal nx*ny");
  std::memcpy(buf, v.data(), v.size() * sizeof(double));
  return SEGLAB_OK;
}

void seglab_state_free(seglab_state* st) { delete st; }

}  // extern "C"
