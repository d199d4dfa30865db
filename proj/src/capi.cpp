#include "platetopo/platetopo.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "platetopo/config.hpp"
#include "platetopo/error.hpp"
#include "platetopo/optimizer.hpp"
#include "platetopo/output.hpp"
#include "platetopo/verify.hpp"

struct pt_config {
  platetopo::RunConfig cfg;
};

struct pt_run {
  platetopo::RunRecord rec;
  std::string stop;
};

namespace {

thread_local std::string g_last_error;

pt_status to_status(platetopo::ErrorCode c) { return static_cast<pt_status>(static_cast<int>(c)); }

template <class F>
pt_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return PT_OK;
  } catch (const platetopo::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PT_ERR_INTERNAL;
  }
}

void need(bool cond, const char* what) { platetopo::require(cond, what); }

pt_cost_row row_of(const platetopo::IterationRecord& r) {
  return {r.iter, r.cost.t1, r.cost.t2, r.cost.t3, r.cost.J, r.lambda, r.cost.components};
}

class CallbackObserver : public platetopo::RunObserver {
 public:
  CallbackObserver(pt_progress_fn fn, void* user, std::unique_ptr<platetopo::OutputWriter> writer)
      : fn_(fn), user_(user), writer_(std::move(writer)) {}
  void on_iteration(const platetopo::IterationRecord& r, const platetopo::PlateState& s,
                    const std::vector<platetopo::OrbitTrack>& tracks) override {
    if (writer_) writer_->on_iteration(r, s, tracks);
    if (fn_) {
      const pt_cost_row row = row_of(r);
      fn_(user_, &row);
    }
  }
  void on_finish(const platetopo::RunRecord& rec, const platetopo::PlateState* last) override {
    if (writer_) writer_->on_finish(rec, last);
  }

 private:
  pt_progress_fn fn_;
  void* user_;
  std::unique_ptr<platetopo::OutputWriter> writer_;
};

}  // namespace

extern "C" {

const char* pt_version(void) { return "0.1.0"; }

const char* pt_status_string(pt_status s) {
  switch (s) {
    case PT_OK: return "ok";
    case PT_ERR_ARGUMENT: return "argument error";
    case PT_ERR_DOMAIN: return "domain error";
    case PT_ERR_GEOMETRY: return "geometry error";
    case PT_ERR_DEGENERATE_GRADIENT: return "degenerate gradient";
    case PT_ERR_NO_CLOSURE: return "orbit did not close";
    case PT_ERR_SINGULAR_SYSTEM: return "singular system";
    case PT_ERR_DEGENERATE_STEP: return "degenerate step";
    case PT_ERR_IO: return "i/o error";
    case PT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pt_last_error(void) { return g_last_error.c_str(); }

pt_status pt_config_default(pt_config** out) {
  return guarded([&] {
    need(out != nullptr, "pt_config_default: null output");
    *out = new pt_config{platetopo::default_config()};
  });
}

pt_status pt_config_preset(const char* name, pt_config** out) {
  return guarded([&] {
    need(name != nullptr && out != nullptr, "pt_config_preset: null argument");
    *out = new pt_config{platetopo::preset(name)};
  });
}

pt_status pt_config_parse_text(pt_config* cfg, const char* text) {
  return guarded([&] {
    need(cfg != nullptr && text != nullptr, "pt_config_parse_text: null argument");
    cfg->cfg = platetopo::parse_config(text, cfg->cfg);
  });
}

pt_status pt_config_parse_file(pt_config* cfg, const char* path) {
  return guarded([&] {
    need(cfg != nullptr && path != nullptr, "pt_config_parse_file: null argument");
    cfg->cfg = platetopo::parse_config_file(path, cfg->cfg);
  });
}

pt_status pt_config_set(pt_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg != nullptr && key != nullptr && value != nullptr, "pt_config_set: null argument");
    platetopo::RunConfig c = cfg->cfg;
    platetopo::set_config_value(c, key, value);
    c.validate();
    cfg->cfg = std::move(c);
  });
}

pt_status pt_config_get(const pt_config* cfg, const char* key, char* buf, size_t buflen, size_t* needed) {
  return guarded([&] {
    need(cfg != nullptr && key != nullptr, "pt_config_get: null argument");
    const std::string v = platetopo::get_config_value(cfg->cfg, key);
    if (needed) *needed = v.size() + 1;
    if (buf && buflen > 0) {
      const size_t n = std::min(buflen - 1, v.size());
      std::memcpy(buf, v.data(), n);
      buf[n] = '\0';
    }
  });
}

void pt_config_free(pt_config* cfg) { delete cfg; }

pt_status pt_run_optimizer(const pt_config* cfg, pt_progress_fn progress, void* user, pt_run** out) {
  return guarded([&] {
    need(cfg != nullptr && out != nullptr, "pt_run_optimizer: null argument");
    cfg->cfg.validate();
    std::unique_ptr<platetopo::OutputWriter> writer;
    if (!cfg->cfg.output_dir.empty())
      writer = std::make_unique<platetopo::OutputWriter>(cfg->cfg.output_dir, cfg->cfg.snapshot_stride);
    CallbackObserver obs(progress, user, std::move(writer));
    auto run = std::make_unique<pt_run>();
    run->rec = platetopo::run(cfg->cfg, &obs);
    run->stop = platetopo::to_string(run->rec.stop);
    *out = run.release();
  });
}

int pt_run_iterations(const pt_run* run) { return run ? run->rec.iterations() : 0; }

size_t pt_run_row_count(const pt_run* run) { return run ? run->rec.history.size() : 0; }

pt_status pt_run_row(const pt_run* run, size_t index, pt_cost_row* out) {
  return guarded([&] {
    need(run != nullptr && out != nullptr, "pt_run_row: null argument");
    need(index < run->rec.history.size(), "pt_run_row: index out of range");
    *out = row_of(run->rec.history[index]);
  });
}

const char* pt_run_stop_reason(const pt_run* run) { return run ? run->stop.c_str() : ""; }

const char* pt_run_error(const pt_run* run) { return run ? run->rec.error.c_str() : ""; }

pt_status pt_run_error_status(const pt_run* run) {
  if (!run || run->rec.stop != platetopo::StopReason::Error) return PT_OK;
  return to_status(run->rec.error_code);
}

int pt_run_slope_violations(const pt_run* run) { return run ? run->rec.slope_violations : 0; }

int pt_run_no_decrease(const pt_run* run) { return run ? run->rec.no_decrease : 0; }

int pt_run_orbit_failures(const pt_run* run) { return run ? run->rec.orbit_failures : 0; }

double pt_run_seconds(const pt_run* run) { return run ? run->rec.seconds : 0.0; }

void pt_run_free(pt_run* run) { delete run; }

pt_status pt_verify(pt_check_fn callback, void* user, int* n_failed) {
  return guarded([&] {
    int failed = 0;
    platetopo::run_property_suite([&](const platetopo::CheckResult& r) {
      failed += r.passed ? 0 : 1;
      if (callback) callback(user, r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str());
    });
    if (n_failed) *n_failed = failed;
  });
}

}  // extern "C"
