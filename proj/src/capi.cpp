#include "epslab/epslab.h"

#include <new>
#include <string>

#include "epslab/config.hpp"
#include "epslab/runner.hpp"

struct epslab_scenario {
  epslab::Scenario sc;
};

namespace {

thread_local std::string g_last_error;

epslab_status fail(epslab_status st, const std::string& msg) {
  g_last_error = msg;
  return st;
}

template <class F>
epslab_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const epslab::Error& e) {
    return fail(e.is_validation() ? EPSLAB_ERR_VALIDATION : EPSLAB_ERR_NUMERICAL,
                std::string(epslab::to_string(e.kind())) + ": " + e.what());
  } catch (const std::bad_alloc&) {
    return fail(EPSLAB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EPSLAB_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* epslab_last_error(void) { return g_last_error.c_str(); }

const char* epslab_version(void) { return "1.0.0"; }

epslab_status epslab_scenario_load(const char* path, epslab_scenario** out) {
  if (!path || !out) return fail(EPSLAB_ERR_ARGUMENT, "epslab_scenario_load: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new epslab_scenario{epslab::Scenario::from_file(path)};
    return EPSLAB_OK;
  });
}

epslab_status epslab_scenario_from_string(const char* text, const char* name, epslab_scenario** out) {
  if (!text || !out) return fail(EPSLAB_ERR_ARGUMENT, "epslab_scenario_from_string: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new epslab_scenario{epslab::Scenario::from_string(text, name ? name : "scenario")};
    return EPSLAB_OK;
  });
}

void epslab_scenario_free(epslab_scenario* s) { delete s; }

epslab_status epslab_scenario_override(epslab_scenario* s, const char* assignment) {
  if (!s || !assignment) return fail(EPSLAB_ERR_ARGUMENT, "epslab_scenario_override: null argument");
  return guarded([&] {
    s->sc.apply_override(assignment);
    return EPSLAB_OK;
  });
}

epslab_status epslab_scenario_set_preset(epslab_scenario* s, const char* name) {
  if (!s || !name) return fail(EPSLAB_ERR_ARGUMENT, "epslab_scenario_set_preset: null argument");
  return guarded([&] {
    s->sc.set_preset(name);
    return EPSLAB_OK;
  });
}

epslab_status epslab_scenario_set_mode(epslab_scenario* s, const char* mode) {
  if (!s || !mode) return fail(EPSLAB_ERR_ARGUMENT, "epslab_scenario_set_mode: null argument");
  return guarded([&] {
    s->sc.set_mode(epslab::mode_from_string(mode));
    return EPSLAB_OK;
  });
}

epslab_status epslab_scenario_hash(const epslab_scenario* s, uint64_t* out) {
  if (!s || !out) return fail(EPSLAB_ERR_ARGUMENT, "epslab_scenario_hash: null argument");
  *out = s->sc.hash();
  g_last_error.clear();
  return EPSLAB_OK;
}

epslab_status epslab_run(const epslab_scenario* s, const char* out_dir, unsigned jobs) {
  if (!s || !out_dir) return fail(EPSLAB_ERR_ARGUMENT, "epslab_run: null argument");
  return guarded([&] {
    const auto r = epslab::run_scenario(s->sc, out_dir, jobs == 0 ? 1 : jobs);
    g_last_error = r.exit_code == 0 ? std::string() : r.message;
    return static_cast<epslab_status>(r.exit_code);
  });
}

}  // extern "C"
