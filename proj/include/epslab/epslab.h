#ifndef EPSLAB_EPSLAB_H
#define EPSLAB_EPSLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(EPSLAB_BUILDING_LIBRARY)
#define EPSLAB_API __attribute__((visibility("default")))
#else
#define EPSLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The first three double as process exit codes. */
typedef enum epslab_status {
  EPSLAB_OK = 0,
  EPSLAB_ERR_VALIDATION = 1, /* bad config, parse error, failed condition check */
  EPSLAB_ERR_NUMERICAL = 2,  /* singular system, overflow, failed cells */
  EPSLAB_ERR_ARGUMENT = 3,   /* null handle or pointer */
  EPSLAB_ERR_INTERNAL = 4
} epslab_status;

typedef struct epslab_scenario epslab_scenario;

/* Message of the last failing call on this thread ("" if none). */
EPSLAB_API const char* epslab_last_error(void);
EPSLAB_API const char* epslab_version(void);

EPSLAB_API epslab_status epslab_scenario_load(const char* path, epslab_scenario** out);
/* name may be NULL; it is used when the text has no `name` key. */
EPSLAB_API epslab_status epslab_scenario_from_string(const char* text, const char* name, epslab_scenario** out);
EPSLAB_API void epslab_scenario_free(epslab_scenario* s);

/* "section.key=value", value written as in the config file. */
EPSLAB_API epslab_status epslab_scenario_override(epslab_scenario* s, const char* assignment);
EPSLAB_API epslab_status epslab_scenario_set_preset(epslab_scenario* s, const char* name);
EPSLAB_API epslab_status epslab_scenario_set_mode(epslab_scenario* s, const char* mode);
EPSLAB_API epslab_status epslab_scenario_hash(const epslab_scenario* s, uint64_t* out);

/* Runs the scenario's mode into out_dir. jobs = 0 means 1. On a nonzero
   status the reason is in epslab_last_error(); outputs written before a
   numerical failure are kept. */
EPSLAB_API epslab_status epslab_run(const epslab_scenario* s, const char* out_dir, unsigned jobs);

#ifdef __cplusplus
}
#endif

#endif
