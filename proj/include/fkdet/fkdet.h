/* C interface to the fkdet library. All handles are opaque; every function
   returning fkdet_status leaves a message retrievable with fkdet_last_error()
   on failure (thread-local, valid until the next call on the same thread). */
#ifndef FKDET_H
#define FKDET_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define FKDET_API __declspec(dllexport)
#else
#define FKDET_API __attribute__((visibility("default")))
#endif

typedef enum fkdet_status {
  FKDET_OK = 0,
  FKDET_USAGE = 1,     /* parse errors, bad arguments, dangling names */
  FKDET_NUMERICAL = 2, /* eigensolver non-convergence */
  FKDET_RESOURCE = 3,  /* term or enumeration cap exceeded */
  FKDET_INTERNAL = 4   /* anything else, e.g. allocation failure */
} fkdet_status;

typedef enum fkdet_mode { FKDET_MODE_RUN = 0, FKDET_MODE_CHECK = 1 } fkdet_mode;

typedef enum fkdet_format {
  FKDET_FORMAT_JSON = 0,
  FKDET_FORMAT_CSV = 1,
  FKDET_FORMAT_TEXT = 2
} fkdet_format;

typedef struct fkdet_scenario fkdet_scenario;
typedef struct fkdet_report fkdet_report;

FKDET_API const char* fkdet_version(void);
FKDET_API const char* fkdet_last_error(void);

/* Parses a scenario document (JSON text of `len` bytes). */
FKDET_API fkdet_status fkdet_scenario_parse(const char* text, size_t len,
                                            fkdet_scenario** out);
FKDET_API void fkdet_scenario_free(fkdet_scenario* s);

/* Replaces the N list of a sweep task. */
FKDET_API fkdet_status fkdet_scenario_set_sweep_values(fkdet_scenario* s,
                                                       const size_t* values,
                                                       size_t count);

/* Normalized scenario echo as JSON; release with fkdet_string_free. */
FKDET_API fkdet_status fkdet_scenario_echo(const fkdet_scenario* s, char** out);

/* Writes the assembled matrix of T at the scenario's first N. */
FKDET_API fkdet_status fkdet_scenario_dump_matrix(const fkdet_scenario* s,
                                                  const char* path);

FKDET_API fkdet_status fkdet_run(const fkdet_scenario* s, fkdet_mode mode,
                                 unsigned threads, int timing,
                                 fkdet_report** out);
FKDET_API void fkdet_report_free(fkdet_report* r);

FKDET_API fkdet_status fkdet_report_emit(const fkdet_report* r,
                                         fkdet_format format, char** out);

/* log Delta of a determinant report; -INFINITY when Delta = 0. */
FKDET_API fkdet_status fkdet_report_log_det(const fkdet_report* r,
                                            double* out);

/* Built-in invariant suite. `*passed` is 1 when every check passed. */
FKDET_API fkdet_status fkdet_selftest(char** out, int* passed);

FKDET_API void fkdet_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
