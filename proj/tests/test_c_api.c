/* Exercises the shared library through its C interface only. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "fkdet/fkdet.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static const char* minimal =
    "{\"N\": 8, \"generators\": [{\"name\": \"r\", \"kind\": \"rotation\", \"p\": 1}],"
    " \"functions\": [{\"name\": \"c\", \"kind\": \"constant\", \"value\": 2}],"
    " \"operator\": [{\"function\": \"c\", \"generator\": \"r\"}],"
    " \"task\": {\"kind\": \"determinant\"}}";

int main(void) {
  fkdet_scenario* s = NULL;
  fkdet_report* r = NULL;
  char* text = NULL;
  double v = 0.0;
  int passed = 0;

  EXPECT(strcmp(fkdet_version(), "1.0.0") == 0);

  EXPECT(fkdet_scenario_parse(minimal, strlen(minimal), &s) == FKDET_OK);
  EXPECT(fkdet_run(s, FKDET_MODE_RUN, 1, 0, &r) == FKDET_OK);
  EXPECT(fkdet_report_log_det(r, &v) == FKDET_OK);
  EXPECT(fabs(v - log(2.0)) < 1e-12);
  EXPECT(fkdet_report_emit(r, FKDET_FORMAT_JSON, &text) == FKDET_OK);
  EXPECT(text && strstr(text, "\"log_det\"") != NULL);
  fkdet_string_free(text);
  text = NULL;
  EXPECT(fkdet_scenario_echo(s, &text) == FKDET_OK);
  EXPECT(text && strstr(text, "\"schema_version\": 1") != NULL);
  fkdet_string_free(text);

  /* a determinant task has no sweep values to override */
  {
    size_t ns[2] = {4, 8};
    EXPECT(fkdet_scenario_set_sweep_values(s, ns, 2) == FKDET_USAGE);
    EXPECT(strstr(fkdet_last_error(), "sweep") != NULL);
  }
  fkdet_report_free(r);
  fkdet_scenario_free(s);

  /* parse errors */
  s = NULL;
  EXPECT(fkdet_scenario_parse("{", 1, &s) == FKDET_USAGE);
  EXPECT(s == NULL);
  EXPECT(strstr(fkdet_last_error(), "line 1") != NULL);
  EXPECT(fkdet_scenario_parse(NULL, 0, &s) == FKDET_USAGE);

  /* null handles are tolerated by the free functions */
  fkdet_scenario_free(NULL);
  fkdet_report_free(NULL);
  fkdet_string_free(NULL);

  EXPECT(fkdet_selftest(&text, &passed) == FKDET_OK);
  EXPECT(passed == 1);
  fkdet_string_free(text);

  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
