#include "fkdet/fkdet.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "fkdet/error.hpp"
#include "fkdet/scenario.hpp"

struct fkdet_scenario {
  fkdet::ScenarioConfig config;
};

struct fkdet_report {
  fkdet::RunReport report;
};

namespace {

thread_local std::string last_error;

fkdet_status record(fkdet_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `body`, mapping exceptions onto status codes.
template <typename Fn>
fkdet_status guarded(Fn&& body) {
  try {
    last_error.clear();
    body();
    return FKDET_OK;
  } catch (const fkdet::Error& e) {
    switch (e.kind()) {
      case fkdet::ErrorKind::Usage: return record(FKDET_USAGE, e.what());
      case fkdet::ErrorKind::Numerical: return record(FKDET_NUMERICAL, e.what());
      case fkdet::ErrorKind::Resource: return record(FKDET_RESOURCE, e.what());
    }
    return record(FKDET_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return record(FKDET_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(FKDET_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* fkdet_version(void) { return fkdet::kToolVersion; }

const char* fkdet_last_error(void) { return last_error.c_str(); }

fkdet_status fkdet_scenario_parse(const char* text, size_t len, fkdet_scenario** out) {
  if (!text || !out) return record(FKDET_USAGE, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<fkdet_scenario>();
    s->config = fkdet::parse_scenario(std::string(text, len));
    *out = s.release();
  });
}

void fkdet_scenario_free(fkdet_scenario* s) { delete s; }

fkdet_status fkdet_scenario_set_sweep_values(fkdet_scenario* s, const size_t* values,
                                             size_t count) {
  if (!s || (!values && count)) return record(FKDET_USAGE, "null argument");
  return guarded([&] {
    if (s->config.task.kind != fkdet::TaskKind::Sweep)
      fkdet::fail("--values needs a sweep task");
    if (count == 0) fkdet::fail("--values needs at least one N");
    fkdet::ScenarioConfig next = s->config;
    next.task.ns.assign(values, values + count);
    // Revalidate through the parser so the new N values are instantiated once.
    s->config = fkdet::parse_scenario(fkdet::to_json(next));
  });
}

fkdet_status fkdet_scenario_echo(const fkdet_scenario* s, char** out) {
  if (!s || !out) return record(FKDET_USAGE, "null argument");
  return guarded([&] { *out = copy_string(fkdet::to_json(s->config).dump(2) + "\n"); });
}

fkdet_status fkdet_scenario_dump_matrix(const fkdet_scenario* s, const char* path) {
  if (!s || !path) return record(FKDET_USAGE, "null argument");
  return guarded([&] {
    const auto& c = s->config;
    const std::size_t n = !c.n.empty() ? c.n.front() : c.task.ns.front();
    std::ofstream f(path);
    if (!f) fkdet::fail(std::string("cannot open ") + path + " for writing");
    fkdet::dump_matrix(fkdet::assemble(fkdet::instantiate(c, n)), f);
    if (!f) fkdet::fail(std::string("write failed: ") + path);
  });
}

fkdet_status fkdet_run(const fkdet_scenario* s, fkdet_mode mode, unsigned threads, int timing,
                       fkdet_report** out) {
  if (!s || !out) return record(FKDET_USAGE, "null argument");
  *out = nullptr;
  if (mode != FKDET_MODE_RUN && mode != FKDET_MODE_CHECK)
    return record(FKDET_USAGE, "unknown mode");
  return guarded([&] {
    fkdet::RunOptions opts;
    opts.mode = mode == FKDET_MODE_CHECK ? fkdet::RunMode::Check : fkdet::RunMode::Run;
    opts.threads = threads == 0 ? 1 : threads;
    opts.timing = timing != 0;
    auto r = std::make_unique<fkdet_report>();
    r->report = fkdet::run(s->config, opts);
    *out = r.release();
  });
}

void fkdet_report_free(fkdet_report* r) { delete r; }

fkdet_status fkdet_report_emit(const fkdet_report* r, fkdet_format format, char** out) {
  if (!r || !out) return record(FKDET_USAGE, "null argument");
  return guarded([&] {
    fkdet::ReportFormat f;
    switch (format) {
      case FKDET_FORMAT_JSON: f = fkdet::ReportFormat::Json; break;
      case FKDET_FORMAT_CSV: f = fkdet::ReportFormat::Csv; break;
      case FKDET_FORMAT_TEXT: f = fkdet::ReportFormat::Text; break;
      default: fkdet::fail("unknown format");
    }
    *out = copy_string(fkdet::emit(r->report, f));
  });
}

fkdet_status fkdet_report_log_det(const fkdet_report* r, double* out) {
  if (!r || !out) return record(FKDET_USAGE, "null argument");
  return guarded([&] {
    const auto& res = r->report.result;
    if (r->report.mode != fkdet::RunMode::Run ||
        r->report.scenario.task.kind != fkdet::TaskKind::Determinant)
      fkdet::fail("not a determinant report");
    const auto& v = res.at("log_det");
    if (!v.is_string()) {
      *out = v.get<double>();
    } else {
      const std::string t = v.get<std::string>();
      *out = t == "-inf" ? -INFINITY : t == "inf" ? INFINITY : NAN;
    }
  });
}

fkdet_status fkdet_selftest(char** out, int* passed) {
  if (!out || !passed) return record(FKDET_USAGE, "null argument");
  return guarded([&] {
    const fkdet::SelfTestResult r = fkdet::run_selftest();
    std::string text;
    for (const auto& line : r.lines) text += line + "\n";
    *out = copy_string(text);
    *passed = r.passed ? 1 : 0;
  });
}

void fkdet_string_free(char* s) { delete[] s; }

}  // extern "C"
