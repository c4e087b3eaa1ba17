// fkdet command-line front end. Talks to the library only through fkdet.h.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fkdet/fkdet.h"

namespace {

struct Options {
  std::string file;
  std::optional<std::string> out;
  std::string format = "json";
  std::optional<std::string> dump_matrix;
  unsigned threads = 1;
  bool timing = false;
  std::vector<std::size_t> values;
};

int report_error(fkdet_status status) {
  std::cerr << "fkdet: " << fkdet_last_error() << "\n";
  // FKDET_INTERNAL has no dedicated exit code; treat it as a numerical failure.
  return status == FKDET_INTERNAL ? 2 : static_cast<int>(status);
}

int write_output(const std::optional<std::string>& path, const char* text) {
  if (!path) {
    std::fputs(text, stdout);
    return 0;
  }
  std::ofstream f(*path, std::ios::binary);
  f << text;
  if (!f) {
    std::cerr << "fkdet: cannot write " << *path << "\n";
    return 1;
  }
  return 0;
}

int execute(const Options& o, fkdet_mode mode, bool sweep) {
  std::ifstream in(o.file, std::ios::binary);
  if (!in) {
    std::cerr << "fkdet: cannot read " << o.file << "\n";
    return 1;
  }
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  fkdet_format format = FKDET_FORMAT_JSON;
  if (o.format == "csv") format = FKDET_FORMAT_CSV;
  if (o.format == "text") format = FKDET_FORMAT_TEXT;

  fkdet_scenario* scenario = nullptr;
  fkdet_status st = fkdet_scenario_parse(text.data(), text.size(), &scenario);
  if (st != FKDET_OK) return report_error(st);

  int code = 0;
  fkdet_report* report = nullptr;
  char* doc = nullptr;
  if (sweep && !o.values.empty())
    st = fkdet_scenario_set_sweep_values(scenario, o.values.data(), o.values.size());
  if (st == FKDET_OK && o.dump_matrix) st = fkdet_scenario_dump_matrix(scenario, o.dump_matrix->c_str());
  if (st == FKDET_OK) st = fkdet_run(scenario, mode, o.threads, o.timing ? 1 : 0, &report);
  if (st == FKDET_OK) st = fkdet_report_emit(report, format, &doc);
  if (st == FKDET_OK) {
    code = write_output(o.out, doc);
  } else {
    code = report_error(st);
  }
  fkdet_string_free(doc);
  fkdet_report_free(report);
  fkdet_scenario_free(scenario);
  return code;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("file", o.file, "scenario file (JSON)")->required();
  cmd->add_option("--out", o.out, "write the report here instead of stdout");
  cmd->add_option("--format", o.format, "report format")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  cmd->add_option("--dump-matrix", o.dump_matrix, "write the matrix of T at the first N");
  cmd->add_option("--threads", o.threads, "worker threads for sweeps")
      ->check(CLI::Range(1u, 256u));
  cmd->add_flag("--timing", o.timing, "include wall-clock time (makes reports non-reproducible)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuglede-Kadison determinants of sum M_f L_g on discretized equivalence relations"};
  app.set_version_flag("--version", std::string(fkdet_version()));
  app.require_subcommand(1);

  Options o;
  auto* run = app.add_subcommand("run", "run the scenario's task");
  add_common(run, o);
  auto* check = app.add_subcommand("check", "evaluate theorem hypotheses only");
  add_common(check, o);
  auto* sweep = app.add_subcommand("sweep", "run a convergence sweep");
  add_common(sweep, o);
  sweep->add_option("--values", o.values, "override the sweep's N list")->delimiter(',');
  auto* selftest = app.add_subcommand("selftest", "run the built-in invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (*selftest) {
    char* text = nullptr;
    int passed = 0;
    const fkdet_status st = fkdet_selftest(&text, &passed);
    if (st != FKDET_OK) return report_error(st);
    std::fputs(text, stdout);
    fkdet_string_free(text);
    return passed ? 0 : 1;
  }
  if (*check) return execute(o, FKDET_MODE_CHECK, false);
  return execute(o, FKDET_MODE_RUN, static_cast<bool>(*sweep));
}
