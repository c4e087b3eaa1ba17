#include <doctest.h>

#include "fkdet/error.hpp"
#include "fkdet/scenario.hpp"

using namespace fkdet;
using nlohmann::json;

namespace {

const char* kMinimal = R"({
  "N": 8,
  "generators": [{"name": "r", "kind": "rotation", "p": 1}],
  "functions": [{"name": "c", "kind": "constant", "value": 2}],
  "operator": [{"function": "c", "generator": "r"}],
  "task": {"kind": "determinant"}
})";

std::string error_of(const std::string& text) {
  try {
    (void)parse_scenario(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Usage);
    return e.what();
  }
  return "";
}

json minimal() { return json::parse(kMinimal); }

}  // namespace

TEST_CASE("minimal scenario parses with defaults") {
  const ScenarioConfig c = parse_scenario(std::string(kMinimal));
  CHECK(c.schema_version == 1);
  CHECK(c.n == std::vector<std::size_t>{8});
  CHECK(c.tolerances.treeing_max_len == kDefaultTreeingLength);
  const json echo = to_json(c);
  CHECK(echo["tolerances"]["term_cap"] == kNormalTermCap);
  CHECK(echo["functions"][0]["value"] == json::array({2.0, 0.0}));
}

TEST_CASE("dangling references name the culprit") {
  json d = minimal();
  d["operator"][0]["generator"] = "nope";
  const std::string e = error_of(d.dump());
  CHECK(e.find("operator[0]") != std::string::npos);
  CHECK(e.find("nope") != std::string::npos);

  d = minimal();
  d["generators"].push_back({{"name", "x"}, {"kind", "restrict"}, {"base", "ghost"}, {"cells", {0}}});
  CHECK(error_of(d.dump()).find("ghost") != std::string::npos);
}

TEST_CASE("sweep over a table generator is non-parametric") {
  json d = minimal();
  d["generators"][0] = {{"name", "r"}, {"kind", "table"}, {"pairs", {{0, 1}}}};
  d["task"] = {{"kind", "sweep"}, {"theorem", "r2"}, {"Ns", {64, 256}}};
  CHECK(error_of(d.dump()).find("non-parametric scenario") != std::string::npos);
}

TEST_CASE("malformed JSON reports line and column") {
  const std::string e = error_of("{\n  \"N\": 8,\n  oops\n}");
  CHECK(e.find("line 3") != std::string::npos);
}

TEST_CASE("schema violations carry field paths") {
  json d = minimal();
  d["functions"][0]["vaule"] = 3;
  CHECK(error_of(d.dump()).find("functions[0].vaule") != std::string::npos);
  d = minimal();
  d["task"] = {{"kind", "frobnicate"}};
  CHECK(error_of(d.dump()).find("task.kind") != std::string::npos);
  d = minimal();
  d["generators"][0] = {{"name", "r"}, {"kind", "table"}, {"pairs", {{0, 1}, {2, 1}}}};
  CHECK(error_of(d.dump()).find("not injective") != std::string::npos);
  d = minimal();
  d["generators"][0] = {{"name", "r"}, {"kind", "interval_exchange"}, {"cuts", {0.3}}, {"order", {1, 0}}};
  CHECK_FALSE(error_of(d.dump()).empty());
  d = minimal();
  d["N"] = {8, 16};
  CHECK(error_of(d.dump()).find("sweep") != std::string::npos);
}

TEST_CASE("echo round-trips for every generator and function kind") {
  const char* text = R"({
    "schema_version": 1,
    "N": 8,
    "generators": [
      {"name": "r", "kind": "rotation", "alpha": 0.25},
      {"name": "t", "kind": "table", "pairs": [[0, 3], [1, 2]]},
      {"name": "h", "kind": "restrict", "base": "r", "interval": [0, 0.5]},
      {"name": "c", "kind": "restrict", "base": "r", "cells": [1, 5]},
      {"name": "x", "kind": "interval_exchange", "cuts": [0.25, 0.5], "order": [2, 0, 1]}
    ],
    "functions": [
      {"name": "k", "kind": "constant", "value": {"re": 1, "im": -2}},
      {"name": "v", "kind": "table", "values": [1, 2, 3, 4, 5, 6, 7, [8, 1]]},
      {"name": "e", "kind": "sampled", "family": "fourier", "k": 2},
      {"name": "p", "kind": "sampled", "family": "polynomial", "coeffs": [1, 0.5]},
      {"name": "s", "kind": "sampled", "family": "step", "cuts": [0.5], "values": [1, 2]}
    ],
    "operator": [["k", "r"], {"function": "v", "generator": "t"}, ["e", "h"], ["p", "c"], ["s", "x"]],
    "task": {"kind": "check_r1", "i0": 0},
    "tolerances": {"treeing_max_len": 6}
  })";
  const ScenarioConfig c = parse_scenario(std::string(text));
  const json once = to_json(c);
  const json twice = to_json(parse_scenario(once));
  CHECK(once == twice);
  CHECK(once["tolerances"]["treeing_max_len"] == 6);
  CHECK_FALSE(c.is_parametric());
  // alpha = 1/4 of the circle at N = 8
  CHECK(instantiate_family(c, 8).find("r") == make_rotation(DiscreteSpace(8), 2));
}

TEST_CASE("run and emit") {
  const ScenarioConfig c = parse_scenario(std::string(kMinimal));
  const RunReport r = run(c);
  CHECK(r.result["log_det"].get<double>() == doctest::Approx(std::log(2.0)));
  const std::string a = emit(r, ReportFormat::Json);
  CHECK(a == emit(run(c), ReportFormat::Json));
  CHECK(a.find("elapsed") == std::string::npos);
  CHECK(emit(r, ReportFormat::Csv).rfind("k,singular_value\n", 0) == 0);
  CHECK(emit(r, ReportFormat::Text).find("log_det=") != std::string::npos);
  CHECK(run(c, {RunMode::Run, 1, true}).elapsed_seconds.has_value());
}

TEST_CASE("zero determinant serializes as -inf") {
  json d = minimal();
  d["functions"][0] = {{"name", "c"}, {"kind", "table"}, {"values", {1, 1, 0, 1, 1, 1, 1, 1}}};
  const RunReport r = run(parse_scenario(d.dump()));
  CHECK(r.result["log_det"] == "-inf");
  CHECK(r.result["zero_count"].get<int>() > 0);
  CHECK(emit(r, ReportFormat::Json).find("\"log_det\": \"-inf\"") != std::string::npos);
}

TEST_CASE("sweep csv header") {
  json d = minimal();
  d["N"] = {4, 8};
  d["generators"][0]["p"] = 0;
  d["task"] = {{"kind", "sweep"}, {"theorem", "mf"}};
  const RunReport r = run(parse_scenario(d.dump()));
  const std::string csv = emit(r, ReportFormat::Csv);
  CHECK(csv.rfind("N,closed_form,numeric,abs_error\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(r.result["errors_nonincreasing"] == true);
}

TEST_CASE("check mode reports every hypothesis") {
  json d = minimal();
  d["task"] = {{"kind", "check_r2"}};
  const RunReport r = run(parse_scenario(d.dump()), {RunMode::Check});
  REQUIRE(r.result.is_array());
  CHECK(r.result[0].contains("r2"));
  CHECK(r.result[0]["r1"].size() == 1);
  CHECK(emit(r, ReportFormat::Csv).rfind("N,theorem,i0,label", 0) == 0);
}

TEST_CASE("term cap truncates the normal-form trace path") {
  json d = minimal();
  d["task"] = {{"kind", "trace_profile"}, {"nMax", 12}};
  d["operator"].push_back({{"function", "c"}, {"generator", "r"}});
  d["tolerances"] = {{"term_cap", 1000}};
  const RunReport r = run(parse_scenario(d.dump()));
  CHECK(r.result["normal_form_truncated"] == true);
  CHECK(r.result["samples"][11]["tau_normal_form"].is_null());
  CHECK_FALSE(r.result["samples"][8]["tau_normal_form"].is_null());
}

TEST_CASE("errors during a run carry the task and N") {
  json d = minimal();
  d["task"] = {{"kind", "check_r1"}, {"i0", 0}};
  d["generators"][0] = {{"name", "r"}, {"kind", "table"}, {"pairs", {{0, 1}}}};
  // hypotheses fail but the run completes
  const RunReport r = run(parse_scenario(d.dump()));
  CHECK(r.result["hypotheses"]["overall"] == false);
}
