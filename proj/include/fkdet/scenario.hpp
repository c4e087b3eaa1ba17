#pragma once

// Scenario files, task dispatch and report emission.
//
// A scenario is a JSON document (schema_version 1) naming generators,
// functions, the operator T = sum M_f L_g as (function, generator) pairs, and
// exactly one task. See docs/scenario-schema.md for the full schema.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fkdet/operator_rep.hpp"
#include "fkdet/theorem_oracles.hpp"

namespace fkdet {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

struct RotationSpec {
  std::optional<std::int64_t> p;  // shift in cells
  std::optional<double> alpha;    // shift as a fraction of the circle
};
struct TableSpec {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};
struct RestrictSpec {
  std::string base;
  std::optional<std::vector<std::size_t>> cells;
  std::optional<std::pair<double, double>> interval;
};
struct IntervalExchangeSpec {
  std::vector<double> cuts;
  std::vector<std::size_t> order;
};

struct GeneratorSpec {
  std::string name;
  std::variant<RotationSpec, TableSpec, RestrictSpec, IntervalExchangeSpec> kind;
};

struct ConstantFn {
  Complex value;
};
struct TableFn {
  std::vector<Complex> values;
};
struct FourierFn {
  int k = 0;
  Complex scale = 1.0;
};
struct PolynomialFn {
  std::vector<Complex> coeffs;
};
struct StepFn {
  std::vector<double> cuts;
  std::vector<Complex> values;
};

struct FunctionSpec {
  std::string name;
  std::variant<ConstantFn, TableFn, FourierFn, PolynomialFn, StepFn> kind;
};

struct OperatorTermSpec {
  std::string function;
  std::string generator;
};

enum class TaskKind { Determinant, CheckR1, CheckR2, Deninger, TraceProfile, Sweep };

struct TaskSpec {
  TaskKind kind = TaskKind::Determinant;
  std::size_t i0 = 0;          // check_r1, sweep r1
  Complex z = 1.0;             // deninger, sweep deninger
  unsigned n_max = 8;          // deninger, trace_profile
  Theorem theorem = Theorem::DisjointRanges;  // sweep
  std::vector<std::size_t> ns;                // sweep
};

struct Tolerances {
  std::size_t treeing_max_len = kDefaultTreeingLength;
  std::size_t term_cap = kNormalTermCap;
  int radius_k_max = 6;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::vector<std::size_t> n;  // one entry unless N was given as a list
  std::vector<GeneratorSpec> generators;
  std::vector<FunctionSpec> functions;
  std::vector<OperatorTermSpec> op;
  TaskSpec task;
  Tolerances tolerances;

  /// True when every generator and function is defined for any N.
  bool is_parametric() const;
};

/// Throws Error(Usage) with the offending field path or line/column.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig parse_scenario(const nlohmann::json& doc);
/// Normalized echo; parse_scenario(to_json(c)) reproduces c.
nlohmann::json to_json(const ScenarioConfig& c);

GeneratorFamily instantiate_family(const ScenarioConfig& c, std::size_t n);
OperatorExpr instantiate(const ScenarioConfig& c, std::size_t n);

enum class RunMode { Run, Check };

struct RunOptions {
  RunMode mode = RunMode::Run;
  unsigned threads = 1;
  bool timing = false;
};

struct RunReport {
  ScenarioConfig scenario;
  RunMode mode = RunMode::Run;
  unsigned threads = 1;
  /// Task payload; the layout depends on the task kind.
  nlohmann::json result;
  std::optional<double> elapsed_seconds;
};

RunReport run(const ScenarioConfig& c, const RunOptions& options = {});

enum class ReportFormat { Json, Csv, Text };

std::string emit(const RunReport& report, ReportFormat format);

/// -inf -> "-inf", inf -> "inf", nan -> "nan", otherwise the number.
nlohmann::json number(double v);

/// Built-in invariant checks; one "PASS name" / "FAIL name: detail" line each.
struct SelfTestResult {
  std::vector<std::string> lines;
  bool passed = true;
};
SelfTestResult run_selftest();

}  // namespace fkdet
