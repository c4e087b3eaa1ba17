#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "fkdet/error.hpp"
#include "fkdet/scenario.hpp"

namespace fkdet {

using nlohmann::json;

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return v;
}

namespace {

json complex_json(Complex c) { return json::array({number(c.real()), number(c.imag())}); }

json opt_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

json to_json(const FKResult& r, bool with_sigma) {
  json out{{"log_det", number(r.log_det)},
           {"determinant", number(r.determinant())},
           {"rank_tolerance", number(r.rank_tolerance)},
           {"zero_count", r.zero_count}};
  if (with_sigma) {
    json s = json::array();
    for (double v : r.singular_values) s.push_back(number(v));
    out["singular_values"] = s;
  }
  return out;
}

json to_json(const HypothesisReport& r) {
  json conds = json::array();
  for (const auto& c : r.conditions) {
    json e{{"label", c.label},
           {"satisfied", c.satisfied},
           {"evaluable", c.evaluable},
           {"measured", number(c.measured)},
           {"threshold", number(c.threshold)},
           {"relation", c.relation}};
    if (c.exact)
      e["exact"] = std::to_string(c.exact->numerator()) + "/" +
                   std::to_string(c.exact->denominator());
    conds.push_back(e);
  }
  json diags = json::array();
  for (const auto& d : r.diagnostics) {
    json e{{"label", d.label}, {"value", opt_number(d.value)}};
    if (!d.note.empty()) e["note"] = d.note;
    diags.push_back(e);
  }
  return {{"theorem", r.theorem},
          {"conditions", conds},
          {"overall", r.overall},
          {"diagnostics", diags}};
}

json to_json(const TheoremComparison& c) {
  return {{"N", c.n},
          {"closed_form", number(c.closed_form)},
          {"numeric", number(c.numeric)},
          {"abs_error", number(c.abs_error)},
          {"error_bound", opt_number(c.error_bound)}};
}

json to_json(const StructureReport& s) {
  json out{{"max_deviation", number(s.max_deviation)},
           {"off_diagonal_mass", number(s.off_diagonal_mass)},
           {"diagonal_deviation", number(s.diagonal_deviation)},
           {"tolerance", number(s.tolerance)},
           {"ok", s.ok}};
  if (!s.violation.empty()) out["violation"] = s.violation;
  return out;
}

json to_json(const TraceProfile& p) {
  json samples = json::array();
  for (const auto& s : p.samples) {
    json e{{"n", s.n}, {"tau_matrix", complex_json(s.tau_matrix)}, {"paths_agree", s.paths_agree}};
    e["tau_normal_form"] = s.tau_normal_form ? complex_json(*s.tau_normal_form) : json(nullptr);
    samples.push_back(e);
  }
  return {{"samples", samples},
          {"first_nonzero", p.first_nonzero ? json(*p.first_nonzero) : json(nullptr)},
          {"normal_form_truncated", p.normal_form_truncated},
          {"paths_agree", p.paths_agree}};
}

json to_json(const DeningerReport& d) {
  return {{"z", complex_json(d.z)},
          {"spectral_radius_bound", number(d.spectral_radius_bound)},
          {"radius_hypothesis", d.radius_hypothesis},
          {"traces", to_json(d.traces)},
          {"numeric", to_json(d.numeric, false)},
          {"log_abs_z", number(d.log_abs_z)},
          {"deviation", number(d.deviation)},
          {"finite_closed_form", opt_number(d.finite_closed_form)},
          {"finite_deviation", opt_number(d.finite_deviation)}};
}

// T = M_F when every generator is the identity on its domain.
std::optional<double> multiplication_closed_form(const OperatorExpr& t) {
  const std::size_t n = t.space().size();
  std::vector<Complex> values(n, 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const PartialInjection& g = t.generator(i);
    for (std::size_t x = 0; x < n; ++x) {
      if (!g.defined_at(x)) continue;
      if (g(x) != x) return std::nullopt;
      values[x] += t.terms()[i].f[x];
    }
  }
  const CellFunction total(t.space(), std::move(values));
  return log_abs_integral(total, CellSet::full(t.space()));
}

json determinant_payload(const OperatorExpr& t) {
  const DenseOperator a = assemble(t);
  const FKResult fk = fk_determinant(a);
  json out = to_json(fk, true);
  out["N"] = t.space().size();
  out["lu_log_det"] = number(log_abs_det_lu(a));
  out["multiplication_closed_form"] = opt_number(multiplication_closed_form(t));
  return out;
}

json r1_payload(const OperatorExpr& t, std::size_t i0, const Tolerances& tol) {
  json out;
  out["i0"] = i0;
  out["hypotheses"] = to_json(check_thm_r1(t, i0, tol.treeing_max_len));
  const TheoremComparison c =
      compare_theorem(t, {Theorem::DominantTerm, i0, 1.0, tol.treeing_max_len});
  out["comparison"] = to_json(c);
  return out;
}

json r2_payload(const OperatorExpr& t) {
  json out;
  out["hypotheses"] = to_json(check_thm_r2(t));
  out["comparison"] = to_json(compare_theorem(t, {Theorem::DisjointRanges}));
  out["structure"] = to_json(mult_op_structure_check(t));
  return out;
}

json check_payload(const ScenarioConfig& c, const OperatorExpr& t) {
  json out;
  out["N"] = t.space().size();
  out["r2"] = to_json(check_thm_r2(t));
  json r1 = json::array();
  if (c.task.kind == TaskKind::CheckR1 ||
      (c.task.kind == TaskKind::Sweep && c.task.theorem == Theorem::DominantTerm)) {
    json e = to_json(check_thm_r1(t, c.task.i0, c.tolerances.treeing_max_len));
    e["i0"] = c.task.i0;
    r1.push_back(e);
  } else {
    for (std::size_t i = 0; i < t.size(); ++i) {
      json e = to_json(check_thm_r1(t, i, c.tolerances.treeing_max_len));
      e["i0"] = i;
      r1.push_back(e);
    }
  }
  out["r1"] = r1;
  return out;
}

const char* task_label(TaskKind k) {
  switch (k) {
    case TaskKind::Determinant: return "determinant";
    case TaskKind::CheckR1: return "check_r1";
    case TaskKind::CheckR2: return "check_r2";
    case TaskKind::Deninger: return "deninger";
    case TaskKind::TraceProfile: return "trace_profile";
    case TaskKind::Sweep: return "sweep";
  }
  return "?";
}

json run_task(const ScenarioConfig& c, const RunOptions& options) {
  const auto at = [&](std::size_t n) { return instantiate(c, n); };

  if (options.mode == RunMode::Check) {
    const auto& ns = c.task.kind == TaskKind::Sweep ? c.task.ns : c.n;
    json out = json::array();
    for (std::size_t n : ns) out.push_back(check_payload(c, at(n)));
    return out;
  }

  const std::size_t n = c.n.empty() ? 0 : c.n.front();
  switch (c.task.kind) {
    case TaskKind::Determinant: return determinant_payload(at(n));
    case TaskKind::CheckR1: {
      json out = r1_payload(at(n), c.task.i0, c.tolerances);
      out["N"] = n;
      return out;
    }
    case TaskKind::CheckR2: {
      json out = r2_payload(at(n));
      out["N"] = n;
      return out;
    }
    case TaskKind::Deninger: {
      json out = to_json(deninger_check(at(n), c.task.z, c.task.n_max, c.tolerances.radius_k_max,
                                        c.tolerances.term_cap));
      out["N"] = n;
      return out;
    }
    case TaskKind::TraceProfile: {
      json out = to_json(trace_vanishing_profile(at(n), c.task.n_max, c.tolerances.term_cap));
      out["N"] = n;
      return out;
    }
    case TaskKind::Sweep: {
      if (!c.is_parametric()) fail("non-parametric scenario");
      const TheoremTask task{c.task.theorem, c.task.i0, c.task.z, c.tolerances.treeing_max_len};
      const auto rows = convergence_sweep(at, task, c.task.ns, options.threads);
      json table = json::array();
      for (const auto& r : rows) table.push_back(to_json(r));
      return {{"rows", table}, {"errors_nonincreasing", errors_nonincreasing(rows)}};
    }
  }
  fail("unknown task");
}

json tolerances_used(const ScenarioConfig& c) {
  return {{"zero_tolerance", "|f(k)| < 1e-14 * ess_sup|f|"},
          {"rank_tolerance", "N * eps * sigma_max"},
          {"lu_pivot_tolerance", "N * eps * ||T||_F"},
          {"svd_max_sweeps", SvdOptions{}.max_sweeps},
          {"jacobi_threshold", number(JacobiOptions{}.threshold)},
          {"trace_agreement", number(kTraceAgreement)},
          {"treeing_max_len", c.tolerances.treeing_max_len},
          {"treeing_word_cap", kTreeingWordCap},
          {"term_cap", c.tolerances.term_cap},
          {"radius_k_max", c.tolerances.radius_k_max}};
}

json full_json(const RunReport& r) {
  json out{{"tool", "fkdet"},
           {"version", kToolVersion},
           {"schema_version", kSchemaVersion},
           {"mode", r.mode == RunMode::Check ? "check" : "run"},
           {"task", task_label(r.scenario.task.kind)},
           {"threads", r.threads},
           {"scenario", to_json(r.scenario)},
           {"tolerances", tolerances_used(r.scenario)},
           {"result", r.result}};
  if (r.elapsed_seconds) out["elapsed_seconds"] = *r.elapsed_seconds;
  return out;
}

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) {
    std::ostringstream s;
    s << std::setprecision(17) << v.get<double>();
    return s.str();
  }
  return v.dump();
}

std::string or_none(const json& v) { return v.is_null() ? "none" : cell(v); }

void csv_comparison(std::ostream& out, const json& rows) {
  out << "N,closed_form,numeric,abs_error\n";
  for (const auto& r : rows)
    out << cell(r["N"]) << ',' << cell(r["closed_form"]) << ',' << cell(r["numeric"]) << ','
        << cell(r["abs_error"]) << '\n';
}

void csv_conditions(std::ostream& out, const json& checks) {
  out << "N,theorem,i0,label,satisfied,measured,relation,threshold\n";
  for (const auto& chk : checks) {
    auto emit_report = [&](const json& rep, const std::string& i0) {
      for (const auto& c : rep["conditions"])
        out << cell(chk["N"]) << ',' << cell(rep["theorem"]) << ',' << i0 << ','
            << cell(c["label"]) << ',' << cell(c["satisfied"]) << ',' << cell(c["measured"]) << ','
            << cell(c["relation"]) << ',' << cell(c["threshold"]) << '\n';
    };
    emit_report(chk["r2"], "");
    for (const auto& r1 : chk["r1"]) emit_report(r1, cell(r1["i0"]));
  }
}

std::string emit_csv(const RunReport& r) {
  std::ostringstream out;
  const json& res = r.result;
  if (r.mode == RunMode::Check) {
    csv_conditions(out, res);
    return out.str();
  }
  switch (r.scenario.task.kind) {
    case TaskKind::Sweep: csv_comparison(out, res["rows"]); break;
    case TaskKind::CheckR1:
    case TaskKind::CheckR2: csv_comparison(out, json::array({res["comparison"]})); break;
    case TaskKind::Determinant:
      out << "k,singular_value\n";
      for (std::size_t k = 0; k < res["singular_values"].size(); ++k)
        out << k << ',' << cell(res["singular_values"][k]) << '\n';
      break;
    case TaskKind::TraceProfile:
    case TaskKind::Deninger: {
      const json& samples =
          r.scenario.task.kind == TaskKind::Deninger ? res["traces"]["samples"] : res["samples"];
      out << "n,tau_matrix_re,tau_matrix_im,tau_normal_form_re,tau_normal_form_im,paths_agree\n";
      for (const auto& s : samples) {
        const json& nf = s["tau_normal_form"];
        out << cell(s["n"]) << ',' << cell(s["tau_matrix"][0]) << ',' << cell(s["tau_matrix"][1])
            << ',' << (nf.is_null() ? "" : cell(nf[0])) << ',' << (nf.is_null() ? "" : cell(nf[1]))
            << ',' << cell(s["paths_agree"]) << '\n';
      }
      break;
    }
  }
  return out.str();
}

void text_hypotheses(std::ostream& out, const json& rep) {
  out << "  " << cell(rep["theorem"]) << ": hypotheses "
      << (rep["overall"].get<bool>() ? "hold" : "fail") << '\n';
  for (const auto& c : rep["conditions"])
    out << "    " << (c["satisfied"].get<bool>() ? "[ok] " : "[--] ") << cell(c["label"]) << " = "
        << cell(c["measured"]) << ' ' << cell(c["relation"]) << ' ' << cell(c["threshold"]) << '\n';
  for (const auto& d : rep["diagnostics"]) {
    out << "    " << cell(d["label"]) << ": " << (d["value"].is_null() ? "n/a" : cell(d["value"]));
    if (d.contains("note")) out << " (" << cell(d["note"]) << ')';
    out << '\n';
  }
}

void text_comparison(std::ostream& out, const json& c) {
  out << "  N=" << cell(c["N"]) << "  closed_form=" << cell(c["closed_form"])
      << "  numeric=" << cell(c["numeric"]) << "  abs_error=" << cell(c["abs_error"]);
  if (!c["error_bound"].is_null()) out << "  bound=" << cell(c["error_bound"]);
  out << '\n';
}

std::string emit_text(const RunReport& r) {
  std::ostringstream out;
  const json& res = r.result;
  out << "fkdet " << kToolVersion << "  " << task_label(r.scenario.task.kind)
      << (r.mode == RunMode::Check ? " (check)" : "") << '\n';
  if (r.mode == RunMode::Check) {
    for (const auto& chk : res) {
      out << "N=" << cell(chk["N"]) << '\n';
      text_hypotheses(out, chk["r2"]);
      for (const auto& r1 : chk["r1"]) {
        out << "  [i0=" << cell(r1["i0"]) << "]\n";
        text_hypotheses(out, r1);
      }
    }
  } else {
    switch (r.scenario.task.kind) {
      case TaskKind::Determinant:
        out << "  N=" << cell(res["N"]) << "  log_det=" << cell(res["log_det"])
            << "  det=" << cell(res["determinant"]) << "  zero_count=" << cell(res["zero_count"])
            << "\n  lu_log_det=" << cell(res["lu_log_det"]);
        if (!res["multiplication_closed_form"].is_null())
          out << "  multiplication_closed_form=" << cell(res["multiplication_closed_form"]);
        out << '\n';
        break;
      case TaskKind::CheckR1:
      case TaskKind::CheckR2:
        text_hypotheses(out, res["hypotheses"]);
        text_comparison(out, res["comparison"]);
        if (res.contains("structure"))
          out << "  structure: max_deviation=" << cell(res["structure"]["max_deviation"])
              << (res["structure"]["ok"].get<bool>() ? " ok" : " violated") << '\n';
        break;
      case TaskKind::Deninger:
        out << "  N=" << cell(res["N"]) << "  radius_bound=" << cell(res["spectral_radius_bound"])
            << "  radius_hypothesis=" << cell(res["radius_hypothesis"])
            << "\n  log_det=" << cell(res["numeric"]["log_det"])
            << "  log|z|=" << cell(res["log_abs_z"]) << "  deviation=" << cell(res["deviation"]);
        if (!res["finite_closed_form"].is_null())
          out << "\n  finite_closed_form=" << cell(res["finite_closed_form"])
              << "  finite_deviation=" << cell(res["finite_deviation"]);
        out << "\n  first_nonzero_trace=" << or_none(res["traces"]["first_nonzero"]) << '\n';
        break;
      case TaskKind::TraceProfile:
        out << "  N=" << cell(res["N"]) << "  first_nonzero=" << or_none(res["first_nonzero"])
            << "  paths_agree=" << cell(res["paths_agree"]) << '\n';
        for (const auto& s : res["samples"])
          out << "  n=" << cell(s["n"]) << "  tau=(" << cell(s["tau_matrix"][0]) << ", "
              << cell(s["tau_matrix"][1]) << ")\n";
        break;
      case TaskKind::Sweep:
        for (const auto& row : res["rows"]) text_comparison(out, row);
        out << "  errors_nonincreasing=" << cell(res["errors_nonincreasing"]) << '\n';
        break;
    }
  }
  if (r.elapsed_seconds) out << "elapsed " << *r.elapsed_seconds << " s\n";
  return out.str();
}

}  // namespace

RunReport run(const ScenarioConfig& c, const RunOptions& options) {
  RunReport report;
  report.scenario = c;
  report.mode = options.mode;
  report.threads = options.threads == 0 ? 1 : options.threads;
  const auto start = std::chrono::steady_clock::now();
  RunOptions opts = options;
  opts.threads = report.threads;
  try {
    report.result = run_task(c, opts);
  } catch (const Error& e) {
    std::string where = std::string("task ") + task_label(c.task.kind);
    if (c.task.kind != TaskKind::Sweep && !c.n.empty()) where += " at N=" + std::to_string(c.n[0]);
    throw Error(e.kind(), where + ": " + e.what());
  }
  if (options.timing)
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string emit(const RunReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return full_json(report).dump(2) + "\n";
    case ReportFormat::Csv: return emit_csv(report);
    case ReportFormat::Text: return emit_text(report);
  }
  return {};
}

}  // namespace fkdet
