#include "fkdet/theorem_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "fkdet/error.hpp"
#include "fkdet/numeric.hpp"

namespace fkdet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string measure_text(Measure m) {
  std::ostringstream s;
  s << m.numerator() << '/' << m.denominator();
  return s.str();
}

Condition measure_condition(std::string label, Measure measured,
                            Measure threshold, bool satisfied,
                            std::string relation) {
  Condition c;
  c.label = std::move(label);
  c.measured = to_double(measured);
  c.exact = measured;
  c.threshold = to_double(threshold);
  c.satisfied = satisfied;
  c.relation = std::move(relation);
  return c;
}

void require_term(const OperatorExpr& t, std::size_t i0) {
  if (i0 >= t.size()) {
    std::ostringstream msg;
    msg << "term index " << i0 << " out of range (" << t.size() << " terms)";
    fail(msg.str());
  }
}

// Largest overlap measure over unordered pairs of distinct sets.
Measure max_pairwise_overlap(const std::vector<CellSet>& sets) {
  Measure worst(0);
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j)
      worst = std::max(worst, measure(sets[i] & sets[j]));
  return worst;
}

GeneratorFamily family_of_terms(const OperatorExpr& t) {
  GeneratorFamily fam(t.space());
  for (const auto& term : t.terms())
    if (!fam.index_of(term.generator))
      fam.add(term.generator, t.family().find(term.generator));
  return fam;
}

void add_girth_diagnostics(HypothesisReport& report, const std::string& prefix,
                           const GeneratorFamily& family, std::size_t max_len) {
  const TreeingDiagnostics d = treeing_diagnostics(family, max_len);
  Diagnostic g{prefix + "girth", std::nullopt, ""};
  if (d.girth) {
    g.value = static_cast<double>(*d.girth);
    g.note = "shortest reduced word with a positive-measure fixed-point set: " +
             to_string(d.word(family, 0));
  } else {
    g.note = "no fixed-point word up to length " +
             std::to_string(d.complete_length) + (d.truncated ? " (word cap reached)" : "");
  }
  report.diagnostics.push_back(std::move(g));
  report.diagnostics.push_back(
      {prefix + "girth_search_length",
       static_cast<double>(d.complete_length),
       d.truncated ? "enumeration stopped at the word cap" : ""});
}

}  // namespace

const Condition* HypothesisReport::condition(const std::string& label) const {
  for (const Condition& c : conditions)
    if (c.label == label) return &c;
  return nullptr;
}

const Diagnostic* HypothesisReport::diagnostic(const std::string& label) const {
  for (const Diagnostic& d : diagnostics)
    if (d.label == label) return &d;
  return nullptr;
}

TheoremComparison compare(double closed_form, double numeric, std::size_t n) {
  TheoremComparison c;
  c.n = n;
  c.closed_form = closed_form;
  c.numeric = numeric;
  const bool a = std::isinf(closed_form) && closed_form < 0;
  const bool b = std::isinf(numeric) && numeric < 0;
  if (a && b) {
    c.abs_error = 0.0;
  } else if (a || b) {
    c.abs_error = kInf;
  } else {
    c.abs_error = std::abs(closed_form - numeric);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Dominant-term formula

HypothesisReport check_thm_r1(const OperatorExpr& t, std::size_t i0,
                              std::size_t treeing_max_len) {
  require_term(t, i0);
  HypothesisReport report;
  report.theorem = "dominant_term";
  const CellFunction& f0 = t.terms()[i0].f;
  const PartialInjection& g0 = t.generator(i0);
  const DiscreteSpace space = t.space();

  // (c) f_{i0} nonvanishing
  const double sup0 = ess_sup_abs(f0);
  CellSet zeros = CellSet::empty(space);
  for (std::size_t k = 0; k < space.size(); ++k)
    if (is_zero_cell(f0, k, sup0)) zeros.insert(k);
  const Condition nonvanishing =
      measure_condition("f_i0_nonvanishing", measure(zeros), Measure(0),
                        zeros.is_empty(), "==");

  // (a) contraction sum
  Condition contraction;
  contraction.label = "contraction_sum";
  contraction.threshold = 1.0;
  contraction.relation = "<";
  if (nonvanishing.satisfied) {
    CompensatedSum rho;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (i != i0) rho.add(ess_sup_abs(div(t.terms()[i].f, f0)));
    contraction.measured = rho.value();
    contraction.satisfied = contraction.measured < 1.0;
  } else {
    contraction.evaluable = false;
    contraction.measured = kInf;
  }

  // (b) g_{i0} : X -> X
  const Condition bijection = measure_condition(
      "g_i0_full_bijection", measure(g0.domain()), Measure(1),
      g0.is_full_bijection(), "==");

  report.conditions = {contraction, bijection, nonvanishing};
  report.overall =
      contraction.satisfied && bijection.satisfied && nonvanishing.satisfied;

  const GeneratorFamily fam = family_of_terms(t);
  const OrbitPartition orb = orbits(fam);
  report.diagnostics.push_back(
      {"orbit_count", static_cast<double>(orb.classes.size()),
       orb.classes.size() == 1 ? "single orbit (finite proxy for ergodicity)"
                               : "several orbits: the finite relation is not ergodic"});
  add_girth_diagnostics(report, "", fam, treeing_max_len);

  if (bijection.satisfied && nonvanishing.satisfied && t.size() > 1) {
    const OperatorExpr phi = contraction_operator(t, i0);
    add_girth_diagnostics(report, "perturbation_", phi.family(), treeing_max_len);
    const Diagnostic* g = report.diagnostic("perturbation_girth");
    const Diagnostic* searched = report.diagnostic("perturbation_girth_search_length");
    if (contraction.satisfied) {
      const std::size_t girth = g->value ? static_cast<std::size_t>(*g->value)
                                         : static_cast<std::size_t>(*searched->value) + 1;
      report.diagnostics.push_back(
          {"error_bound", dominant_term_error_bound(contraction.measured, girth),
           g->value ? "2 rho^G / (G (1 - rho)) with the perturbation girth G"
                    : "2 rho^G / (G (1 - rho)) with G one past the searched length"});
    }
  }
  return report;
}

double closed_form_r1(const OperatorExpr& t, std::size_t i0) {
  require_term(t, i0);
  return log_abs_integral(t.terms()[i0].f, CellSet::full(t.space()));
}

OperatorExpr contraction_operator(const OperatorExpr& t, std::size_t i0) {
  require_term(t, i0);
  const CellFunction& f0 = t.terms()[i0].f;
  const PartialInjection& g0 = t.generator(i0);
  if (!g0.is_full_bijection())
    fail("the dominant generator must be a bijection of the whole space");
  const PartialInjection g0_inv = invert(g0);
  const std::string& name0 = t.terms()[i0].generator;

  GeneratorFamily fam(t.space());
  std::vector<OperatorExpr::Term> terms;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i == i0) continue;
    const auto& term = t.terms()[i];
    std::string name = name0 + "^-1*" + term.generator;
    if (!fam.index_of(name))
      fam.add(name, compose(g0_inv, t.generator(i)));
    // (f_i / f_{i0}) o g_{i0}
    CellFunction q = compose_with_inverse(div(term.f, f0), g0_inv);
    terms.push_back({std::move(q), std::move(name)});
  }
  return OperatorExpr(std::move(fam), std::move(terms));
}

DenseOperator factorization_rhs(const OperatorExpr& t, std::size_t i0) {
  const OperatorExpr phi = contraction_operator(t, i0);
  const DenseOperator lead = matmul(matrix_of_mult(t.terms()[i0].f),
                                    matrix_of_translation(t.generator(i0)));
  return matmul(lead, add(DenseOperator::identity(t.space().size()), assemble(phi)));
}

double dominant_term_error_bound(double rho, std::size_t girth) {
  if (!(rho < 1.0) || girth == 0) return kInf;
  if (rho == 0.0) return 0.0;
  const double g = static_cast<double>(girth);
  return 2.0 * std::pow(rho, g) / (g * (1.0 - rho));
}

// ---------------------------------------------------------------------------
// Disjoint-range formula

HypothesisReport check_thm_r2(const OperatorExpr& t) {
  HypothesisReport report;
  report.theorem = "disjoint_ranges";
  const DiscreteSpace space = t.space();
  std::vector<CellSet> domains;
  std::vector<CellSet> ranges;
  CellSet covered = CellSet::empty(space);
  for (std::size_t i = 0; i < t.size(); ++i) {
    domains.push_back(t.generator(i).domain());
    ranges.push_back(t.generator(i).range());
    covered = covered | domains.back();
  }
  const Measure cover = measure(covered);
  const Measure range_overlap = max_pairwise_overlap(ranges);
  const Measure domain_overlap = max_pairwise_overlap(domains);

  const Condition s1 = measure_condition("s1_domains_cover", cover, Measure(1),
                                         cover == Measure(1), "==");
  const Condition s2 = measure_condition("s2_ranges_disjoint", range_overlap,
                                         Measure(0), range_overlap == Measure(0), "==");
  const Condition s3 = measure_condition("s3_domains_disjoint", domain_overlap,
                                         Measure(0), domain_overlap == Measure(0), "==");
  report.conditions = {s1, s2, s3};
  report.overall = s1.satisfied && s2.satisfied;

  const bool standard = s1.satisfied && s2.satisfied;
  const bool swapped = s3.satisfied && s2.satisfied;
  std::string which = standard && swapped ? "s1+s2 and s3+s2"
                      : standard          ? "s1+s2"
                      : swapped           ? "s3+s2"
                                          : "none";
  std::string note = "hypothesis variants satisfied: " + which;
  if (swapped && !standard) {
    note += "; without s1 the operator vanishes on a set of measure " +
            measure_text(Measure(1) - cover) +
            ", so the finite determinant is 0 and the closed form does not apply";
  }
  if (standard) note += "; s3 follows from s1+s2 and holds";
  report.diagnostics.push_back(
      {"variant", standard ? 1.0 : (swapped ? 2.0 : 0.0), std::move(note)});
  return report;
}

double closed_form_r2(const OperatorExpr& t) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double v = log_abs_integral(t.terms()[i].f, t.generator(i).range());
    if (std::isinf(v)) return kNegInf;
    sum.add(v);
  }
  return sum.value();
}

StructureReport mult_op_structure_check(const OperatorExpr& t) {
  const std::size_t n = t.space().size();
  StructureReport out;
  out.h.assign(n, 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const PartialInjection& g = t.generator(i);
    const CellFunction& f = t.terms()[i].f;
    for (std::size_t x = 0; x < n; ++x)
      if (g.defined_at(x)) out.h[x] += std::norm(f[g(x)]);
  }
  const DenseOperator ta = assemble(t);
  const DenseOperator gram = matmul(adjoint(ta), ta);

  CompensatedSum off;
  double worst_off = 0.0;
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) {
        out.diagonal_deviation =
            std::max(out.diagonal_deviation, std::abs(gram(i, i) - out.h[i]));
        continue;
      }
      const double v = std::abs(gram(i, j));
      off.add(v * v);
      if (v > worst_off) {
        worst_off = v;
        worst_i = i;
        worst_j = j;
      }
    }
  }
  out.off_diagonal_mass = std::sqrt(off.value());
  out.max_deviation = std::max(worst_off, out.diagonal_deviation);
  const double hmax = *std::max_element(out.h.begin(), out.h.end());
  // Diagonal entries are short sums of |f|^2 and carry rounding relative to
  // their size.
  out.tolerance = 1e-12 * std::max(1.0, hmax);
  out.ok = out.off_diagonal_mass < out.tolerance &&
           out.diagonal_deviation <= out.tolerance;
  if (!out.ok) {
    std::ostringstream msg;
    if (out.off_diagonal_mass >= out.tolerance) {
      msg << "T*T has off-diagonal entry " << worst_off << " at (" << worst_i
          << ", " << worst_j << ")";
    } else {
      msg << "T*T diagonal deviates from h by " << out.diagonal_deviation;
    }
    out.violation = msg.str();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Traces and the z - Phi formula

TraceProfile trace_vanishing_profile(const OperatorExpr& phi, unsigned n_max,
                                     std::size_t term_cap) {
  if (n_max < 1) fail("trace profile needs nMax >= 1");
  TraceProfile out;
  const DenseOperator a = assemble(phi);
  const double bound = op_norm_upper_bound(phi);
  DenseOperator p = DenseOperator::identity(a.size());
  for (unsigned n = 1; n <= n_max; ++n) {
    p = matmul(p, a);
    TraceSample s;
    s.n = n;
    s.tau_matrix = trace(p);
    if (normal_term_count(phi, n, term_cap) <= term_cap) {
      CompensatedComplexSum sum;
      for_each_normal_term(
          phi, n,
          [&](const CellFunction& h, const PartialInjection& w, const Word&) {
            sum.add(integrate(h, fixed_point_set(w)));
          },
          term_cap);
      s.tau_normal_form = sum.value();
      const double scale = std::max(1.0, std::abs(s.tau_matrix));
      s.paths_agree = std::abs(*s.tau_normal_form - s.tau_matrix) <=
                      kTraceAgreement * scale;
    } else {
      out.normal_form_truncated = true;
    }
    out.paths_agree = out.paths_agree && s.paths_agree;

    const Complex tau = s.tau_normal_form.value_or(s.tau_matrix);
    const double scale = std::pow(bound, static_cast<double>(n));
    if (!out.first_nonzero && scale > 0.0 && std::abs(tau) > 1e-12 * scale)
      out.first_nonzero = n;
    out.samples.push_back(s);
  }
  return out;
}

std::optional<double> cycle_log_det(const OperatorExpr& phi, Complex z) {
  if (phi.size() != 1) return std::nullopt;
  const PartialInjection& g = phi.generator(0);
  if (!g.is_full_bijection()) return std::nullopt;
  const CellFunction& f = phi.terms()[0].f;
  const std::size_t n = phi.space().size();
  const double log_abs_z = std::log(std::abs(z));

  // On a cycle of length L with weight product w, det(z - W) = z^L - w.
  // log|z^L - w| = L log|z| + log|1 - u| with u = w / z^L; the second term
  // is evaluated as log1p to keep tiny u accurate.
  std::vector<bool> seen(n, false);
  CompensatedSum sum;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::size_t len = 0;
    double log_w = 0.0;
    Complex phase = 1.0;
    bool zero_weight = false;
    std::size_t x = start;
    do {
      seen[x] = true;
      x = g(x);
      const Complex fx = f[x];
      if (fx == Complex(0.0)) {
        zero_weight = true;
      } else {
        log_w += std::log(std::abs(fx));
        phase *= fx / std::abs(fx);
      }
      ++len;
    } while (x != start);
    const double l = static_cast<double>(len);
    if (zero_weight) {
      sum.add(l * log_abs_z);
      continue;
    }
    const double log_u_abs = log_w - l * log_abs_z;
    const Complex u_phase = phase / std::pow(z / std::abs(z), l);
    if (log_u_abs < 0.0) {
      const double r = std::exp(log_u_abs);
      const double v = r * r - 2.0 * r * u_phase.real();
      sum.add(l * log_abs_z + 0.5 * std::log1p(v));
    } else {
      // |z^L - w| = |w| |1 - 1/u|
      const double r = std::exp(-log_u_abs);
      const double v = r * r - 2.0 * r * u_phase.real();
      if (v <= -1.0) return kNegInf;
      sum.add(log_w + 0.5 * std::log1p(v));
    }
  }
  return sum.value() / static_cast<double>(n);
}

DeningerReport deninger_check(const OperatorExpr& phi, Complex z, unsigned n_max,
                              int radius_k_max, std::size_t term_cap) {
  DeningerReport out;
  out.z = z;
  out.log_abs_z = std::log(std::abs(z));
  const DenseOperator a = assemble(phi);
  out.spectral_radius_bound = spectral_radius_estimate(a, radius_k_max);
  out.radius_hypothesis = out.spectral_radius_bound < std::abs(z);
  out.traces = trace_vanishing_profile(phi, n_max, term_cap);
  out.numeric = fk_determinant(shift(z, a));
  out.deviation = compare(out.log_abs_z, out.numeric.log_det, a.size()).abs_error;
  out.finite_closed_form = cycle_log_det(phi, z);
  if (out.finite_closed_form)
    out.finite_deviation =
        compare(out.log_abs_z, *out.finite_closed_form, a.size()).abs_error;
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

TheoremComparison compare_theorem(const OperatorExpr& t, const TheoremTask& task) {
  const std::size_t n = t.space().size();
  switch (task.theorem) {
    case Theorem::DominantTerm: {
      const double numeric = fk_determinant(assemble(t)).log_det;
      TheoremComparison c = compare(closed_form_r1(t, task.i0), numeric, n);
      const HypothesisReport r = check_thm_r1(t, task.i0, task.treeing_max_len);
      if (const Diagnostic* b = r.diagnostic("error_bound")) c.error_bound = b->value;
      return c;
    }
    case Theorem::DisjointRanges: {
      const double numeric = fk_determinant(assemble(t)).log_det;
      return compare(closed_form_r2(t), numeric, n);
    }
    case Theorem::Deninger: {
      const double numeric = fk_determinant(shift(task.z, assemble(t))).log_det;
      TheoremComparison c = compare(std::log(std::abs(task.z)), numeric, n);
      if (const auto exact = cycle_log_det(t, task.z))
        c.error_bound = compare(std::log(std::abs(task.z)), *exact, n).abs_error;
      return c;
    }
    case Theorem::Multiplication: {
      // Every generator must be the identity on its domain; then
      // T = M_F with F = sum_i f_i chi_{A_i}.
      std::vector<Complex> values(n, 0.0);
      for (std::size_t i = 0; i < t.size(); ++i) {
        const PartialInjection& g = t.generator(i);
        for (std::size_t x = 0; x < n; ++x) {
          if (!g.defined_at(x)) continue;
          if (g(x) != x)
            fail("multiplication comparison needs identity generators");
          values[x] += t.terms()[i].f[x];
        }
      }
      const CellFunction total(t.space(), std::move(values));
      const double numeric = fk_determinant(assemble(t)).log_det;
      return compare(log_abs_integral(total, CellSet::full(t.space())), numeric, n);
    }
  }
  fail("unknown theorem");
}

std::vector<TheoremComparison> convergence_sweep(
    const std::function<OperatorExpr(std::size_t)>& instantiate,
    const TheoremTask& task, std::span<const std::size_t> ns, unsigned threads) {
  std::vector<TheoremComparison> out(ns.size());
  auto run_one = [&](std::size_t idx) {
    out[idx] = compare_theorem(instantiate(ns[idx]), task);
  };
  if (threads <= 1 || ns.size() <= 1) {
    for (std::size_t i = 0; i < ns.size(); ++i) run_one(i);
    return out;
  }

  std::mutex guard;
  std::exception_ptr first_error;
  std::size_t next = 0;
  auto worker = [&]() {
    for (;;) {
      std::size_t idx;
      {
        std::lock_guard lock(guard);
        if (next >= ns.size() || first_error) return;
        idx = next++;
      }
      try {
        run_one(idx);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = std::min<unsigned>(threads, static_cast<unsigned>(ns.size()));
  for (unsigned k = 0; k < count; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

bool errors_nonincreasing(std::span<const TheoremComparison> sweep) {
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (sweep[i].abs_error > sweep[i - 1].abs_error) return false;
  return true;
}

}  // namespace fkdet
