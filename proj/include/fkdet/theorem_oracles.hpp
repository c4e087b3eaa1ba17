#pragma once

// Hypothesis checks and closed forms for the determinant formulas of
//
//   (A) T = sum_i M_{f_i} L_{g_i} with a dominant unitary term i0:
//         log Delta(T) = int log|f_{i0}|
//   (B) partial isomorphisms with disjoint ranges covering the domains:
//         log Delta(T) = sum_i int_{B_i} log|f_i|
//   (C) Delta(z - Phi) = |z| when r(Phi) < |z| and tau(Phi^n) = 0 for n >= 1
//
// together with comparisons against the dense numerics of fk_core.
//
// (A) and (C) only hold on the infinite model, so the checks that depend on
// treeability or ergodicity come back as quantitative diagnostics (girth,
// orbit count) rather than pass/fail conditions. (B) is exact on the cell
// model.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fkdet/fk_core.hpp"
#include "fkdet/operator_rep.hpp"

namespace fkdet {

struct Condition {
  std::string label;
  bool satisfied = false;
  bool evaluable = true;
  double measured = 0.0;
  /// Exact rational form of `measured`, when it is a cell measure.
  std::optional<Measure> exact;
  double threshold = 0.0;
  std::string relation;  // "<", "==", ...
};

struct Diagnostic {
  std::string label;
  std::optional<double> value;
  std::string note;
};

struct HypothesisReport {
  std::string theorem;
  std::vector<Condition> conditions;
  bool overall = false;
  std::vector<Diagnostic> diagnostics;

  const Condition* condition(const std::string& label) const;
  const Diagnostic* diagnostic(const std::string& label) const;
};

struct TheoremComparison {
  std::size_t n = 0;
  double closed_form = 0.0;
  double numeric = 0.0;
  /// |closed_form - numeric|; 0 when both are -inf, +inf when only one is.
  double abs_error = 0.0;
  std::optional<double> error_bound;
};

TheoremComparison compare(double closed_form, double numeric, std::size_t n);

// --- dominant-term formula -------------------------------------------------

inline constexpr std::size_t kDefaultTreeingLength = 12;

HypothesisReport check_thm_r1(const OperatorExpr& t, std::size_t i0,
                              std::size_t treeing_max_len = kDefaultTreeingLength);
double closed_form_r1(const OperatorExpr& t, std::size_t i0);

/// Phi = sum_{i != i0} M_{(f_i/f_{i0}) o g_{i0}} L_{g_{i0}^{-1} g_i}, the
/// perturbation in T = M_{f_{i0}} L_{g_{i0}} (I + Phi). Requires g_{i0} to be
/// a full bijection and f_{i0} to be nonzero on every cell.
OperatorExpr contraction_operator(const OperatorExpr& t, std::size_t i0);

/// M_{f_{i0}} L_{g_{i0}} (I + assemble(Phi)).
DenseOperator factorization_rhs(const OperatorExpr& t, std::size_t i0);

/// 2 rho^G / (G (1 - rho)) for rho < 1, G >= 1.
double dominant_term_error_bound(double rho, std::size_t girth);

// --- disjoint-range formula ------------------------------------------------

HypothesisReport check_thm_r2(const OperatorExpr& t);
double closed_form_r2(const OperatorExpr& t);

struct StructureReport {
  /// max |T*T - M_h| entrywise
  double max_deviation = 0.0;
  double off_diagonal_mass = 0.0;
  double diagonal_deviation = 0.0;
  double tolerance = 0.0;
  bool ok = false;
  std::string violation;
  std::vector<double> h;
};

/// Compares T*T against M_h, h = sum_i |f_i o g_i|^2 chi_{A_i}.
StructureReport mult_op_structure_check(const OperatorExpr& t);

// --- trace profile and the z - Phi formula ---------------------------------

struct TraceSample {
  unsigned n = 0;
  Complex tau_matrix;
  std::optional<Complex> tau_normal_form;
  bool paths_agree = true;
};

struct TraceProfile {
  std::vector<TraceSample> samples;
  /// First n with tau(Phi^n) != 0 (relative to ||Phi||-bound^n).
  std::optional<unsigned> first_nonzero;
  /// Set when the normal-form path hit the term cap for some n.
  bool normal_form_truncated = false;
  bool paths_agree = true;
};

inline constexpr double kTraceAgreement = 1e-10;

TraceProfile trace_vanishing_profile(const OperatorExpr& phi, unsigned n_max,
                                     std::size_t term_cap = kNormalTermCap);

struct DeningerReport {
  Complex z;
  double spectral_radius_bound = 0.0;
  bool radius_hypothesis = false;
  TraceProfile traces;
  FKResult numeric;
  double log_abs_z = 0.0;
  double deviation = 0.0;  // |numeric.log_det - log|z||
  /// Exact finite-N value when Phi = M_f L_g with g a full bijection:
  /// (1/N) sum over cycles C of log|z^{|C|} - prod_{x in C} f(x)|.
  std::optional<double> finite_closed_form;
  std::optional<double> finite_deviation;  // |finite_closed_form - log|z||
};

DeningerReport deninger_check(const OperatorExpr& phi, Complex z,
                              unsigned n_max, int radius_k_max = 6,
                              std::size_t term_cap = kNormalTermCap);

/// Returns nullopt unless phi is a single term over a full bijection.
std::optional<double> cycle_log_det(const OperatorExpr& phi, Complex z);

// --- convergence sweeps ----------------------------------------------------

enum class Theorem { DominantTerm, DisjointRanges, Deninger, Multiplication };

struct TheoremTask {
  Theorem theorem = Theorem::DisjointRanges;
  std::size_t i0 = 0;
  Complex z = 1.0;
  std::size_t treeing_max_len = kDefaultTreeingLength;
};

/// Runs one comparison on an instantiated operator.
TheoremComparison compare_theorem(const OperatorExpr& t, const TheoremTask& task);

/// Instantiates the operator at each N and compares. With threads > 1 the
/// instances run concurrently; the output is always in the order of `ns`.
std::vector<TheoremComparison> convergence_sweep(
    const std::function<OperatorExpr(std::size_t)>& instantiate,
    const TheoremTask& task, std::span<const std::size_t> ns,
    unsigned threads = 1);

/// True when the errors never increase along the sweep.
bool errors_nonincreasing(std::span<const TheoremComparison> sweep);

}  // namespace fkdet
