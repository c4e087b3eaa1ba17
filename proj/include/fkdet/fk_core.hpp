#pragma once

// Dense spectral kernel: cyclic Jacobi for Hermitian matrices, singular
// values, and the Fuglede-Kadison determinant
//
//     log Delta(T) = tau(log |T|) = (1/N) sum_k log sigma_k(T)
//
// with the normalized trace tau = Tr / N. A singular value at or below the
// rank tolerance N * eps * sigma_max makes the determinant zero (log = -inf);
// the kernel is never discarded.

#include <cstddef>
#include <optional>
#include <vector>

#include "fkdet/operator_rep.hpp"

namespace fkdet {

struct JacobiOptions {
  /// Converged when the off-diagonal Frobenius mass is below
  /// threshold * ||H||_F.
  double threshold = 1e-12;
  int max_sweeps = 100;
  bool want_vectors = false;
};

struct SpectrumResult {
  /// Ascending.
  std::vector<double> eigenvalues;
  int sweeps = 0;
  double off_diagonal_residual = 0.0;
  /// Columns are eigenvectors, in the order of `eigenvalues`.
  std::optional<DenseOperator> eigenvectors;
};

/// Throws a numerical error if H is not Hermitian to 1e-12 (relative to
/// ||H||_F) or the sweeps do not converge.
SpectrumResult hermitian_eigen(const DenseOperator& h,
                               const JacobiOptions& options = {});

struct SvdOptions {
  int max_sweeps = 100;
};

/// Descending singular values, computed by one-sided (Hestenes) Jacobi on the
/// columns of T: the implicit two-sided Jacobi iteration on T*T.
std::vector<double> singular_values(const DenseOperator& t,
                                    const SvdOptions& options = {});

struct FKResult {
  double log_det = 0.0;  // may be -inf
  std::vector<double> singular_values;
  double rank_tolerance = 0.0;
  std::size_t zero_count = 0;

  double determinant() const;
};

FKResult fk_from_singular_values(std::vector<double> sigma);
FKResult fk_determinant(const DenseOperator& t, const SvdOptions& options = {});

/// min_{1<=k<=k_max} sigma_max(T^{2^k})^{1/2^k}, an upper bound on r(T).
double spectral_radius_estimate(const DenseOperator& t, int k_max,
                                const SvdOptions& options = {});

/// (1/N) log|det T| by partially pivoted LU. -inf when a pivot falls below
/// N * eps * ||T||_F.
double log_abs_det_lu(const DenseOperator& t);

/// |A| = (A*A)^{1/2} via the eigendecomposition of A*A.
DenseOperator absolute_value(const DenseOperator& a,
                             const JacobiOptions& options = {});

}  // namespace fkdet
