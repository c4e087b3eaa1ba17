#include "fkdet/fk_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fkdet/error.hpp"
#include "fkdet/numeric.hpp"

namespace fkdet {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Real Jacobi angle for the 2x2 block [[app, b], [b, aqq]] with b > 0:
// returns (c, s, t) such that the rotation [[c, s], [-s, c]] zeroes b, with
// app' = app - t b and aqq' = aqq + t b.
struct Rotation {
  double c;
  double s;
  double t;
};

Rotation jacobi_angle(double app, double aqq, double b) {
  const double theta = (aqq - app) / (2.0 * b);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  if (!std::isfinite(theta)) t = 0.5 / theta;  // b negligible against gap
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  return {c, t * c, t};
}

double off_diagonal_mass(const DenseOperator& a) {
  CompensatedSum sum;
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t i = 0; i < a.size(); ++i)
      if (i != j) sum.add(std::norm(a(i, j)));
  return std::sqrt(sum.value());
}

}  // namespace

// ---------------------------------------------------------------------------
// Two-sided cyclic Jacobi on a Hermitian matrix.
//
// For the pivot (p, q) write a_pq = b e^{i phi}. With D = diag(1, e^{-i phi})
// on (p, q) the block D* A D is real symmetric, and a real rotation R
// finishes it off. U = D R has U_pp = c, U_pq = s, U_qp = -s e^{-i phi},
// U_qq = c e^{-i phi}; the update is A <- U* A U, V <- V U.

SpectrumResult hermitian_eigen(const DenseOperator& h,
                               const JacobiOptions& options) {
  const std::size_t n = h.size();
  const double norm = frobenius_norm(h);
  double asym = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      asym = std::max(asym, std::abs(h(i, j) - std::conj(h(j, i))));
  if (asym > 1e-12 * std::max(norm, 1.0)) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian (asymmetry " << asym << ")";
    fail_numerical(msg.str());
  }

  DenseOperator a(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      a(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));

  std::optional<DenseOperator> v;
  if (options.want_vectors) v = DenseOperator::identity(n);

  SpectrumResult out;
  const double target = options.threshold * norm;
  double off = off_diagonal_mass(a);
  while (off > target) {
    if (out.sweeps >= options.max_sweeps) {
      std::ostringstream msg;
      msg << "Jacobi eigensolver did not converge in " << options.max_sweeps
          << " sweeps (off-diagonal " << off << ")";
      fail_numerical(msg.str());
    }
    ++out.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double b = std::abs(apq);
        if (b == 0.0) continue;
        const Complex phase = apq / b;              // e^{i phi}
        const Complex phase_c = std::conj(phase);   // e^{-i phi}
        const auto [c, s, t] =
            jacobi_angle(a(p, p).real(), a(q, q).real(), b);

        // Columns: A <- A U
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - s * phase_c * akq;
          a(k, q) = s * akp + c * phase_c * akq;
        }
        // Rows: A <- U* A
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        if (v) {
          DenseOperator& vm = *v;
          for (std::size_t k = 0; k < n; ++k) {
            const Complex vkp = vm(k, p);
            const Complex vkq = vm(k, q);
            vm(k, p) = c * vkp - s * phase_c * vkq;
            vm(k, q) = s * vkp + c * phase_c * vkq;
          }
        }
      }
    }
    off = off_diagonal_mass(a);
  }
  out.off_diagonal_residual = off;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });
  out.eigenvalues.reserve(n);
  for (std::size_t k : order) out.eigenvalues.push_back(a(k, k).real());
  if (v) {
    DenseOperator sorted(n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) sorted(i, j) = (*v)(i, order[j]);
    out.eigenvectors = std::move(sorted);
  }
  return out;
}

// ---------------------------------------------------------------------------
// One-sided Jacobi.
//
// The columns a_i of the working copy are rotated pairwise until they are
// mutually orthogonal; each pair rotation is exactly the two-sided Jacobi
// step on the Gram matrix G = A*A restricted to (i, j), so the converged
// column norms are the square roots of the eigenvalues of T*T. Working on T
// instead of T*T keeps small singular values accurate relative to sigma_max
// (forming T*T would square the condition number).

std::vector<double> singular_values(const DenseOperator& t,
                                    const SvdOptions& options) {
  const std::size_t n = t.size();
  // Split storage: column j occupies re[j*n .. j*n+n) and im[...].
  std::vector<double> re(n * n);
  std::vector<double> im(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      re[j * n + i] = t(i, j).real();
      im[j * n + i] = t(i, j).imag();
    }

  auto column_norm2 = [&](std::size_t j) {
    const double* r = &re[j * n];
    const double* m = &im[j * n];
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += r[k] * r[k] + m[k] * m[k];
    return s;
  };

  std::vector<double> norms(n);
  const double tol = static_cast<double>(std::max<std::size_t>(n, 1)) * kEps;
  int sweep = 0;
  for (;;) {
    for (std::size_t j = 0; j < n; ++j) norms[j] = column_norm2(j);
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = norms[p];
        const double beta = norms[q];
        if (alpha == 0.0 || beta == 0.0) continue;
        double* rp = &re[p * n];
        double* ip = &im[p * n];
        double* rq = &re[q * n];
        double* iq = &im[q * n];
        // gamma = a_p^* a_q
        double gr = 0.0;
        double gi = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          gr += rp[k] * rq[k] + ip[k] * iq[k];
          gi += rp[k] * iq[k] - ip[k] * rq[k];
        }
        const double b = std::hypot(gr, gi);
        if (b <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const auto [c, s, tn] = jacobi_angle(alpha, beta, b);
        // e^{-i phi} = conj(gamma) / b
        const double er = gr / b;
        const double ei = -gi / b;
        // a_p' = c a_p - s e^{-i phi} a_q ; a_q' = s a_p + c e^{-i phi} a_q
        for (std::size_t k = 0; k < n; ++k) {
          const double xr = rp[k];
          const double xi = ip[k];
          const double yr = er * rq[k] - ei * iq[k];
          const double yi = er * iq[k] + ei * rq[k];
          rp[k] = c * xr - s * yr;
          ip[k] = c * xi - s * yi;
          rq[k] = s * xr + c * yr;
          iq[k] = s * xi + c * yi;
        }
        norms[p] = std::max(alpha - tn * b, 0.0);
        norms[q] = std::max(beta + tn * b, 0.0);
      }
    }
    if (!rotated) break;
    if (++sweep >= options.max_sweeps) {
      std::ostringstream msg;
      msg << "one-sided Jacobi did not converge in " << options.max_sweeps
          << " sweeps";
      fail_numerical(msg.str());
    }
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(column_norm2(j));
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

// ---------------------------------------------------------------------------

double FKResult::determinant() const { return std::exp(log_det); }

FKResult fk_from_singular_values(std::vector<double> sigma) {
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  FKResult out;
  const std::size_t n = sigma.size();
  const double sigma_max = n ? sigma.front() : 0.0;
  out.rank_tolerance =
      sigma_max > 0.0 ? static_cast<double>(n) * kEps * sigma_max : 0.0;
  CompensatedSum sum;
  for (double s : sigma) {
    if (s <= out.rank_tolerance) {
      ++out.zero_count;
    } else {
      sum.add(std::log(s));
    }
  }
  out.log_det = out.zero_count > 0 || n == 0
                    ? (n == 0 ? 0.0 : kNegInf)
                    : sum.value() / static_cast<double>(n);
  out.singular_values = std::move(sigma);
  return out;
}

FKResult fk_determinant(const DenseOperator& t, const SvdOptions& options) {
  return fk_from_singular_values(singular_values(t, options));
}

double spectral_radius_estimate(const DenseOperator& t, int k_max,
                                const SvdOptions& options) {
  if (k_max < 1) fail("spectral radius estimate needs k_max >= 1");
  // p holds T^{2^k} / exp(log_scale); rescaling keeps repeated squaring
  // away from overflow and underflow.
  DenseOperator p = t;
  double log_scale = 0.0;
  double best = std::numeric_limits<double>::infinity();
  double exponent = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    p = matmul(p, p);
    log_scale *= 2.0;
    exponent *= 2.0;
    const double m = max_abs_entry(p);
    if (m == 0.0) return 0.0;
    p = scale(1.0 / m, p);
    log_scale += std::log(m);
    const double smax = singular_values(p, options).front();
    if (smax == 0.0) return 0.0;
    best = std::min(best, std::exp((std::log(smax) + log_scale) / exponent));
  }
  return best;
}

double log_abs_det_lu(const DenseOperator& t) {
  const std::size_t n = t.size();
  if (n == 0) return 0.0;
  const double tol = static_cast<double>(n) * kEps * frobenius_norm(t);
  DenseOperator a = t;
  CompensatedSum sum;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= tol || best == 0.0) return kNegInf;
    if (piv != k)
      for (std::size_t j = k; j < n; ++j) std::swap(a(k, j), a(piv, j));
    const Complex pivot = a(k, k);
    sum.add(std::log(best));
    for (std::size_t i = k + 1; i < n; ++i) a(i, k) /= pivot;
    for (std::size_t j = k + 1; j < n; ++j) {
      const Complex akj = a(k, j);
      if (akj == Complex(0.0)) continue;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= a(i, k) * akj;
    }
  }
  return sum.value() / static_cast<double>(n);
}

DenseOperator absolute_value(const DenseOperator& a,
                             const JacobiOptions& options) {
  JacobiOptions opts = options;
  opts.want_vectors = true;
  const SpectrumResult spec = hermitian_eigen(matmul(adjoint(a), a), opts);
  const DenseOperator& v = *spec.eigenvectors;
  const std::size_t n = a.size();
  DenseOperator vs(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double root = std::sqrt(std::max(spec.eigenvalues[j], 0.0));
    for (std::size_t i = 0; i < n; ++i) vs(i, j) = v(i, j) * root;
  }
  return matmul(vs, adjoint(v));
}

}  // namespace fkdet
