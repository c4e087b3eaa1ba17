#pragma once

// Independent reference computations for tests. Nothing here calls the
// library's algorithms; only its data types are used for convenience.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include "fkdet/operator_rep.hpp"

namespace oracle {

using fkdet::Complex;
using Matrix = std::vector<std::vector<Complex>>;  // row-major

inline Matrix zeros(std::size_t n) { return Matrix(n, std::vector<Complex>(n, 0.0)); }

inline Matrix from_dense(const fkdet::DenseOperator& a) {
  Matrix m = zeros(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) m[i][j] = a(i, j);
  return m;
}

inline Matrix mul(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  Matrix c = zeros(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline double max_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d;
}

// Translation by a target table: column y has a 1 at row t[y].
inline Matrix translation(const std::vector<int>& t) {
  Matrix m = zeros(t.size());
  for (std::size_t y = 0; y < t.size(); ++y)
    if (t[y] >= 0) m[static_cast<std::size_t>(t[y])][y] = 1.0;
  return m;
}

inline Matrix diag(const std::vector<Complex>& f) {
  Matrix m = zeros(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) m[k][k] = f[k];
  return m;
}

// Permutation expansion, sign from the cycle type. N <= 8.
inline Complex leibniz_det(const Matrix& a) {
  const std::size_t n = a.size();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  Complex total = 0.0;
  do {
    int sign = 1;
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (seen[i]) continue;
      std::size_t len = 0;
      for (std::size_t j = i; !seen[j]; j = p[j]) {
        seen[j] = true;
        ++len;
      }
      if (len % 2 == 0) sign = -sign;
    }
    Complex prod = static_cast<double>(sign);
    for (std::size_t i = 0; i < n && prod != Complex(0.0); ++i) prod *= a[i][p[i]];
    total += prod;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

inline double log_fk_leibniz(const Matrix& a) {
  const double d = std::abs(leibniz_det(a));
  return d == 0.0 ? -INFINITY : std::log(d) / static_cast<double>(a.size());
}

// Random partial injection as a target table: a random subset of `domain`
// cells mapped injectively into random targets.
inline std::vector<int> random_partial(std::size_t n, std::size_t domain, std::mt19937_64& rng) {
  std::vector<int> src(n), dst(n);
  std::iota(src.begin(), src.end(), 0);
  std::iota(dst.begin(), dst.end(), 0);
  std::shuffle(src.begin(), src.end(), rng);
  std::shuffle(dst.begin(), dst.end(), rng);
  std::vector<int> t(n, -1);
  for (std::size_t k = 0; k < domain; ++k) t[static_cast<std::size_t>(src[k])] = dst[k];
  return t;
}

inline std::vector<Complex> random_values(std::size_t n, std::mt19937_64& rng, double lo = 0.25,
                                          double hi = 2.0) {
  std::uniform_real_distribution<double> mod(lo, hi), arg(0.0, 2.0 * M_PI);
  std::vector<Complex> v(n);
  for (auto& x : v) x = std::polar(mod(rng), arg(rng));
  return v;
}

inline fkdet::PartialInjection as_injection(fkdet::DiscreteSpace s, const std::vector<int>& t) {
  return fkdet::PartialInjection(s, std::vector<std::int32_t>(t.begin(), t.end()));
}

}  // namespace oracle
