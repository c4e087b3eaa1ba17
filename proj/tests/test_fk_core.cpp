#include <doctest.h>

#include <random>

#include "fkdet/error.hpp"
#include "fkdet/fk_core.hpp"
#include "oracles.hpp"

using namespace fkdet;

namespace {

DenseOperator random_dense(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  DenseOperator a(n);
  for (auto& x : a.data()) x = {g(rng), g(rng)};
  return a;
}

}  // namespace

TEST_CASE("2x2 Hermitian eigenvalues") {
  DenseOperator h(2);
  h(0, 1) = 1.0;
  h(1, 0) = 1.0;
  const auto r = hermitian_eigen(h, {.want_vectors = true});
  CHECK(r.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(r.eigenvalues[1] == doctest::Approx(1.0));
  REQUIRE(r.eigenvectors.has_value());
  // H v = lambda v
  const DenseOperator hv = matmul(h, *r.eigenvectors);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(std::abs(hv(i, k) - r.eigenvalues[k] * (*r.eigenvectors)(i, k)) < 1e-12);
}

TEST_CASE("complex Hermitian eigenvalues match trace and determinant") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    const DenseOperator a = random_dense(n, rng);
    const DenseOperator h = add(a, adjoint(a));
    const auto r = hermitian_eigen(h);
    double sum = 0.0, logprod = 0.0;
    for (double l : r.eigenvalues) {
      sum += l;
      logprod += std::log(std::abs(l));
    }
    CHECK(sum / static_cast<double>(n) == doctest::Approx(trace(h).real()).epsilon(1e-10));
    const double want = std::log(std::abs(oracle::leibniz_det(oracle::from_dense(h))));
    CHECK(logprod == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("non-Hermitian input is rejected") {
  DenseOperator a(2);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eigen(a), Error);
}

TEST_CASE("singular values against the Leibniz determinant") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    const DenseOperator a = random_dense(n, rng);
    const FKResult r = fk_determinant(a);
    CHECK(r.zero_count == 0);
    CHECK(r.log_det == doctest::Approx(oracle::log_fk_leibniz(oracle::from_dense(a))).epsilon(1e-10));
    CHECK(log_abs_det_lu(a) == doctest::Approx(r.log_det).epsilon(1e-10));
    CHECK(std::is_sorted(r.singular_values.rbegin(), r.singular_values.rend()));
  }
}

TEST_CASE("small singular values stay accurate") {
  // diag(1, 1e-9) rotated: sigma_min must survive to high relative accuracy
  DenseOperator a(2);
  const double c = std::cos(0.3), s = std::sin(0.3);
  a(0, 0) = c;
  a(0, 1) = -s * 1e-9;
  a(1, 0) = s;
  a(1, 1) = c * 1e-9;
  const auto sv = singular_values(a);
  CHECK(sv[1] == doctest::Approx(1e-9).epsilon(1e-10));
}

TEST_CASE("rank deficiency gives -inf") {
  DenseOperator a(3);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  const FKResult r = fk_determinant(a);
  CHECK(std::isinf(r.log_det));
  CHECK(r.log_det < 0);
  CHECK(r.zero_count == 1);
  CHECK(r.determinant() == 0.0);
  CHECK(std::isinf(log_abs_det_lu(a)));
  const FKResult z = fk_determinant(DenseOperator(4));
  CHECK(z.zero_count == 4);
  CHECK(z.rank_tolerance == 0.0);
}

TEST_CASE("absolute value squares to A*A") {
  std::mt19937_64 rng(6);
  const DenseOperator a = random_dense(5, rng);
  const DenseOperator m = absolute_value(a);
  CHECK(max_abs_diff(matmul(m, m), matmul(adjoint(a), a)) < 1e-10);
}

TEST_CASE("spectral radius estimate bounds the spectrum") {
  // nilpotent shift: r = 0, norm 1
  DenseOperator j(6);
  for (std::size_t k = 0; k + 1 < 6; ++k) j(k + 1, k) = 1.0;
  CHECK(spectral_radius_estimate(j, 4) == 0.0);
  const DenseOperator d = scale(0.7, DenseOperator::identity(4));
  CHECK(spectral_radius_estimate(d, 3) == doctest::Approx(0.7));
}
