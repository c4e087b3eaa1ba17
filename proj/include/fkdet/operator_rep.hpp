#pragma once

// Matrix images of M_f, L_g and of sums T = sum_i M_{f_i} L_{g_i} on the
// N-point cell model, the normalized trace, and the normal-form calculus
// L_g M_f = M_{f g^{-1}} L_g.
//
// Operators act on one basis vector per cell. L_g has a single 1 in column
// y at row g(y) for every y in the domain of g.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fkdet/measured_grid.hpp"
#include "fkdet/partial_isos.hpp"

namespace fkdet {

/// Dense N x N complex matrix, column-major.
class DenseOperator {
 public:
  explicit DenseOperator(std::size_t n) : n_(n), a_(n * n, Complex(0.0)) {}

  static DenseOperator identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  Complex& operator()(std::size_t row, std::size_t col) {
    return a_[col * n_ + row];
  }
  Complex operator()(std::size_t row, std::size_t col) const {
    return a_[col * n_ + row];
  }
  std::span<const Complex> data() const noexcept { return a_; }
  std::span<Complex> data() noexcept { return a_; }

  friend bool operator==(const DenseOperator&, const DenseOperator&) = default;

 private:
  std::size_t n_;
  std::vector<Complex> a_;
};

DenseOperator matrix_of_translation(const PartialInjection& g);
DenseOperator matrix_of_mult(const CellFunction& f);

DenseOperator adjoint(const DenseOperator& a);
DenseOperator matmul(const DenseOperator& a, const DenseOperator& b);
DenseOperator add(const DenseOperator& a, const DenseOperator& b);
DenseOperator subtract(const DenseOperator& a, const DenseOperator& b);
DenseOperator scale(Complex lambda, const DenseOperator& a);
/// z I - A
DenseOperator shift(Complex z, const DenseOperator& a);
DenseOperator power(const DenseOperator& a, unsigned n);

/// (1/N) sum_x A(x, x)
Complex trace(const DenseOperator& a);

double max_abs_entry(const DenseOperator& a);
double max_abs_diff(const DenseOperator& a, const DenseOperator& b);
double frobenius_norm(const DenseOperator& a);

/// Column-major "re im" pairs, one per line, row index fastest.
void dump_matrix(const DenseOperator& a, std::ostream& out);

/// T = sum_i M_{f_i} L_{g_i}; generator names resolve in the owned family.
class OperatorExpr {
 public:
  struct Term {
    CellFunction f;
    std::string generator;
  };

  OperatorExpr(GeneratorFamily family, std::vector<Term> terms);

  const GeneratorFamily& family() const noexcept { return family_; }
  const DiscreteSpace& space() const noexcept { return family_.space(); }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  const PartialInjection& generator(std::size_t term) const {
    return family_.find(terms_[term].generator);
  }

 private:
  GeneratorFamily family_;
  std::vector<Term> terms_;
};

DenseOperator assemble(const OperatorExpr& t);

/// M_h L_w
struct NormalTerm {
  CellFunction h;
  Word w;
};

DenseOperator materialize(const GeneratorFamily& family, const NormalTerm& t);

/// integrate(h, fixed points of w), without forming a matrix.
Complex trace_of_term(const GeneratorFamily& family, const NormalTerm& t);

inline constexpr std::size_t kNormalTermCap = 1000000;

/// Number of normal terms of T^n, or cap + 1 when it exceeds `cap`.
std::size_t normal_term_count(const OperatorExpr& t, unsigned n,
                              std::size_t cap = kNormalTermCap);

/// Streams the k^n normal terms of T^n in lexicographic order of the term
/// index sequence. The callback receives h, the evaluated word, and the word.
/// Throws a resource error when k^n exceeds `cap`.
void for_each_normal_term(
    const OperatorExpr& t, unsigned n,
    const std::function<void(const CellFunction& h, const PartialInjection& w,
                             const Word& word)>& visit,
    std::size_t cap = kNormalTermCap);

std::vector<NormalTerm> normal_form_power(const OperatorExpr& t, unsigned n,
                                          std::size_t cap = kNormalTermCap);

/// sum_i ||f_i||_inf
double op_norm_upper_bound(const OperatorExpr& t);

}  // namespace fkdet
