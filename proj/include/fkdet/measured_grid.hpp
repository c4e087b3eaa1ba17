#pragma once

// Uniform discretization of ([0,1), Borel, Lebesgue) into N equal cells.
//
// Cell k stands for the interval [k/N, (k+1)/N). Measurable sets are unions
// of cells and carry exact rational measure; functions are complex step
// functions with one value per cell.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <boost/rational.hpp>

namespace fkdet {

using Complex = std::complex<double>;
using Measure = boost::rational<std::int64_t>;

/// Relative threshold below which a cell value counts as zero for log-type
/// integrals (relative to the function's sup norm).
inline constexpr double kZeroTolerance = 1e-14;

class PartialInjection;

class DiscreteSpace {
 public:
  explicit DiscreteSpace(std::size_t cells);

  std::size_t size() const noexcept { return cells_; }
  double midpoint(std::size_t k) const noexcept {
    return (static_cast<double>(k) + 0.5) / static_cast<double>(cells_);
  }

  friend bool operator==(const DiscreteSpace&, const DiscreteSpace&) = default;

 private:
  std::size_t cells_;
};

void require_same_space(const DiscreteSpace& a, const DiscreteSpace& b,
                        const char* where);

class CellSet {
 public:
  static CellSet empty(DiscreteSpace space);
  static CellSet full(DiscreteSpace space);
  static CellSet of(DiscreteSpace space, std::span<const std::size_t> cells);
  /// Cells k with lo*N <= k < hi*N. Both endpoints must land on cell
  /// boundaries (within 1e-9 of an integer after scaling).
  static CellSet interval(DiscreteSpace space, double lo, double hi);

  const DiscreteSpace& space() const noexcept { return space_; }
  bool contains(std::size_t k) const { return k < mask_.size() && mask_[k]; }
  std::size_t count() const noexcept { return count_; }
  bool is_empty() const noexcept { return count_ == 0; }
  std::vector<std::size_t> members() const;

  void insert(std::size_t k);

  friend CellSet operator|(const CellSet& a, const CellSet& b);
  friend CellSet operator&(const CellSet& a, const CellSet& b);
  friend CellSet operator-(const CellSet& a, const CellSet& b);
  friend bool operator==(const CellSet& a, const CellSet& b) {
    return a.space_ == b.space_ && a.mask_ == b.mask_;
  }

 private:
  explicit CellSet(DiscreteSpace space);

  DiscreteSpace space_;
  std::vector<bool> mask_;
  std::size_t count_ = 0;
};

class CellFunction {
 public:
  CellFunction(DiscreteSpace space, std::vector<Complex> values);

  static CellFunction constant(DiscreteSpace space, Complex c);
  static CellFunction indicator(const CellSet& s);
  /// Samples `fn` at the cell midpoints (k + 1/2) / N.
  static CellFunction sampled(DiscreteSpace space,
                              const std::function<Complex(double)>& fn);
  /// scale * exp(2 pi i k x)
  static CellFunction fourier_mode(DiscreteSpace space, int k, Complex scale);
  /// sum_j coeffs[j] x^j
  static CellFunction polynomial(DiscreteSpace space,
                                 std::span<const Complex> coeffs);
  /// values[j] on the j-th piece between consecutive cut points; the cuts are
  /// interior points of (0,1) in increasing order.
  static CellFunction step(DiscreteSpace space, std::span<const double> cuts,
                           std::span<const Complex> values);

  const DiscreteSpace& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return values_.size(); }
  Complex operator[](std::size_t k) const { return values_[k]; }
  std::span<const Complex> values() const noexcept { return values_; }

  friend bool operator==(const CellFunction&, const CellFunction&) = default;

 private:
  DiscreteSpace space_;
  std::vector<Complex> values_;
};

Measure measure(const CellSet& s);
double to_double(Measure m);

/// (1/N) sum_{k in S} f(k)
Complex integrate(const CellFunction& f, const CellSet& s);

/// (1/N) sum_{k in S} log|f(k)|, or -inf when some cell of S is zero
/// (relative to kZeroTolerance * ess_sup_abs(f)).
double log_abs_integral(const CellFunction& f, const CellSet& s);

double ess_sup_abs(const CellFunction& f);

bool is_zero_cell(const CellFunction& f, std::size_t k, double sup);

/// x -> f(g^{-1} x) on range(g), zero elsewhere.
CellFunction compose_with_inverse(const CellFunction& f,
                                  const PartialInjection& g);

CellFunction mul(const CellFunction& f, const CellFunction& h);
/// Throws naming the first zero cell of `h`.
CellFunction div(const CellFunction& f, const CellFunction& h);
CellFunction abs2(const CellFunction& f);
CellFunction scale(Complex c, const CellFunction& f);
CellFunction add(const CellFunction& f, const CellFunction& h);
CellFunction conj(const CellFunction& f);

}  // namespace fkdet
