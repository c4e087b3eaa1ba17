#include "fkdet/measured_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fkdet/error.hpp"
#include "fkdet/numeric.hpp"
#include "fkdet/partial_isos.hpp"

namespace fkdet {

namespace {

// Position of a cut point in cells; cuts must sit on cell boundaries.
std::size_t boundary_index(const DiscreteSpace& space, double t) {
  const double scaled = t * static_cast<double>(space.size());
  const double nearest = std::round(scaled);
  if (!(t >= 0.0 && t <= 1.0) || std::abs(scaled - nearest) > 1e-9) {
    std::ostringstream msg;
    msg << "point " << t << " is not a multiple of 1/" << space.size();
    fail(msg.str());
  }
  return static_cast<std::size_t>(nearest);
}

}  // namespace

DiscreteSpace::DiscreteSpace(std::size_t cells) : cells_(cells) {
  if (cells == 0) fail("a discrete space needs at least one cell");
  if (cells > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
    fail("too many cells");
}

void require_same_space(const DiscreteSpace& a, const DiscreteSpace& b,
                        const char* where) {
  if (a != b) {
    std::ostringstream msg;
    msg << where << ": space mismatch (" << a.size() << " vs " << b.size()
        << " cells)";
    fail(msg.str());
  }
}

// ---------------------------------------------------------------------------
// CellSet

CellSet::CellSet(DiscreteSpace space)
    : space_(space), mask_(space.size(), false) {}

CellSet CellSet::empty(DiscreteSpace space) { return CellSet(space); }

CellSet CellSet::full(DiscreteSpace space) {
  CellSet s(space);
  s.mask_.assign(space.size(), true);
  s.count_ = space.size();
  return s;
}

CellSet CellSet::of(DiscreteSpace space, std::span<const std::size_t> cells) {
  CellSet s(space);
  for (std::size_t k : cells) s.insert(k);
  return s;
}

CellSet CellSet::interval(DiscreteSpace space, double lo, double hi) {
  const std::size_t a = boundary_index(space, lo);
  const std::size_t b = boundary_index(space, hi);
  if (a > b) fail("interval endpoints out of order");
  CellSet s(space);
  for (std::size_t k = a; k < b; ++k) s.insert(k);
  return s;
}

void CellSet::insert(std::size_t k) {
  if (k >= mask_.size()) {
    std::ostringstream msg;
    msg << "cell index " << k << " out of range for " << mask_.size()
        << " cells";
    fail(msg.str());
  }
  if (!mask_[k]) {
    mask_[k] = true;
    ++count_;
  }
}

std::vector<std::size_t> CellSet::members() const {
  std::vector<std::size_t> out;
  out.reserve(count_);
  for (std::size_t k = 0; k < mask_.size(); ++k)
    if (mask_[k]) out.push_back(k);
  return out;
}

CellSet operator|(const CellSet& a, const CellSet& b) {
  require_same_space(a.space_, b.space_, "union");
  CellSet out(a.space_);
  for (std::size_t k = 0; k < a.mask_.size(); ++k)
    if (a.mask_[k] || b.mask_[k]) out.insert(k);
  return out;
}

CellSet operator&(const CellSet& a, const CellSet& b) {
  require_same_space(a.space_, b.space_, "intersection");
  CellSet out(a.space_);
  for (std::size_t k = 0; k < a.mask_.size(); ++k)
    if (a.mask_[k] && b.mask_[k]) out.insert(k);
  return out;
}

CellSet operator-(const CellSet& a, const CellSet& b) {
  require_same_space(a.space_, b.space_, "difference");
  CellSet out(a.space_);
  for (std::size_t k = 0; k < a.mask_.size(); ++k)
    if (a.mask_[k] && !b.mask_[k]) out.insert(k);
  return out;
}

// ---------------------------------------------------------------------------
// CellFunction

CellFunction::CellFunction(DiscreteSpace space, std::vector<Complex> values)
    : space_(space), values_(std::move(values)) {
  if (values_.size() != space_.size()) {
    std::ostringstream msg;
    msg << "function table has " << values_.size() << " values, expected "
        << space_.size();
    fail(msg.str());
  }
  for (const Complex& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail("function values must be finite");
}

CellFunction CellFunction::constant(DiscreteSpace space, Complex c) {
  return CellFunction(space, std::vector<Complex>(space.size(), c));
}

CellFunction CellFunction::indicator(const CellSet& s) {
  std::vector<Complex> v(s.space().size(), 0.0);
  for (std::size_t k = 0; k < v.size(); ++k)
    if (s.contains(k)) v[k] = 1.0;
  return CellFunction(s.space(), std::move(v));
}

CellFunction CellFunction::sampled(DiscreteSpace space,
                                   const std::function<Complex(double)>& fn) {
  std::vector<Complex> v(space.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(space.midpoint(k));
  return CellFunction(space, std::move(v));
}

CellFunction CellFunction::fourier_mode(DiscreteSpace space, int k,
                                        Complex scale) {
  return sampled(space, [k, scale](double x) {
    return scale * std::polar(1.0, 2.0 * std::numbers::pi * k * x);
  });
}

CellFunction CellFunction::polynomial(DiscreteSpace space,
                                      std::span<const Complex> coeffs) {
  std::vector<Complex> c(coeffs.begin(), coeffs.end());
  return sampled(space, [c](double x) {
    Complex acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  });
}

CellFunction CellFunction::step(DiscreteSpace space,
                                std::span<const double> cuts,
                                std::span<const Complex> values) {
  if (values.size() != cuts.size() + 1)
    fail("step function needs one more value than cut points");
  if (!std::is_sorted(cuts.begin(), cuts.end()))
    fail("step function cut points must be increasing");
  std::vector<double> c(cuts.begin(), cuts.end());
  std::vector<Complex> v(values.begin(), values.end());
  return sampled(space, [c, v](double x) {
    const auto piece = std::upper_bound(c.begin(), c.end(), x) - c.begin();
    return v[static_cast<std::size_t>(piece)];
  });
}

// ---------------------------------------------------------------------------
// Measures and integrals

Measure measure(const CellSet& s) {
  return Measure(static_cast<std::int64_t>(s.count()),
                 static_cast<std::int64_t>(s.space().size()));
}

double to_double(Measure m) {
  return static_cast<double>(m.numerator()) /
         static_cast<double>(m.denominator());
}

Complex integrate(const CellFunction& f, const CellSet& s) {
  require_same_space(f.space(), s.space(), "integrate");
  CompensatedComplexSum sum;
  for (std::size_t k = 0; k < f.size(); ++k)
    if (s.contains(k)) sum.add(f[k]);
  return sum.value() / static_cast<double>(f.size());
}

double ess_sup_abs(const CellFunction& f) {
  double sup = 0.0;
  for (const Complex& v : f.values()) sup = std::max(sup, std::abs(v));
  return sup;
}

bool is_zero_cell(const CellFunction& f, std::size_t k, double sup) {
  const double a = std::abs(f[k]);
  return a == 0.0 || a < kZeroTolerance * sup;
}

double log_abs_integral(const CellFunction& f, const CellSet& s) {
  require_same_space(f.space(), s.space(), "log_abs_integral");
  const double sup = ess_sup_abs(f);
  CompensatedSum sum;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!s.contains(k)) continue;
    if (is_zero_cell(f, k, sup)) return -std::numeric_limits<double>::infinity();
    sum.add(std::log(std::abs(f[k])));
  }
  return sum.value() / static_cast<double>(f.size());
}

CellFunction compose_with_inverse(const CellFunction& f,
                                  const PartialInjection& g) {
  require_same_space(f.space(), g.space(), "compose_with_inverse");
  std::vector<Complex> out(f.size(), 0.0);
  for (std::size_t y = 0; y < f.size(); ++y)
    if (g.defined_at(y)) out[g(y)] = f[y];
  return CellFunction(f.space(), std::move(out));
}

CellFunction mul(const CellFunction& f, const CellFunction& h) {
  require_same_space(f.space(), h.space(), "mul");
  std::vector<Complex> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k] * h[k];
  return CellFunction(f.space(), std::move(out));
}

CellFunction div(const CellFunction& f, const CellFunction& h) {
  require_same_space(f.space(), h.space(), "div");
  std::vector<Complex> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (h[k] == Complex(0.0)) {
      std::ostringstream msg;
      msg << "division by zero at cell " << k;
      fail(msg.str());
    }
    out[k] = f[k] / h[k];
  }
  return CellFunction(f.space(), std::move(out));
}

CellFunction abs2(const CellFunction& f) {
  std::vector<Complex> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = std::norm(f[k]);
  return CellFunction(f.space(), std::move(out));
}

CellFunction scale(Complex c, const CellFunction& f) {
  std::vector<Complex> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = c * f[k];
  return CellFunction(f.space(), std::move(out));
}

CellFunction add(const CellFunction& f, const CellFunction& h) {
  require_same_space(f.space(), h.space(), "add");
  std::vector<Complex> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k] + h[k];
  return CellFunction(f.space(), std::move(out));
}

CellFunction conj(const CellFunction& f) {
  std::vector<Complex> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = std::conj(f[k]);
  return CellFunction(f.space(), std::move(out));
}

}  // namespace fkdet
