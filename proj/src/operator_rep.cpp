#include "fkdet/operator_rep.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fkdet/error.hpp"
#include "fkdet/numeric.hpp"

namespace fkdet {

namespace {

void require_same_size(const DenseOperator& a, const DenseOperator& b,
                       const char* where) {
  if (a.size() != b.size()) {
    std::ostringstream msg;
    msg << where << ": dimension mismatch (" << a.size() << " vs " << b.size()
        << ")";
    fail(msg.str());
  }
}

}  // namespace

DenseOperator DenseOperator::identity(std::size_t n) {
  DenseOperator out(n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseOperator matrix_of_translation(const PartialInjection& g) {
  DenseOperator out(g.space().size());
  for (std::size_t y = 0; y < out.size(); ++y)
    if (g.defined_at(y)) out(g(y), y) = 1.0;
  return out;
}

DenseOperator matrix_of_mult(const CellFunction& f) {
  DenseOperator out(f.size());
  for (std::size_t x = 0; x < out.size(); ++x) out(x, x) = f[x];
  return out;
}

DenseOperator adjoint(const DenseOperator& a) {
  const std::size_t n = a.size();
  DenseOperator out(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) out(j, i) = std::conj(a(i, j));
  return out;
}

DenseOperator matmul(const DenseOperator& a, const DenseOperator& b) {
  require_same_size(a, b, "matmul");
  const std::size_t n = a.size();
  DenseOperator out(n);
  const Complex* pa = a.data().data();
  for (std::size_t j = 0; j < n; ++j) {
    Complex* col = &out(0, j);
    for (std::size_t k = 0; k < n; ++k) {
      const Complex bkj = b(k, j);
      if (bkj == Complex(0.0)) continue;
      const Complex* ak = pa + k * n;
      const double br = bkj.real();
      const double bi = bkj.imag();
      for (std::size_t i = 0; i < n; ++i) {
        const double ar = ak[i].real();
        const double ai = ak[i].imag();
        col[i] += Complex(ar * br - ai * bi, ar * bi + ai * br);
      }
    }
  }
  return out;
}

DenseOperator add(const DenseOperator& a, const DenseOperator& b) {
  require_same_size(a, b, "add");
  DenseOperator out = a;
  auto o = out.data();
  auto d = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += d[i];
  return out;
}

DenseOperator subtract(const DenseOperator& a, const DenseOperator& b) {
  require_same_size(a, b, "subtract");
  DenseOperator out = a;
  auto o = out.data();
  auto d = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= d[i];
  return out;
}

DenseOperator scale(Complex lambda, const DenseOperator& a) {
  DenseOperator out = a;
  for (Complex& v : out.data()) v *= lambda;
  return out;
}

DenseOperator shift(Complex z, const DenseOperator& a) {
  DenseOperator out = scale(-1.0, a);
  for (std::size_t i = 0; i < out.size(); ++i) out(i, i) += z;
  return out;
}

DenseOperator power(const DenseOperator& a, unsigned n) {
  DenseOperator out = DenseOperator::identity(a.size());
  for (unsigned k = 0; k < n; ++k) out = matmul(out, a);
  return out;
}

Complex trace(const DenseOperator& a) {
  CompensatedComplexSum sum;
  for (std::size_t i = 0; i < a.size(); ++i) sum.add(a(i, i));
  return sum.value() / static_cast<double>(a.size());
}

double max_abs_entry(const DenseOperator& a) {
  double m = 0.0;
  for (const Complex& v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const DenseOperator& a, const DenseOperator& b) {
  require_same_size(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double frobenius_norm(const DenseOperator& a) {
  CompensatedSum sum;
  for (const Complex& v : a.data()) sum.add(std::norm(v));
  return std::sqrt(sum.value());
}

void dump_matrix(const DenseOperator& a, std::ostream& out) {
  std::ostringstream line;
  line << std::setprecision(17);
  for (const Complex& v : a.data()) line << v.real() << ' ' << v.imag() << '\n';
  out << line.str();
}

// ---------------------------------------------------------------------------
// Expressions

OperatorExpr::OperatorExpr(GeneratorFamily family, std::vector<Term> terms)
    : family_(std::move(family)), terms_(std::move(terms)) {
  for (const Term& term : terms_) {
    require_same_space(family_.space(), term.f.space(), "operator term");
    family_.find(term.generator);
  }
}

DenseOperator assemble(const OperatorExpr& t) {
  DenseOperator out(t.space().size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const CellFunction& f = t.terms()[i].f;
    const PartialInjection& g = t.generator(i);
    for (std::size_t y = 0; y < out.size(); ++y)
      if (g.defined_at(y)) out(g(y), y) += f[g(y)];
  }
  return out;
}

DenseOperator materialize(const GeneratorFamily& family, const NormalTerm& t) {
  const PartialInjection w = evaluate_word(family, t.w);
  require_same_space(w.space(), t.h.space(), "materialize");
  DenseOperator out(w.space().size());
  for (std::size_t y = 0; y < out.size(); ++y)
    if (w.defined_at(y)) out(w(y), y) = t.h[w(y)];
  return out;
}

Complex trace_of_term(const GeneratorFamily& family, const NormalTerm& t) {
  return integrate(t.h, fixed_point_set(evaluate_word(family, t.w)));
}

std::size_t normal_term_count(const OperatorExpr& t, unsigned n,
                              std::size_t cap) {
  std::size_t count = 1;
  for (unsigned i = 0; i < n; ++i) {
    if (t.size() != 0 && count > cap / t.size()) return cap + 1;
    count *= t.size();
  }
  return std::min(count, cap + 1);
}

void for_each_normal_term(
    const OperatorExpr& t, unsigned n,
    const std::function<void(const CellFunction&, const PartialInjection&,
                             const Word&)>& visit,
    std::size_t cap) {
  if (n == 0) fail("normal-form powers need n >= 1");
  if (normal_term_count(t, n, cap) > cap) {
    std::ostringstream msg;
    msg << "T^" << n << " has more than " << cap << " normal terms";
    fail_resource(msg.str());
  }
  if (t.size() == 0) return;

  // Depth-first over index sequences (i_1, ..., i_n). At depth d the prefix
  // word is w = g_{i_1} ... g_{i_d} and the accumulated coefficient is
  // h = f_{i_1} * f_{i_2}(w_1^{-1}) * ... * f_{i_d}(w_{d-1}^{-1}).
  struct Frame {
    CellFunction h;
    PartialInjection w;
  };
  std::vector<Frame> stack;
  stack.reserve(n + 1);
  stack.push_back({CellFunction::constant(t.space(), 1.0),
                   PartialInjection::identity(t.space())});
  Word word;

  std::function<void()> descend = [&]() {
    const std::size_t depth = stack.size() - 1;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& term = t.terms()[i];
      const Frame& top = stack[depth];
      Frame next{mul(top.h, compose_with_inverse(term.f, top.w)),
                 compose(top.w, t.generator(i))};
      word.letters.push_back({term.generator, 1});
      if (word.length() == n) {
        visit(next.h, next.w, word);
      } else {
        stack.push_back(std::move(next));
        descend();
        stack.pop_back();
      }
      word.letters.pop_back();
    }
  };
  descend();
}

std::vector<NormalTerm> normal_form_power(const OperatorExpr& t, unsigned n,
                                          std::size_t cap) {
  std::vector<NormalTerm> out;
  for_each_normal_term(
      t, n,
      [&](const CellFunction& h, const PartialInjection&, const Word& w) {
        out.push_back({h, w});
      },
      cap);
  return out;
}

double op_norm_upper_bound(const OperatorExpr& t) {
  double bound = 0.0;
  for (const auto& term : t.terms()) bound += ess_sup_abs(term.f);
  return bound;
}

}  // namespace fkdet
