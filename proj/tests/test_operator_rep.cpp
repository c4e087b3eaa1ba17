#include <doctest.h>

#include <random>
#include <sstream>

#include "fkdet/error.hpp"
#include "fkdet/operator_rep.hpp"
#include "oracles.hpp"

using namespace fkdet;
using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

TEST_CASE("matrices of L_g and M_f") {
  const DiscreteSpace s(4);
  const auto g = make_table(s, Pairs{{0, 2}, {1, 3}});
  const DenseOperator l = matrix_of_translation(g);
  CHECK(l(2, 0) == Complex(1.0));
  CHECK(l(0, 2) == Complex(0.0));
  CHECK(oracle::max_diff(oracle::from_dense(l), oracle::translation({2, 3, -1, -1})) == 0.0);
  const CellFunction f(s, {1.0, 2.0, 3.0, 4.0});
  CHECK(matrix_of_mult(f)(3, 3) == Complex(4.0));
}

TEST_CASE("assemble sums the terms") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    const DiscreteSpace s(n);
    GeneratorFamily fam(s);
    std::vector<OperatorExpr::Term> terms;
    oracle::Matrix want = oracle::zeros(n);
    for (int i = 0; i < 3; ++i) {
      const auto t = oracle::random_partial(n, rng() % (n + 1), rng);
      const auto f = oracle::random_values(n, rng);
      fam.add("g" + std::to_string(i), oracle::as_injection(s, t));
      terms.push_back({CellFunction(s, f), "g" + std::to_string(i)});
      const auto m = oracle::mul(oracle::diag(f), oracle::translation(t));
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) want[r][c] += m[r][c];
    }
    const OperatorExpr expr(fam, terms);
    CHECK(oracle::max_diff(oracle::from_dense(assemble(expr)), want) <= 1e-15);
  }
}

TEST_CASE("normalized trace") {
  const DenseOperator i = DenseOperator::identity(5);
  CHECK(trace(i) == Complex(1.0));
  CHECK(trace(scale(Complex(0, 2), i)) == Complex(0, 2));
}

TEST_CASE("normal form of a product") {
  // T = 2 L_a + 8 L_b on N=4 half swap: T^2 = M_h L_e + zero-domain words.
  const DiscreteSpace s(4);
  GeneratorFamily fam(s);
  fam.add("a", make_table(s, Pairs{{0, 2}, {1, 3}}));
  fam.add("b", make_table(s, Pairs{{2, 0}, {3, 1}}));
  const OperatorExpr t(fam, {{CellFunction::constant(s, 2.0), "a"},
                             {CellFunction::constant(s, 8.0), "b"}});
  const auto terms = normal_form_power(t, 2);
  CHECK(terms.size() == 4);
  DenseOperator sum(4);
  for (const auto& nt : terms) sum = add(sum, materialize(fam, nt));
  CHECK(max_abs_diff(sum, power(assemble(t), 2)) <= 1e-12);
  // h for the words b*a and a*b is 16 on every cell of their domains
  for (const auto& nt : terms) {
    if (nt.w.length() != 2 || nt.w.letters[0].generator == nt.w.letters[1].generator) continue;
    const PartialInjection w = evaluate_word(fam, nt.w);
    REQUIRE(w.domain_size() == 2);
    for (std::size_t x = 0; x < 4; ++x)
      if (w.defined_at(x)) CHECK(std::abs(nt.h[w(x)] - 16.0) < 1e-14);
  }
  CHECK(normal_term_count(t, 3) == 8);
  CHECK(normal_term_count(t, 30, 1000) == 1001);
  CHECK_THROWS_AS(normal_form_power(t, 30, 1000), Error);
}

TEST_CASE("trace of a normal term uses fixed points") {
  const DiscreteSpace s(6);
  GeneratorFamily fam(s);
  fam.add("r", make_rotation(s, 2));
  const CellFunction h(s, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  CHECK(trace_of_term(fam, {h, Word{{{"r", 1}}}}) == Complex(0.0));
  const Word cube{{{"r", 1}, {"r", 1}, {"r", 1}}};
  CHECK(std::abs(trace_of_term(fam, {h, cube}) - Complex(3.5)) < 1e-15);
  CHECK(std::abs(trace(materialize(fam, {h, cube})) - Complex(3.5)) < 1e-15);
}

TEST_CASE("dump format") {
  DenseOperator a(2);
  a(1, 0) = Complex(0.5, -1.0);
  std::ostringstream out;
  dump_matrix(a, out);
  CHECK(out.str() == "0 0\n0.5 -1\n0 0\n0 0\n");
}

TEST_CASE("op_norm_upper_bound") {
  const DiscreteSpace s(3);
  GeneratorFamily fam(s);
  fam.add("r", make_rotation(s, 1));
  const OperatorExpr t(fam, {{CellFunction(s, {1.0, -3.0, 2.0}), "r"},
                             {CellFunction::constant(s, 0.5), "r"}});
  CHECK(op_norm_upper_bound(t) == doctest::Approx(3.5));
}
