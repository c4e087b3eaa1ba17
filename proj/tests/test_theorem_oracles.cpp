#include <doctest.h>

#include <random>

#include "fkdet/error.hpp"
#include "fkdet/theorem_oracles.hpp"
#include "oracles.hpp"

using namespace fkdet;
using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

namespace {

OperatorExpr half_swap(Complex f1, Complex f2) {
  const DiscreteSpace s(4);
  GeneratorFamily fam(s);
  fam.add("g1", make_table(s, Pairs{{0, 2}, {1, 3}}));
  fam.add("g2", make_table(s, Pairs{{2, 0}, {3, 1}}));
  return OperatorExpr(fam, {{CellFunction::constant(s, f1), "g1"},
                            {CellFunction::constant(s, f2), "g2"}});
}

}  // namespace

TEST_CASE("disjoint-range example: Delta = 4") {
  const OperatorExpr t = half_swap(2.0, 8.0);
  const auto rep = check_thm_r2(t);
  CHECK(rep.overall);
  CHECK(rep.condition("s1_domains_cover")->exact == Measure(1));
  CHECK(rep.condition("s2_ranges_disjoint")->exact == Measure(0));
  CHECK(closed_form_r2(t) == doctest::Approx(std::log(4.0)));
  // |det T| = 2*2*8*8
  CHECK(std::exp(oracle::log_fk_leibniz(oracle::from_dense(assemble(t)))) == doctest::Approx(4.0));
  const auto st = mult_op_structure_check(t);
  CHECK(st.ok);
  CHECK(st.h == std::vector<double>{4, 4, 64, 64});
}

TEST_CASE("disjoint-range: failing hypotheses are reported, not thrown") {
  const DiscreteSpace s(4);
  GeneratorFamily fam(s);
  fam.add("g1", make_table(s, Pairs{{0, 2}, {1, 3}}));
  fam.add("g2", make_table(s, Pairs{{2, 2}}));
  const OperatorExpr t(fam, {{CellFunction::constant(s, 1.0), "g1"},
                             {CellFunction::constant(s, 1.0), "g2"}});
  const auto rep = check_thm_r2(t);
  CHECK_FALSE(rep.overall);
  CHECK_FALSE(rep.condition("s1_domains_cover")->satisfied);
  CHECK_FALSE(rep.condition("s2_ranges_disjoint")->satisfied);
  CHECK(rep.condition("s1_domains_cover")->exact == Measure(3, 4));
  CHECK(rep.diagnostic("variant") != nullptr);
  CHECK_FALSE(mult_op_structure_check(t).ok);
}

TEST_CASE("dominant term hypotheses") {
  const DiscreteSpace s(16);
  GeneratorFamily fam(s);
  fam.add("g0", make_rotation(s, 1));
  fam.add("g1", restrict(make_rotation(s, 5), CellSet::interval(s, 0, 0.5)));
  const OperatorExpr t(fam, {{CellFunction::constant(s, 2.0), "g0"},
                             {CellFunction::constant(s, 0.5), "g1"}});
  const auto rep = check_thm_r1(t, 0);
  CHECK(rep.overall);
  CHECK(rep.condition("contraction_sum")->measured == doctest::Approx(0.25));
  CHECK(closed_form_r1(t, 0) == doctest::Approx(std::log(2.0)));
  // T = M_f0 L_g0 (I + Phi)
  CHECK(max_abs_diff(factorization_rhs(t, 0), assemble(t)) < 1e-12);
  const auto bad = check_thm_r1(t, 1);
  CHECK_FALSE(bad.overall);
  CHECK_FALSE(bad.condition("g_i0_full_bijection")->satisfied);
}

TEST_CASE("error bound formula") {
  CHECK(dominant_term_error_bound(0.5, 4) == doctest::Approx(2 * 0.0625 / (4 * 0.5)));
}

TEST_CASE("trace profile of a weighted rotation") {
  std::mt19937_64 rng(9);
  for (std::size_t n : {8u, 16u}) {
    const DiscreteSpace s(n);
    GeneratorFamily fam(s);
    fam.add("r", make_rotation(s, 1));
    const OperatorExpr phi(fam, {{CellFunction(s, oracle::random_values(n, rng)), "r"}});
    const TraceProfile p = trace_vanishing_profile(phi, std::min<unsigned>(n + 2, 20));
    CHECK(p.paths_agree);
    REQUIRE(p.first_nonzero.has_value());
    CHECK(*p.first_nonzero == n);
    for (const auto& smp : p.samples)
      if (smp.n < n) {
        CHECK(smp.tau_matrix == Complex(0.0));
        CHECK(smp.tau_normal_form == Complex(0.0));
      }
  }
}

TEST_CASE("cycle closed form against brute force") {
  for (std::size_t n = 1; n <= 8; ++n) {
    const DiscreteSpace s(n);
    GeneratorFamily fam(s);
    fam.add("r", make_rotation(s, 1));
    const OperatorExpr phi(fam, {{CellFunction::constant(s, 0.5), "r"}});
    const auto closed = cycle_log_det(phi, 1.0);
    REQUIRE(closed.has_value());
    const double brute = oracle::log_fk_leibniz(oracle::from_dense(shift(1.0, assemble(phi))));
    CHECK(*closed == doctest::Approx(brute).epsilon(1e-12));
    CHECK(*closed == doctest::Approx(std::log1p(-std::pow(0.5, n)) / n).epsilon(1e-14));
  }
}

TEST_CASE("deninger report") {
  const DiscreteSpace s(32);
  GeneratorFamily fam(s);
  fam.add("r", make_rotation(s, 1));
  const OperatorExpr phi(fam, {{CellFunction::constant(s, 0.5), "r"}});
  const auto d = deninger_check(phi, Complex(0.0, 2.0), 6);
  CHECK(d.radius_hypothesis);
  CHECK(d.spectral_radius_bound == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(d.log_abs_z == doctest::Approx(std::log(2.0)));
  CHECK(d.deviation < 1e-12);
  REQUIRE(d.finite_deviation.has_value());
}

TEST_CASE("compare handles infinities") {
  CHECK(compare(-INFINITY, -INFINITY, 4).abs_error == 0.0);
  CHECK(std::isinf(compare(-INFINITY, 1.0, 4).abs_error));
  CHECK(compare(1.0, 1.5, 4).abs_error == 0.5);
}

TEST_CASE("sweep results are ordered and thread-independent") {
  auto make = [](std::size_t n) {
    const DiscreteSpace s(n);
    GeneratorFamily fam(s);
    fam.add("g1", restrict(make_rotation(s, static_cast<std::int64_t>(n / 2)), CellSet::interval(s, 0, 0.5)));
    fam.add("g2", restrict(make_rotation(s, static_cast<std::int64_t>(n / 2)), CellSet::interval(s, 0.5, 1)));
    return OperatorExpr(fam, {{CellFunction::constant(s, 3.0), "g1"},
                              {CellFunction::constant(s, 0.5), "g2"}});
  };
  const std::vector<std::size_t> ns{16, 4, 8};
  const TheoremTask task{Theorem::DisjointRanges};
  const auto a = convergence_sweep(make, task, ns, 1);
  const auto b = convergence_sweep(make, task, ns, 3);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].n == ns[i]);
    CHECK(a[i].numeric == b[i].numeric);
    CHECK(a[i].abs_error < 1e-12);
  }
}
