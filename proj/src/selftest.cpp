#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "fkdet/error.hpp"
#include "fkdet/scenario.hpp"

namespace fkdet {

namespace {

CellFunction random_function(const DiscreteSpace& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Complex> v(s.size());
  for (auto& x : v) x = {u(rng), u(rng)};
  return CellFunction(s, std::move(v));
}

// Permutation expansion; only used for tiny N.
Complex leibniz_det(const DenseOperator& a) {
  const std::size_t n = a.size();
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  Complex total = 0.0;
  do {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) inversions += p[i] > p[j];
    Complex prod = inversions % 2 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) prod *= a(i, p[i]);
    total += prod;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

struct Check {
  const char* name;
  std::function<std::string()> body;  // empty string on success
};

std::string within(double got, double want, double tol) {
  if (std::isinf(want) && got == want) return {};
  if (std::abs(got - want) <= tol) return {};
  std::ostringstream s;
  s.precision(17);
  s << "got " << got << ", expected " << want << " (tol " << tol << ")";
  return s.str();
}

std::vector<Check> checks() {
  return {
      {"measure_additivity",
       [] {
         const DiscreteSpace s(16);
         std::mt19937_64 rng(1);
         for (int trial = 0; trial < 50; ++trial) {
           CellSet a = CellSet::empty(s), b = CellSet::empty(s);
           for (std::size_t k = 0; k < 16; ++k) {
             if (rng() & 1) a.insert(k);
             if (rng() & 1) b.insert(k);
           }
           if (measure(a | b) + measure(a & b) != measure(a) + measure(b))
             return std::string("additivity violated");
         }
         return std::string();
       }},
      {"commutation",
       [] {
         const DiscreteSpace s(8);
         std::mt19937_64 rng(2);
         const PartialInjection g = restrict(make_rotation(s, 3), CellSet::interval(s, 0, 0.75));
         const CellFunction f = random_function(s, rng);
         const DenseOperator lhs = matmul(matrix_of_translation(g), matrix_of_mult(f));
         const DenseOperator rhs =
             matmul(matrix_of_mult(compose_with_inverse(f, g)), matrix_of_translation(g));
         return within(max_abs_diff(lhs, rhs), 0.0, 1e-12);
       }},
      {"fk_matches_leibniz",
       [] {
         const DiscreteSpace s(6);
         GeneratorFamily fam(s);
         fam.add("a", make_rotation(s, 1));
         const std::vector<double> cuts{0.5};
         const std::vector<std::size_t> order{1, 0};
         fam.add("b", make_interval_exchange(s, cuts, order));
         std::mt19937_64 rng(3);
         const OperatorExpr t(fam, {{random_function(s, rng), "a"}, {random_function(s, rng), "b"}});
         const DenseOperator m = assemble(t);
         const double want = std::log(std::abs(leibniz_det(m))) / 6.0;
         return within(fk_determinant(m).log_det, want, 1e-10);
       }},
      {"disjoint_ranges_example",
       [] {
         // N=4 half swap, f1 = 2, f2 = 8: Delta = 4.
         const DiscreteSpace s(4);
         GeneratorFamily fam(s);
         using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;
         fam.add("g1", make_table(s, Pairs{{0, 2}, {1, 3}}));
         fam.add("g2", make_table(s, Pairs{{2, 0}, {3, 1}}));
         const OperatorExpr t(fam, {{CellFunction::constant(s, 2.0), "g1"},
                                    {CellFunction::constant(s, 8.0), "g2"}});
         if (!check_thm_r2(t).overall) return std::string("hypotheses reported as failing");
         const std::string a = within(closed_form_r2(t), std::log(4.0), 1e-14);
         if (!a.empty()) return "closed form: " + a;
         return within(fk_determinant(assemble(t)).log_det, std::log(4.0), 1e-12);
       }},
      {"multiplication_determinant",
       [] {
         const DiscreteSpace s(4);
         const CellFunction f(s, std::vector<Complex>{1.0, 2.0, 4.0, 8.0});
         return within(fk_determinant(matrix_of_mult(f)).log_det, 1.5 * std::log(2.0), 1e-12);
       }},
      {"zero_cell_gives_minus_inf",
       [] {
         const DiscreteSpace s(4);
         const CellFunction f(s, std::vector<Complex>{1.0, 0.0, 4.0, 8.0});
         const double v = fk_determinant(matrix_of_mult(f)).log_det;
         if (!(std::isinf(v) && v < 0)) return std::string("expected -inf");
         return std::string();
       }},
      {"trace_paths_agree",
       [] {
         const DiscreteSpace s(8);
         GeneratorFamily fam(s);
         fam.add("r", make_rotation(s, 1));
         std::mt19937_64 rng(4);
         const OperatorExpr phi(fam, {{random_function(s, rng), "r"}});
         const TraceProfile p = trace_vanishing_profile(phi, 10);
         if (!p.paths_agree) return std::string("matrix and normal-form traces differ");
         if (!p.first_nonzero || *p.first_nonzero != 8)
           return std::string("first nonzero trace should be at n = 8");
         return std::string();
       }},
      {"deninger_cycle",
       [] {
         const DiscreteSpace s(16);
         GeneratorFamily fam(s);
         fam.add("r", make_rotation(s, 1));
         const OperatorExpr phi(fam, {{CellFunction::constant(s, 0.5), "r"}});
         const DeningerReport d = deninger_check(phi, 1.0, 4);
         const double want = std::log1p(-std::pow(0.5, 16)) / 16.0;
         return within(d.numeric.log_det, want, 1e-12);
       }},
      {"scenario_round_trip",
       [] {
         const char* text = R"({"N": 8,
           "generators": [{"name": "r", "kind": "rotation", "p": 1}],
           "functions": [{"name": "c", "kind": "constant", "value": 2}],
           "operator": [{"function": "c", "generator": "r"}],
           "task": {"kind": "determinant"}})";
         const ScenarioConfig c = parse_scenario(std::string(text));
         if (to_json(parse_scenario(to_json(c))) != to_json(c))
           return std::string("echo does not round-trip");
         return within(run(c).result["log_det"].get<double>(), std::log(2.0), 1e-12);
       }},
  };
}

}  // namespace

SelfTestResult run_selftest() {
  SelfTestResult out;
  for (const auto& c : checks()) {
    std::string detail;
    try {
      detail = c.body();
    } catch (const std::exception& e) {
      detail = std::string("threw: ") + e.what();
    }
    if (detail.empty()) {
      out.lines.push_back(std::string("PASS ") + c.name);
    } else {
      out.lines.push_back(std::string("FAIL ") + c.name + ": " + detail);
      out.passed = false;
    }
  }
  return out;
}

}  // namespace fkdet
