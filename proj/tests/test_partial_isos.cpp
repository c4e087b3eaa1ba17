#include <doctest.h>

#include <random>

#include "fkdet/error.hpp"
#include "fkdet/partial_isos.hpp"
#include "oracles.hpp"

using namespace fkdet;
using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

TEST_CASE("rotation and table") {
  const DiscreteSpace s(5);
  const auto r = make_rotation(s, -2);
  CHECK(r(0) == 3);
  CHECK(r.is_full_bijection());
  CHECK(make_rotation(s, 7) == make_rotation(s, 2));

  const auto t = make_table(s, Pairs{{0, 4}, {2, 1}});
  CHECK(t.domain_size() == 2);
  CHECK(t.defined_at(2));
  CHECK_FALSE(t.defined_at(1));
  CHECK(measure(t.domain()) == measure(t.range()));

  try {
    (void)make_table(s, Pairs{{0, 1}, {2, 1}});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("not injective") != std::string::npos);
  }
  try {
    (void)make_table(s, Pairs{{0, 1}, {0, 2}});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("not a function") != std::string::npos);
  }
  CHECK_THROWS(make_table(s, Pairs{{0, 5}}));
}

TEST_CASE("interval exchange") {
  const DiscreteSpace s(4);
  const std::vector<double> cuts{0.25, 0.5};
  const std::vector<std::size_t> order{2, 0, 1};
  // pieces {0}, {1}, {2,3}; placed as {2,3}, {0}, {1}
  const auto g = make_interval_exchange(s, cuts, order);
  CHECK(g(2) == 0);
  CHECK(g(3) == 1);
  CHECK(g(0) == 2);
  CHECK(g(1) == 3);
  const std::vector<double> bad{0.3};
  const std::vector<std::size_t> swap{1, 0};
  CHECK_THROWS_AS(make_interval_exchange(s, bad, swap), Error);
}

TEST_CASE("compose, invert, restrict") {
  const DiscreteSpace s(6);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto gt = oracle::random_partial(6, rng() % 7, rng);
    const auto ht = oracle::random_partial(6, rng() % 7, rng);
    const auto g = oracle::as_injection(s, gt), h = oracle::as_injection(s, ht);
    const auto gh = compose(g, h);
    for (std::size_t x = 0; x < 6; ++x) {
      const bool defined = ht[x] >= 0 && gt[static_cast<std::size_t>(ht[x])] >= 0;
      REQUIRE(gh.defined_at(x) == defined);
      if (defined) CHECK(gh(x) == static_cast<std::size_t>(gt[static_cast<std::size_t>(ht[x])]));
    }
    const auto gi = invert(g);
    CHECK(compose(gi, g) == restrict(PartialInjection::identity(s), g.domain()));
    CHECK(invert(gi) == g);
  }
}

TEST_CASE("words") {
  const DiscreteSpace s(8);
  GeneratorFamily fam(s);
  fam.add("a", make_rotation(s, 1));
  fam.add("b", make_rotation(s, 3));
  CHECK_THROWS(fam.add("a", make_rotation(s, 2)));
  CHECK_THROWS(fam.find("zz"));
  const Word w{{{"a", 1}, {"b", -1}}};
  CHECK(to_string(w) == "a*b^-1");
  CHECK(to_string(Word{}) == "e");
  // right to left: b^-1 first, then a
  CHECK(evaluate_word(fam, w) == make_rotation(s, -2));
  const Word cancel{{{"a", 1}, {"b", 1}, {"b", -1}, {"a", -1}, {"b", 1}}};
  CHECK(reduce(cancel) == Word{{{"b", 1}}});
}

TEST_CASE("orbits, saturation, ergodicity") {
  const DiscreteSpace s(8);
  GeneratorFamily fam(s);
  fam.add("r", make_rotation(s, 2));
  const auto o = orbits(fam);
  CHECK(o.classes.size() == 2);
  CHECK(o.representative[5] == 1);
  CHECK_FALSE(is_ergodic_finite(fam));
  const std::vector<std::size_t> one{3};
  const CellSet sat = saturate(fam, CellSet::of(s, one));
  CHECK(sat.count() == 4);
  CHECK(saturate(fam, sat) == sat);

  GeneratorFamily fam2(s);
  fam2.add("r", make_rotation(s, 2));
  fam2.add("t", make_table(s, Pairs{{0, 1}}));
  CHECK(is_ergodic_finite(fam2));
}

TEST_CASE("orbit invariance and saturation idempotence, random families") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + rng() % 13;
    const DiscreteSpace s(n);
    GeneratorFamily fam(s);
    for (int i = 0; i < 3; ++i)
      fam.add("g" + std::to_string(i), oracle::as_injection(s, oracle::random_partial(n, rng() % (n + 1), rng)));
    const auto o = orbits(fam);
    for (const auto& g : fam)
      for (std::size_t x = 0; x < n; ++x)
        if (g.map.defined_at(x)) CHECK(o.representative[x] == o.representative[g.map(x)]);
    CellSet a = CellSet::empty(s);
    for (std::size_t k = 0; k < n; ++k)
      if (rng() % 3 == 0) a.insert(k);
    const CellSet sat = saturate(fam, a);
    CHECK(saturate(fam, sat) == sat);
    CHECK(measure(sat) >= measure(a));
  }
}

TEST_CASE("treeing diagnostics find the girth of a rotation") {
  const DiscreteSpace s(12);
  GeneratorFamily fam(s);
  fam.add("r", make_rotation(s, 3));  // order 4
  const auto d = treeing_diagnostics(fam, 6);
  REQUIRE(d.girth.has_value());
  CHECK(*d.girth == 4);
  CHECK_FALSE(d.truncated);
  CHECK(d.entries.front().fixed_measure == Measure(1));
  CHECK(d.word(fam, 0).length() == 4);

  GeneratorFamily empty_dom(s);
  empty_dom.add("t", make_table(s, Pairs{{0, 1}}));
  const auto e = treeing_diagnostics(empty_dom, 5);
  CHECK_FALSE(e.girth.has_value());
}

TEST_CASE("treeing enumeration respects the word cap") {
  const DiscreteSpace s(64);
  GeneratorFamily fam(s);
  fam.add("a", make_rotation(s, 1));
  fam.add("b", make_rotation(s, 5));
  fam.add("c", make_rotation(s, 11));
  const auto d = treeing_diagnostics(fam, 12, 1000);
  CHECK(d.truncated);
  CHECK(d.entries.size() <= 1000);
  CHECK(d.complete_length < 12);
}
