#include <catch2/catch_amalgamated.hpp>

#include <cstdint>

#include "morstone/balg.hpp"

using namespace morstone;
using namespace morstone::balg;

namespace {

BoolPresentation free_pres(int n) {
  BoolPresentation p;
  for (int i = 0; i < n; ++i) p.gens.push_back(i);
  return p;
}

// Deterministic generator for random valid presentations and functions.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  int below(int n) { return static_cast<int>(next() % n); }
};

BoolPresentation random_pres(Rng& rng, int max_gens) {
  BoolPresentation p = free_pres(2 + rng.below(max_gens - 1));
  const int n = static_cast<int>(p.gens.size());
  const int attempts = rng.below(2 * n + 1);
  for (int t = 0; t < attempts; ++t) {
    int x = rng.below(n), y = rng.below(n);
    if (x == y) continue;
    const int kind = rng.below(3);
    BoolPresentation trial = p;
    if (kind == 2)
      trial.dis.insert({std::min(x, y), std::max(x, y)});
    else
      trial.leq.insert(kind == 0 ? std::pair{x, y} : std::pair{y, x});
    try {
      trial.close_order();
      trial.validate();
    } catch (const std::invalid_argument&) {
      continue;  // whatever it conflicted with stays
    }
    p = std::move(trial);
  }
  return p;
}

SimpleFunction random_function(Rng& rng, const BoolPresentation& p) {
  SimpleFunction f;
  const int terms = 1 + rng.below(static_cast<int>(p.gens.size()));
  for (int t = 0; t < terms; ++t) {
    const int num = rng.below(17) - 8;
    const int den = 1 + rng.below(8);
    f.push_back({Rational(num == 0 ? 1 : num, den),
                 p.gens[rng.below(static_cast<int>(p.gens.size()))]});
  }
  return f;
}

}  // namespace

TEST_CASE("free presentations have a full cube of points", "[balg]") {
  const auto pts = stone_points(free_pres(2));
  CHECK(pts.size() == 4);
}

TEST_CASE("a disjointness pair excludes exactly the doubleton", "[balg]") {
  BoolPresentation p = free_pres(2);
  p.dis.insert({0, 1});
  const auto pts = stone_points(p);
  REQUIRE(pts.size() == 3);
  for (const auto& a : pts) CHECK(!(a[0] && a[1]));
}

TEST_CASE("an order pair excludes exactly the dropping assignment", "[balg]") {
  BoolPresentation p = free_pres(2);
  p.leq.insert({0, 1});
  const auto pts = stone_points(p);
  REQUIRE(pts.size() == 3);
  for (const auto& a : pts) CHECK(!(a[0] == 1 && a[1] == 0));
}

TEST_CASE("backends enumerate identical point sets", "[balg]") {
  Rng rng(41);
  for (int round = 0; round < 120; ++round) {
    const BoolPresentation p = random_pres(rng, 9);
    const auto a = stone_points(p, Backend::Enumeration);
    const auto b = stone_points(p, Backend::Propagation);
    REQUIRE(a == b);
  }
}

TEST_CASE("backends still agree at sixteen generators", "[balg]") {
  Rng rng(321);
  for (int round = 0; round < 8; ++round) {
    BoolPresentation p = free_pres(16);
    for (int t = 0; t < 20; ++t) {
      const int x = rng.below(16), y = rng.below(16);
      if (x == y) continue;
      BoolPresentation trial = p;
      const int kind = rng.below(3);
      if (kind == 2)
        trial.dis.insert({std::min(x, y), std::max(x, y)});
      else
        trial.leq.insert(kind == 0 ? std::pair{x, y} : std::pair{y, x});
      try {
        trial.close_order();
        trial.validate();
      } catch (const std::invalid_argument&) {
        continue;
      }
      p = std::move(trial);
    }
    REQUIRE(stone_points(p, Backend::Enumeration) ==
            stone_points(p, Backend::Propagation));
  }
}

TEST_CASE("stone_points respects the budget", "[balg]") {
  CHECK_THROWS_AS(stone_points(free_pres(25), Backend::Enumeration, 20),
                  TooLargeError);
}

TEST_CASE("scoped norms answer relative to the whole presentation", "[balg]") {
  // generator 0 is forced to zero by relations entirely outside the scope
  BoolPresentation p = free_pres(3);
  p.leq = {{0, 1}, {0, 2}};
  p.dis = {{1, 2}};
  const SimpleFunction f{{Rational(1), 0}};
  CHECK(norm_simple(p, f, Backend::Propagation) == Rational(0));
  // the induced presentation on {0} alone would have said 1
  CHECK(norm_simple(free_pres(1), f, Backend::Propagation) == Rational(1));
}

TEST_CASE("adding a relation never adds points", "[balg]") {
  Rng rng(99);
  for (int round = 0; round < 60; ++round) {
    BoolPresentation p = random_pres(rng, 8);
    const auto before = stone_points(p);
    BoolPresentation q = p;
    const int n = static_cast<int>(p.gens.size());
    const int x = rng.below(n), y = rng.below(n);
    if (x == y) continue;
    q.dis.insert({std::min(x, y), std::max(x, y)});
    try {
      q.validate();
    } catch (const std::invalid_argument&) {
      continue;
    }
    const auto after = stone_points(q);
    CHECK(after.size() <= before.size());
    for (const auto& a : after)
      CHECK(std::find(before.begin(), before.end(), a) != before.end());
  }
}

TEST_CASE("element algebra satisfies boolean laws", "[balg]") {
  BoolPresentation p = free_pres(3);
  p.leq.insert({0, 1});
  p.dis.insert({1, 2});
  const ElementAlgebra alg(p);
  const auto g0 = alg.generator(0), g1 = alg.generator(1),
             g2 = alg.generator(2);
  CHECK(alg.complement(alg.complement(g0)) == g0);
  CHECK(alg.leq(g0, g1));
  CHECK(alg.disjoint(g1, g2));
  CHECK_FALSE(alg.disjoint(g0, g1));
  CHECK(alg.is_zero(alg.meet(g1, g2)));
  CHECK(alg.is_one(alg.join(g0, alg.complement(g0))));
  // De Morgan on the generators
  CHECK(alg.complement(alg.join(g0, g2)) ==
        alg.meet(alg.complement(g0), alg.complement(g2)));
}

TEST_CASE("free generators are nonzero", "[balg]") {
  CHECK(generator_nonzero(free_pres(3), 1));
}

TEST_CASE("a generator below both ends of a disjoint pair is zero", "[balg]") {
  BoolPresentation p = free_pres(3);
  p.leq.insert({0, 1});
  p.leq.insert({0, 2});
  p.dis.insert({1, 2});
  CHECK_FALSE(generator_nonzero(p, 0));
  CHECK(generator_nonzero(p, 1));
  // enumeration agrees: no point raises generator 0
  for (const auto& a : stone_points(p)) CHECK(a[0] == 0);
}

TEST_CASE("norms of chains count their length", "[balg]") {
  for (int k = 0; k <= 9; ++k) {
    BoolPresentation p = free_pres(k + 1);
    for (int i = 0; i <= k; ++i)
      for (int j = i + 1; j <= k; ++j) p.leq.insert({i, j});
    SimpleFunction f;
    for (int i = 0; i <= k; ++i) f.push_back({Rational(1), i});
    CHECK(norm_simple(p, f, Backend::Propagation) == Rational(k + 1));
    CHECK(norm_simple(p, f, Backend::Enumeration) == Rational(k + 1));
  }
}

TEST_CASE("norms of antichains stay at one", "[balg]") {
  for (int k = 0; k <= 9; ++k) {
    BoolPresentation p = free_pres(k + 1);
    for (int i = 0; i <= k; ++i)
      for (int j = i + 1; j <= k; ++j) p.dis.insert({i, j});
    SimpleFunction f;
    for (int i = 0; i <= k; ++i) f.push_back({Rational(1), i});
    CHECK(norm_simple(p, f, Backend::Propagation) == Rational(1));
    CHECK(norm_simple(p, f, Backend::Enumeration) == Rational(1));
  }
}

TEST_CASE("empty functions have norm zero", "[balg]") {
  CHECK(norm_simple(free_pres(2), {}) == Rational(0));
}

TEST_CASE("signs across a disjoint pair cancel to one", "[balg]") {
  BoolPresentation p = free_pres(2);
  p.dis.insert({0, 1});
  const SimpleFunction f{{Rational(1), 0}, {Rational(-1), 1}};
  CHECK(norm_simple(p, f, Backend::Enumeration) == Rational(1));
  CHECK(norm_simple(p, f, Backend::Propagation) == Rational(1));
}

TEST_CASE("norm backends agree on random instances", "[balg]") {
  Rng rng(2024);
  for (int round = 0; round < 150; ++round) {
    const BoolPresentation p = random_pres(rng, 10);
    const SimpleFunction f = random_function(rng, p);
    CHECK(norm_simple(p, f, Backend::Enumeration) ==
          norm_simple(p, f, Backend::Propagation));
  }
}

TEST_CASE("norm scales with the coefficients", "[balg]") {
  Rng rng(7);
  for (int round = 0; round < 40; ++round) {
    const BoolPresentation p = random_pres(rng, 8);
    const SimpleFunction f = random_function(rng, p);
    const Rational lambda(3, 2);
    SimpleFunction g = f;
    for (auto& t : g) t.coef *= lambda;
    CHECK(norm_simple(p, g) == lambda * norm_simple(p, f));
  }
}

TEST_CASE("norm satisfies the triangle inequality on samples", "[balg]") {
  Rng rng(13);
  for (int round = 0; round < 60; ++round) {
    const BoolPresentation p = random_pres(rng, 8);
    const SimpleFunction f = random_function(rng, p);
    const SimpleFunction g = random_function(rng, p);
    SimpleFunction sum = f;
    sum.insert(sum.end(), g.begin(), g.end());
    CHECK(norm_simple(p, sum) <= norm_simple(p, f) + norm_simple(p, g));
  }
}

TEST_CASE("nice property fails only for covers of the space", "[balg]") {
  BoolPresentation p = free_pres(2);
  const ElementAlgebra alg(p);
  CHECK_FALSE(nice_property(alg, {alg.one()}).has_value());
  const auto w = nice_property(alg, {alg.generator(0)});
  REQUIRE(w.has_value());
  CHECK((*w)[0] == 0);
  // generator and its complement cover everything
  CHECK_FALSE(
      nice_property(alg, {alg.generator(0), alg.complement(alg.generator(0))})
          .has_value());
}

TEST_CASE("nice property agrees with enumeration on random families",
          "[balg]") {
  Rng rng(555);
  for (int round = 0; round < 60; ++round) {
    const BoolPresentation p = random_pres(rng, 7);
    const ElementAlgebra alg(p);
    std::vector<ElementAlgebra::Element> F;
    auto e = alg.generator(p.gens[rng.below(static_cast<int>(p.gens.size()))]);
    if (rng.below(2)) e = alg.complement(e);
    F.push_back(e);
    F.push_back(alg.generator(p.gens[0]));
    auto joined = alg.zero();
    for (const auto& el : F) joined = alg.join(joined, el);
    const auto witness = nice_property(alg, F);
    CHECK(witness.has_value() != alg.is_one(joined));
  }
}

TEST_CASE(
    "generator witnesses zero the family and raise a cover when one exists",
    "[balg]") {
  BoolPresentation p = free_pres(4);
  // generator 3 disjoint from 0, 1, 2
  p.dis = {{0, 3}, {1, 3}, {2, 3}};
  const Assignment w = nice_property_generators(p, {0, 1, 2});
  CHECK(w[0] == 0);
  CHECK(w[1] == 0);
  CHECK(w[2] == 0);
  CHECK(w[3] == 1);  // the covering point is raised
  // without a cover the all-zero assignment witnesses
  const Assignment z = nice_property_generators(free_pres(3), {0, 1});
  CHECK(z == Assignment{0, 0, 0});
}

TEST_CASE("a block of pairwise disjoint generators is a c-algebra", "[balg]") {
  BoolPresentation p = free_pres(3);
  p.dis = {{0, 1}, {0, 2}, {1, 2}};
  p.block = {{0, 0}, {1, 0}, {2, 0}};
  p.uses_blocks = true;
  const CAlgebraReport r = is_c_algebra(p, 3);
  for (const auto& issue : r.issues) INFO(issue.check << ": " << issue.detail);
  CHECK(r.pass());
  CHECK(r.witnesses_zero_family);
  CHECK(r.families_checked == 7);  // all nonempty subsets
}

TEST_CASE("a comparable pair inside a block breaks the antichain check",
          "[balg]") {
  BoolPresentation p = free_pres(2);
  p.leq = {{0, 1}};
  p.block = {{0, 0}, {1, 0}};
  p.uses_blocks = true;
  const CAlgebraReport r = is_c_algebra(p, 2);
  REQUIRE_FALSE(r.pass());
  bool found = false;
  for (const auto& issue : r.issues)
    if (issue.check == "block-antichain") found = true;
  CHECK(found);
}

TEST_CASE("dichotomy check tells chains from antichains", "[balg]") {
  BoolPresentation chain = free_pres(3);
  chain.leq = {{0, 1}, {0, 2}, {1, 2}};
  CHECK(dichotomy_check(chain, {0, 1, 2}, 1));
  CHECK_FALSE(dichotomy_check(chain, {0, 1, 2}, 0));
  BoolPresentation anti = free_pres(3);
  anti.dis = {{0, 1}, {0, 2}, {1, 2}};
  CHECK(dichotomy_check(anti, {0, 1, 2}, 0));
  CHECK_FALSE(dichotomy_check(anti, {0, 1, 2}, 1));
  // singletons satisfy both
  CHECK(dichotomy_check(chain, {1}, 0));
  CHECK(dichotomy_check(chain, {1}, 1));
}

TEST_CASE("scenario bounds reproduce the worked example", "[balg]") {
  const ScenarioReport r = scenario_bounds(3, Rational(2));
  CHECK(r.epsilon_max == Rational(4, 19));
  CHECK(r.sum_bound_ratio == Rational(10, 3));
  CHECK(r.ratio_exceeds_n_star);
  CHECK(r.chain_bound_collapses);
  CHECK_THROWS_AS(scenario_bounds(3, Rational(3)), std::invalid_argument);
  CHECK_THROWS_AS(scenario_bounds(2, Rational(1)), std::invalid_argument);
  CHECK_NOTHROW(make_scenario(3, Rational(2), Rational(1, 5)));
  CHECK_THROWS_AS(make_scenario(3, Rational(2), Rational(4, 19)),
                  std::invalid_argument);
}

TEST_CASE("presentations derived from constructions have nonzero generators",
          "[balg]") {
  const auto prefix = morass::build_prefix(9, morass::SplitRule::Linear);
  const auto run =
      lmodel::run_construction(prefix, {1, 0, 1}, lmodel::Variant::CAlgebra);
  const BoolPresentation p = presentation_from_model(run.levels.back());
  for (int g : p.gens) CHECK(generator_nonzero(p, g));
}
