#include <catch2/catch_amalgamated.hpp>

#include "morstone/rational.hpp"

using morstone::Rational;

TEST_CASE("rational normalizes on construction", "[rational]") {
  CHECK(Rational(10, 4) == Rational(5, 2));
  CHECK(Rational(-10, 4) == Rational(-5, 2));
  CHECK(Rational(10, -4) == Rational(-5, 2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(0, -7).den() == 1);
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("rational arithmetic is exact", "[rational]") {
  const Rational a(1, 3), b(4, 19);
  CHECK(a + b == Rational(31, 57));
  CHECK(a - b == Rational(7, 57));
  CHECK(a * b == Rational(4, 57));
  CHECK(a / b == Rational(19, 12));
  CHECK(-a == Rational(-1, 3));
  CHECK((a - a).is_zero());
  CHECK_THROWS_AS(a / Rational(0), std::domain_error);
}

TEST_CASE("rational comparisons avoid overflow-prone shortcuts", "[rational]") {
  CHECK(Rational(4, 19) < Rational(1, 3));
  CHECK(Rational(1, 3) <= Rational(1, 3));
  CHECK(Rational(10, 3) > Rational(3));
  CHECK(morstone::min(Rational(1, 3), Rational(4, 19)) == Rational(4, 19));
  CHECK(morstone::max(Rational(1, 3), Rational(4, 19)) == Rational(1, 3));
  // big but representable operands
  const Rational big(INT64_MAX / 4, 3), small(1, 3);
  CHECK(small < big);
}

TEST_CASE("rational parse and print round-trip", "[rational]") {
  CHECK(Rational::parse("4/19") == Rational(4, 19));
  CHECK(Rational::parse("-3/6") == Rational(-1, 2));
  CHECK(Rational::parse("7") == Rational(7));
  CHECK(Rational(5, 2).str() == "5/2");
  CHECK(Rational(-7).str() == "-7");
  CHECK_THROWS_AS(Rational::parse("x/2"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("1/0"), std::domain_error);

  // parse(str()) is the identity on a deterministic sample
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  auto next = [&state]() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  for (int i = 0; i < 200; ++i) {
    const std::int64_t n = static_cast<std::int64_t>(next() % 2001) - 1000;
    const std::int64_t d = static_cast<std::int64_t>(next() % 999) + 1;
    const Rational r(n, d);
    CHECK(Rational::parse(r.str()) == r);
  }
}

TEST_CASE("rational addition is associative and commutative on samples",
          "[rational]") {
  const Rational xs[] = {Rational(1, 3), Rational(-4, 19), Rational(7, 2),
                         Rational(0),    Rational(-5),     Rational(9, 7)};
  for (const auto& a : xs)
    for (const auto& b : xs) {
      CHECK(a + b == b + a);
      for (const auto& c : xs) CHECK((a + b) + c == a + (b + c));
    }
}
