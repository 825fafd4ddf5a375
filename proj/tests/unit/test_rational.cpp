#include <doctest.h>

#include "ablab/errors.hpp"
#include "ablab/experiment.hpp"
#include "ablab/rational.hpp"

using namespace ablab;

TEST_CASE("parse and normalise") {
  CHECK(parse_rational("1/2") == Rational(1, 2));
  CHECK(parse_rational(" -6/8 ") == Rational(-3, 4));
  CHECK(parse_rational("4/-2") == Rational(-2));
  CHECK(parse_rational("+7") == Rational(7));
  CHECK(parse_rational("0/5") == Rational(0));
  CHECK(parse_rational("0/5").den() == 1);
  CHECK(Rational(3, -9).str() == "-1/3");
  CHECK(Rational(10, 5).str() == "2");
  CHECK(Rational(10, 5).is_integer());
}

TEST_CASE("arithmetic and ordering") {
  const Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == Rational(1, 6));
  CHECK(a * b == Rational(1, 18));
  CHECK(-a == Rational(-1, 3));
  CHECK(b < a);
  CHECK(Rational(-1, 2) < Rational(-1, 3));
  CHECK(Rational(13, 10).to_double() == 1.3);
}

TEST_CASE("invalid text") {
  for (const char* t : {"", "1/0", "0.5", "1e3", "a/b", "1/2/3", "1 2", "/2", "1/"}) {
    CAPTURE(t);
    CHECK_THROWS_AS(parse_rational(t), Error);
    CHECK_FALSE(looks_rational(t));
  }
  CHECK(looks_rational("-5/4"));
  CHECK(looks_rational("3"));
}

TEST_CASE("overflow is detected") {
  const Rational big(INT64_MAX / 2 + 1);
  CHECK_THROWS_AS(big * Rational(4), Error);
}

TEST_CASE("quantised flux differences") {
  using namespace ablab::experiment;
  const auto d = SpeciesChargeRule::of(Species::Deuteron);
  const auto a = SpeciesChargeRule::of(Species::AlphaParticle);
  CHECK(quantized_delta_alpha(0, 1, d) == Rational(1, 2));
  CHECK(quantized_delta_alpha(3, 0, d) == Rational(-3, 2));
  CHECK(quantized_delta_alpha(0, 1, a) == Rational(1));
  for (int na = -5; na <= 5; ++na) {
    for (int nb = -5; nb <= 5; ++nb) {
      CHECK(quantized_delta_alpha(na, nb, a).is_integer());
      CHECK(quantized_delta_alpha(na, nb, d) * Rational(2) == Rational(nb - na));
    }
  }
  CHECK_THROWS_AS(quantized_delta_alpha(0, 1, SpeciesChargeRule{Species::Deuteron, 3}), Error);
  CHECK(parse_species("alpha-particle") == Species::AlphaParticle);
  CHECK_THROWS_AS(parse_species("proton"), Error);
}
