#include <doctest.h>

#include <cmath>

#include "ptbands/error.hpp"
#include "ptbands/grid.hpp"
#include "ptbands/potential.hpp"
#include "support.hpp"

using namespace ptbands;
using testing::uniform;

TEST_CASE("from_parts expands the model potential at gamma = 1") {
  // cos 2x + i sin 2x = e^{2ix}
  const auto p = from_parts({{1.0, 0.5}, {0.0, 1.0}, 1.0, SineConvention::Prop2Sine});
  CHECK(std::abs(p.coeff(1) - 1.0) < 1e-15);
  CHECK(std::abs(p.coeff(-1) - 1.0) < 1e-15);
  CHECK(std::abs(p.coeff(2) - 1.0) < 1e-15);
  CHECK(std::abs(p.coeff(-2)) < 1e-15);
  CHECK(p.max_harmonic() == 2);
}

TEST_CASE("from_parts with gamma = 0 keeps only the even part") {
  const auto p = from_parts({{1.0, 0.5}, {0.3, -0.7, 2.0}, 0.0, SineConvention::Prop2Sine});
  const auto u = from_parts({{1.0, 0.5}, {}, 0.0, SineConvention::Prop2Sine});
  CHECK(p.coeffs() == u.coeffs());
}

TEST_CASE("from_parts for i*0.2*sin 2x") {
  const auto p = from_parts({{}, {0.0, 1.0}, 0.2, SineConvention::Prop2Sine});
  CHECK(p.coeffs().size() == 2);
  CHECK(std::abs(p.coeff(2) - 0.1) < 1e-16);
  CHECK(std::abs(p.coeff(-2) + 0.1) < 1e-16);
}

TEST_CASE("the doubled sine convention applies its factor once") {
  const auto p2 = from_parts({{}, {0.0, 1.0}, 0.2, SineConvention::Prop2Sine});
  const auto p3 = from_parts({{}, {0.0, 1.0}, 0.2, SineConvention::Prop3Doubled});
  CHECK(std::abs(p3.coeff(2) - 2.0 * p2.coeff(2)) < 1e-16);
  // W = 2 b sin(jx): eval(V) at x = pi/4 is i*gamma*2*b
  CHECK(std::abs(eval(p3, kPi / 4) - cplx(0.0, 0.4)) < 1e-15);
}

TEST_CASE("parts round-trip through the exponential coefficients") {
  for (auto conv : {SineConvention::Prop2Sine, SineConvention::Prop3Doubled}) {
    PotentialParts in{{0.5, -1.25, 0.0, 3.0}, {2.0, 0.0, -0.5}, 0.7, conv};
    const auto back = to_parts(from_parts(in), in.gamma, conv);
    REQUIRE(back.cosine_coeffs.size() >= 4);
    REQUIRE(back.sine_coeffs.size() >= 3);
    for (std::size_t j = 0; j < in.cosine_coeffs.size(); ++j)
      CHECK(std::abs(back.cosine_coeffs[j] - in.cosine_coeffs[j]) < 1e-15);
    for (std::size_t j = 0; j < in.sine_coeffs.size(); ++j)
      CHECK(std::abs(back.sine_coeffs[j] - in.sine_coeffs[j]) < 1e-15);
  }
}

TEST_CASE("eval examples") {
  CHECK(std::abs(eval(PeriodicPotential{}, 1.234)) == 0.0);
  CHECK(std::abs(eval(testing::two_cos(), 0.0) - 2.0) < 1e-15);
  // 2cos(pi/2) + cos(pi) + i gamma sin(pi) = -1
  for (double g : {0.0, 1.0, 1.5})
    CHECK(std::abs(eval(testing::model_potential(g), kPi / 2) + 1.0) < 1e-14);
}

TEST_CASE("validate_pt examples") {
  CHECK(validate_pt(testing::two_cos(), 1e-14));
  CHECK_FALSE(validate_pt(PeriodicPotential({{1, cplx(0.0, 1.0)}}), 1e-14));
  for (double g : {0.0, 0.5, 1.0, 1.5, 3.0}) CHECK(validate_pt(testing::model_potential(g), 1e-14));
}

TEST_CASE("property: potentials from parts are PT-symmetric and periodic") {
  for (int trial = 0; trial < 50; ++trial) {
    PotentialParts parts;
    const int na = 1 + trial % 6, nb = 1 + (trial * 7) % 5;
    for (int j = 0; j < na; ++j) parts.cosine_coeffs.push_back(uniform(-2, 2));
    for (int j = 0; j < nb; ++j) parts.sine_coeffs.push_back(uniform(-2, 2));
    parts.gamma = uniform(-3, 3);
    parts.convention = trial % 2 ? SineConvention::Prop2Sine : SineConvention::Prop3Doubled;
    const auto p = from_parts(parts);
    REQUIRE(validate_pt(p, 1e-14));
    for (int s = 0; s < 100; ++s) {
      const double x = uniform(-10, 10);
      CHECK(std::abs(eval(p, -x) - std::conj(eval(p, x))) <= 1e-13);
      CHECK(std::abs(eval(p, x + kTwoPi) - eval(p, x)) <= 1e-12);
    }
  }
}

TEST_CASE("even and odd parts reassemble the potential") {
  PotentialParts parts{{1.0, 0.5}, {0.0, 1.0}, 1.5, SineConvention::Prop2Sine};
  const auto U = even_part(parts), W = odd_part(parts), V = from_parts(parts);
  for (int s = 0; s < 20; ++s) {
    const double x = uniform(-4, 4);
    CHECK(std::abs(eval(U, x) + cplx(0.0, 1.5) * eval(W, x) - eval(V, x)) < 1e-14);
    CHECK(std::abs(eval(W, x) - std::sin(2 * x)) < 1e-14);
    CHECK(std::abs(eval(W, -x) + eval(W, x)) < 1e-14);
  }
}

TEST_CASE("JSON parsing is strict") {
  using nlohmann::json;
  const auto p = potential_from_json(json::parse(
      R"({"cosine": [1.0, 0.5], "sine": [0.0, 1.0], "gamma": 1.0, "convention": "prop2"})"));
  CHECK(std::abs(p.coeff(2) - 1.0) < 1e-15);
  const auto q = potential_from_json(json::parse(R"({"exp_coeffs": [[1, 1.0, 0.0], [-1, 1.0, 0.0]]})"));
  CHECK(q.coeffs() == testing::two_cos().coeffs());
  CHECK_THROWS_AS(potential_from_json(json::parse(R"({"cosine": [1.0], "typo": 1})")), ConfigError);
  CHECK_THROWS_AS(potential_from_json(json::parse(R"({"convention": "prop4"})")), ConfigError);
  CHECK_THROWS_AS(potential_from_json(json::parse(R"({"exp_coeffs": [[1, 1.0]]})")), ConfigError);
  const auto round = potential_from_json(potential_to_json(testing::model_potential(1.5)));
  CHECK(round.coeffs() == testing::model_potential(1.5).coeffs());
}
