#include <doctest.h>

#include <cmath>

#include "fbmr/errors.hpp"
#include "fbmr/measure.hpp"

using namespace fbmr;

TEST_SUITE("measure") {

TEST_CASE("built-in atomic measures validate")
{
  auto trap = SymmetricMeasure::make({{0.0, 0.5}, {1.0, 0.5}});
  CHECK(trap.moment(0) == doctest::Approx(1.0).epsilon(1e-15));
  auto simp = SymmetricMeasure::make({{0.0, 1.0 / 6}, {0.5, 2.0 / 3}, {1.0, 1.0 / 6}});
  CHECK(simp.moment(1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("unpaired or invalid atoms are rejected")
{
  CHECK_THROWS_AS(SymmetricMeasure::make({{0.3, 1.0}}), SymmetryViolation);
  CHECK_THROWS_AS(SymmetricMeasure::make({{0.0, 0.4}, {1.0, 0.4}}), MassError);
  CHECK_THROWS_AS(SymmetricMeasure::make({{-0.1, 0.5}, {1.1, 0.5}}), DomainError);
  CHECK_THROWS_AS(SymmetricMeasure::make({{0.0, -0.5}, {1.0, 1.5}}), Error);
}

TEST_CASE("duplicate atoms merge")
{
  auto nu = SymmetricMeasure::make({{0.0, 0.25}, {1.0, 0.5}, {0.0, 0.25}});
  CHECK(nu.atoms().size() == 2);
  CHECK(ell_of(nu).value == 1);
}

TEST_CASE("moments")
{
  CHECK(SymmetricMeasure::trapezoid().moment(2) == doctest::Approx(0.5).epsilon(1e-15));
  auto simp = SymmetricMeasure::simpson();
  CHECK(std::abs(simp.moment(2) - 1.0 / 3) < 1e-15);
  CHECK(std::abs(simp.moment(4) - 5.0 / 24) < 1e-15);
  auto leb = SymmetricMeasure::lebesgue();
  for (int j = 0; j <= 8; ++j) CHECK(std::abs(leb.moment(2 * j) - 1.0 / (2 * j + 1)) < 1e-15);
}

TEST_CASE("ell and k constants")
{
  CHECK(ell_of(SymmetricMeasure::trapezoid()).value == 1);
  CHECK(ell_of(SymmetricMeasure::simpson()).value == 2);
  CHECK(ell_of(SymmetricMeasure::midpoint()).value == 1);
  CHECK(ell_of(SymmetricMeasure::lebesgue()).is_infinite());
  CHECK(std::abs(kv_constant(SymmetricMeasure::trapezoid(), 1) + 1.0 / 12) < 1e-12);
  CHECK(std::abs(kv_constant(SymmetricMeasure::simpson(), 2) + 1.0 / 2880) < 1e-12);
  CHECK(std::abs(kv_constant(SymmetricMeasure::midpoint(), 1) - 1.0 / 24) < 1e-12);
  for (int h = 1; h <= 4; ++h) CHECK(std::abs(kv_constant(SymmetricMeasure::lebesgue(), h)) < 1e-12);
}

TEST_CASE("central moment matches atom arithmetic")
{
  // (α−½)^{2h} over trapezoid atoms is 4^{−h}
  for (int h = 1; h <= 4; ++h)
    CHECK(SymmetricMeasure::trapezoid().central_even_moment(h) == doctest::Approx(std::pow(0.25, h)));
}

TEST_CASE("density measures")
{
  // uniform density: same moments as the analytic Lebesgue rule
  auto uni = SymmetricMeasure::make({}, Density{[](double) { return 1.0; }, 1.0});
  CHECK(ell_of(uni).is_infinite());
  CHECK(uni.moment(6) == doctest::Approx(1.0 / 7).epsilon(1e-13));
  // half atoms, half uniform
  auto mix = SymmetricMeasure::make({{0.0, 0.25}, {1.0, 0.25}}, Density{[](double) { return 0.5; }, 0.5});
  CHECK(mix.moment(2) == doctest::Approx(0.25 + 0.5 / 3).epsilon(1e-13));
  CHECK_THROWS_AS(SymmetricMeasure::make({}, Density{[](double a) { return 2.0 * a; }, 1.0}),
                  SymmetryViolation);
  CHECK_THROWS_AS(SymmetricMeasure::make({}, Density{[](double) { return 1.0; }, 0.9}), MassError);
}

TEST_CASE("permuting atoms changes nothing")
{
  auto a = SymmetricMeasure::make({{1.0, 1.0 / 6}, {0.0, 1.0 / 6}, {0.5, 2.0 / 3}});
  auto b = SymmetricMeasure::simpson();
  CHECK(kv_constant(a, 2) == kv_constant(b, 2));
}

TEST_CASE("by_name")
{
  CHECK(SymmetricMeasure::by_name("simpson").name() == "simpson");
  CHECK_THROWS(SymmetricMeasure::by_name("boole"));
}

TEST_CASE("gauss-legendre nodes integrate polynomials exactly")
{
  const auto& q = gauss_legendre_unit();
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], 20);
  CHECK(s == doctest::Approx(1.0 / 21).epsilon(1e-14));
}

}
