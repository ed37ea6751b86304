#include <doctest.h>

#include "fbmr/constants.hpp"
#include "fbmr/errors.hpp"
#include "fbmr/fbm.hpp"
#include "oracles.hpp"

using namespace fbmr;

TEST_SUITE("constants") {

TEST_CASE("critical hurst")
{
  CHECK(critical_hurst(1) == doctest::Approx(1.0 / 6));
  CHECK(critical_hurst(2) == doctest::Approx(0.1));
  CHECK_THROWS_AS(critical_hurst(0), DomainError);
}

TEST_CASE("sigma series")
{
  const auto s = sigma_sq(1);
  CHECK(s.value == doctest::Approx(0.89853).epsilon(1e-5));
  CHECK(s.tail_bound < 1e-10);
  for (int l = 1; l <= 3; ++l) {
    const double v = sigma_sq(l).value;
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  double prev = 2.0;
  for (long j : {2L, 4L, 16L, 256L}) {
    const double v = sigma_sq_truncated(1, j).value;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("sigma series against a long double Z-sum")
{
  for (int l : {1, 2}) {
    const double h = critical_hurst(l);
    const auto s = sigma_sq(l);
    long double z = 1.0L;
    for (long j = 1; j <= s.terms_used; ++j) z += 2.0L * std::pow(oracle::fgn(h, j), 2 * l + 1);
    CHECK(std::abs(s.value - static_cast<double>(z)) <= 1e-13);
  }
}

TEST_CASE("tail bound majorizes the remainder")
{
  const double h = 1.0 / 6;
  const long j = 64;
  long double rest = 0.0L;
  for (long k = j + 1; k <= 4000000; ++k) rest += 2.0L * std::fabs(std::pow(static_cast<long double>(rho(h, k)), 3));
  CHECK(static_cast<double>(rest) <= rho_power_tail_bound(h, 3, j));
  CHECK_THROWS_AS(rho_power_tail_bound(0.4, 2, 1), DomainError);
}

TEST_CASE("c_nu")
{
  CHECK(c_nu(SymmetricMeasure::trapezoid()) == doctest::Approx(-std::sqrt(sigma_sq(1).value) / 12).epsilon(1e-14));
  CHECK(c_nu(SymmetricMeasure::trapezoid()) == doctest::Approx(-0.07899).epsilon(1e-4));
  CHECK(c_nu(SymmetricMeasure::simpson()) == doctest::Approx(-std::sqrt(sigma_sq(2).value) / 2880).epsilon(1e-14));
  CHECK_THROWS_AS(c_nu(SymmetricMeasure::lebesgue()), InfiniteEll);
}

TEST_CASE("exact power sum variance")
{
  // n = 1, H arbitrary: a single standard normal, E[Z^6] = 15
  CHECK(exact_power_sum_variance(0.3, 3, 1, 1.0) == doctest::Approx(15.0).epsilon(1e-14));
  CHECK(exact_power_sum_variance(0.3, 5, 1, 1.0) == doctest::Approx(945.0).epsilon(1e-14));
  // r = 1 telescopes to Var B_t
  CHECK(exact_power_sum_variance(0.2, 1, 100, 0.5) == doctest::Approx(std::pow(0.5, 0.4)).epsilon(1e-12));
  for (int steps = 1; steps <= 3; ++steps)
    for (double h : {1.0 / 6, 0.1, 0.35}) {
      const double lib = exact_power_sum_variance(h, 3, steps, 1.0);
      const double ref = static_cast<double>(oracle::power_sum_variance(h, 3, steps, steps));
      CHECK(std::abs(lib - ref) <= 1e-12 * std::abs(ref));
    }
  const double lib5 = exact_power_sum_variance(0.1, 5, 2, 1.0);
  CHECK(lib5 == doctest::Approx(static_cast<double>(oracle::power_sum_variance(0.1, 5, 2, 2))).epsilon(1e-12));
  CHECK(exact_power_sum_variance(0.2, 3, 10, 0.05) == 0.0);
  CHECK_THROWS_AS(exact_power_sum_variance(0.2, 2, 10, 1.0), DomainError);
}

TEST_CASE("breuer-major limit")
{
  const auto l1 = bm_limit_variance(1.0 / 6, 3);
  CHECK(l1.value == doctest::Approx(6.0 * sigma_sq(1).value).epsilon(1e-12));
  CHECK_FALSE(l1.scaling_warning);
  CHECK(bm_limit_variance(0.2, 3).scaling_warning);
  // ℓ = 2 adds the third chaos: 5!·Σρ^5 + 10²·3!·Σρ^3
  const double h = 0.1;
  const double expect = 120.0 * rho_power_series(h, 5, 1e-14).value + 600.0 * rho_power_series(h, 3, 1e-14).value;
  CHECK(bm_limit_variance(h, 5).value == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(exact_power_sum_variance(1.0 / 6, 3, 16384, 1.0) / l1.value - 1.0) < 0.01);
}

TEST_CASE("constants row")
{
  const auto row = constants_row(SymmetricMeasure::trapezoid());
  CHECK(row.ell == 1);
  CHECK(row.oracle_ratio == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(constants_row(SymmetricMeasure::lebesgue()).ell == EllResult::infinite);
}

}
