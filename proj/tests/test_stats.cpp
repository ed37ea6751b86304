#include <doctest.h>

#include <numeric>

#include "fbmr/errors.hpp"
#include "fbmr/parallel.hpp"
#include "fbmr/random.hpp"
#include "fbmr/stats.hpp"

using namespace fbmr;

TEST_SUITE("stats") {

TEST_CASE("compensated and pairwise sums")
{
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
  std::vector<double> x(1000);
  std::iota(x.begin(), x.end(), 1.0);
  CHECK(pairwise_sum(x) == 500500.0);
  CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("moments")
{
  const std::vector<double> x{1, 2, 3, 4};
  CHECK(mean(x) == 2.5);
  CHECK(variance(x) == doctest::Approx(5.0 / 3));
  const std::vector<double> y{2, 4, 6, 8};
  CHECK(correlation(x, y) == doctest::Approx(1.0));
  CHECK(covariance_of(x, y) == doctest::Approx(10.0 / 3));
  CHECK(skewness(x) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("normal cdf and kolmogorov survival")
{
  CHECK(standard_normal_cdf(0.0) == 0.5);
  CHECK(standard_normal_cdf(1.96) == doctest::Approx(0.9750021).epsilon(1e-7));
  CHECK(kolmogorov_survival(0.5) == doctest::Approx(0.9639452).epsilon(1e-6));
  CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.2699996).epsilon(1e-6));
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.0494).epsilon(1e-3));
  // both branches agree near the switch
  CHECK(kolmogorov_survival(0.999999) == doctest::Approx(kolmogorov_survival(1.000001)).epsilon(1e-5));
  CHECK(kolmogorov_survival(0.0) == 1.0);
}

TEST_CASE("ks test")
{
  CounterStream rs(5, 1);
  std::vector<double> z(2000), shifted(2000);
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = rs.normal(i);
    shifted[i] = z[i] + 0.3;
  }
  CHECK(ks_statistic(z, standard_normal_cdf).p_value > 0.01);
  CHECK(ks_statistic(shifted, standard_normal_cdf).p_value < 1e-6);
  CHECK_THROWS_AS(ks_statistic(std::vector<double>(50, 0.0), standard_normal_cdf), SampleSizeError);
}

TEST_CASE("normal stream moments")
{
  CounterStream rs(99, 7);
  std::vector<double> z(100000);
  rs.normals(z);
  CHECK(std::abs(mean(z)) < 4.0 / std::sqrt(1e5));
  CHECK(std::abs(variance(z) - 1.0) < 4.0 * std::sqrt(2.0 / 1e5));
  // batched and single draws agree, including an odd start
  std::vector<double> part(7);
  rs.normals(part, 3);
  for (std::size_t i = 0; i < part.size(); ++i) CHECK(part[i] == rs.normal(3 + i));
}

TEST_CASE("parallel_for covers every index once")
{
  for (unsigned threads : {1u, 3u, 8u}) {
    std::vector<int> hits(101, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t i) { if (i == 7) throw DomainError("x"); }), DomainError);
}

}
