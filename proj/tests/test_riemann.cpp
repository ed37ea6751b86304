#include <doctest.h>

#include "fbmr/errors.hpp"
#include "fbmr/random.hpp"
#include "fbmr/riemann.hpp"
#include "fbmr/stats.hpp"

using namespace fbmr;

namespace {

// Path (0, 1, −1) on a unit-step grid.
const GridSpec kTwoStep{0.25, 1, 2.0};
const std::vector<double> kTwoStepValues{0.0, 1.0, -1.0};

}  // namespace

TEST_SUITE("riemann") {

TEST_CASE("hermite polynomials")
{
  CHECK(hermite_poly(0, 0.7) == 1.0);
  CHECK(hermite_poly(1, 0.7) == 0.7);
  CHECK(hermite_poly(3, 2.0) == 2.0);
  CHECK(hermite_poly(4, 1.5) == doctest::Approx(std::pow(1.5, 4) - 6 * 1.5 * 1.5 + 3));
}

TEST_CASE("hermite expansion of powers")
{
  CHECK(hermite_coeffs(1).coefficients == std::vector<std::int64_t>{1});
  CHECK(hermite_coeffs(3).coefficients == std::vector<std::int64_t>{1, 3});
  CHECK(hermite_coeffs(5).coefficients == std::vector<std::int64_t>{1, 10, 15});
  for (int r = 1; r <= 31; r += 2) {
    const auto e = hermite_coeffs(r);
    for (int u = 0; 2 * u <= r; ++u) CHECK(e.coefficients[u] == hermite_coeff_closed_form(r, u));
  }
  // x^7 reassembled from the expansion
  const auto e = hermite_coeffs(7);
  for (double x : {-1.3, 0.2, 2.5}) {
    double s = 0.0;
    for (int u = 0; 2 * u <= 7; ++u) s += static_cast<double>(e.coefficients[u]) * hermite_poly(7 - 2 * u, x);
    CHECK(s == doctest::Approx(std::pow(x, 7)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(hermite_coeffs(4), DomainError);
}

TEST_CASE("hermite orthogonality by Monte Carlo")
{
  CounterStream rs(123, 0);
  const std::size_t m = 200000;
  std::vector<double> cross(m), square(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double z = rs.normal(i);
    cross[i] = hermite_poly(2, z) * hermite_poly(3, z);
    square[i] = hermite_poly(3, z) * hermite_poly(3, z);
  }
  const auto c = mean_with_se(cross);
  const auto s = mean_with_se(square);
  CHECK(std::abs(c.value) <= 4 * c.standard_error);
  CHECK(std::abs(s.value - 6.0) <= 4 * s.standard_error);
}

TEST_CASE("function family derivatives")
{
  auto cubic = FunctionFamily::monomial(3);
  CHECK(cubic.derivative(3, 9.0) == 6.0);
  CHECK(cubic.derivative_vanishes(4));
  CHECK_FALSE(cubic.derivative_vanishes(3));
  CHECK(cubic.degree() == 3);

  auto p = FunctionFamily::polynomial({1.0, -2.0, 0.5});  // 1 − 2x + x²/2
  CHECK(p.value(2.0) == doctest::Approx(-1.0));
  CHECK(p.derivative(1, 2.0) == doctest::Approx(0.0));

  auto s = FunctionFamily::trig(2.0, 3.0, 0.4);
  auto g = FunctionFamily::gauss_mollified(1.5);
  const double eps = 1e-5;
  for (int k = 0; k < 6; ++k)
    for (double x : {-0.8, 0.3, 1.7}) {
      for (const auto* f : {&s, &g}) {
        const double fd = (f->derivative(k, x + eps) - f->derivative(k, x - eps)) / (2 * eps);
        CHECK(f->derivative(k + 1, x) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  CHECK(s.value(0.1) == doctest::Approx(2.0 * std::sin(3.0 * 0.1 + 0.4)));
  CHECK(s.degree() == -1);

  auto limited = FunctionFamily::monomial(5, 2);
  CHECK_THROWS_AS(limited.require_order(3), DerivativeOrderError);
  CHECK_THROWS_AS(FunctionFamily::gauss_mollified(0.5), DomainError);
}

TEST_CASE("symmetric sum hand cases")
{
  const PathView view{kTwoStep, kTwoStepValues};
  CHECK(nu_symmetric_sum(view, FunctionFamily::monomial(3), SymmetricMeasure::trapezoid(), 2.0) ==
        doctest::Approx(-4.5).epsilon(1e-15));
  CHECK(raw_power_sum(view, 3, 2.0) == -7.0);
  CHECK(raw_power_sum(view, 1, 2.0) == -1.0);

  const GridSpec one{0.25, 1, 1.0};
  const std::vector<double> up{0.0, 2.0};
  const PathView step{one, up};
  CHECK(weighted_power_sum(step, FunctionFamily::monomial(3), 1, SymmetricMeasure::trapezoid(), 1.0, false) == 48.0);
  CHECK(weighted_power_sum(step, FunctionFamily::monomial(2), 1, SymmetricMeasure::trapezoid(), 1.0, false) == 0.0);
  CHECK(weighted_power_sum(step, FunctionFamily::monomial(3), 1, SymmetricMeasure::trapezoid(), 1.0, true) ==
        doctest::Approx(-4.0));

  const std::vector<double> zeros(3, 0.0);
  CHECK(raw_power_sum(PathView{kTwoStep, zeros}, 5, 2.0) == 0.0);
}

TEST_CASE("chain rule is exact for low-degree polynomials")
{
  const GridSpec g{0.1, 128, 1.0};
  auto batch = sample_paths(g, 10, 3, SamplerMethod::circulant);
  for (std::size_t p = 0; p < 10; ++p) {
    const PathView view{g, batch.path(p)};
    const double b = view.values[static_cast<std::size_t>(g.index_of(0.5))];
    for (const auto& nu : {SymmetricMeasure::trapezoid(), SymmetricMeasure::midpoint(),
                           SymmetricMeasure::simpson(), SymmetricMeasure::lebesgue()}) {
      CHECK(nu_symmetric_sum(view, FunctionFamily::monomial(1), nu, 0.5) == doctest::Approx(b).epsilon(1e-12));
      CHECK(nu_symmetric_sum(view, FunctionFamily::monomial(2), nu, 0.5) == doctest::Approx(b * b).epsilon(1e-12));
    }
    // Simpson has ℓ = 2: exact through degree 4
    const double s4 = nu_symmetric_sum(view, FunctionFamily::monomial(4), SymmetricMeasure::simpson(), 0.5);
    CHECK(std::abs(s4 - std::pow(b, 4)) <= 1e-9 * (1 + std::pow(b, 4)));
    CHECK(std::abs(residual(view, FunctionFamily::monomial(4), SymmetricMeasure::simpson(), 0.5)) <= 1e-9);
  }
}

TEST_CASE("decomposition adds up")
{
  const GridSpec g{1.0 / 6, 256, 1.0};
  auto batch = sample_paths(g, 5, 8, SamplerMethod::circulant);
  for (std::size_t p = 0; p < 5; ++p) {
    const PathView view{g, batch.path(p)};
    for (const auto& f : {FunctionFamily::trig(1, 1, 0), FunctionFamily::gauss_mollified(1.0), FunctionFamily::monomial(5)}) {
      const auto d = decompose(view, f, SymmetricMeasure::trapezoid(), 1.0);
      CHECK(d.phi.size() == 2);
      double sum = d.symmetric_sum + d.residual;
      for (double v : d.phi) sum += v;
      CHECK(std::abs(sum - d.total) <= 1e-12 * (1 + std::abs(d.total)));
      const double b = view.values.back();
      CHECK(d.total == doctest::Approx(f.value(b) - f.value(0.0)));
      CHECK(d.phi_at(1) == doctest::Approx(weighted_power_sum(view, f, 1, SymmetricMeasure::trapezoid(), 1.0, true)));
    }
    const auto traj = residual_trajectory(view, FunctionFamily::trig(1, 1, 0), SymmetricMeasure::trapezoid());
    CHECK(traj.size() == 257);
    CHECK(traj[0] == 0.0);
    CHECK(traj[128] == doctest::Approx(residual(view, FunctionFamily::trig(1, 1, 0), SymmetricMeasure::trapezoid(), 0.5)));
  }
  const std::vector<double> zeros(257, 0.0);
  CHECK_THROWS_AS(decompose(PathView{g, zeros}, FunctionFamily::monomial(3), SymmetricMeasure::lebesgue(), 1.0),
                  InfiniteEll);
  CHECK_THROWS_AS(decompose(PathView{g, zeros}, FunctionFamily::monomial(9, 3), SymmetricMeasure::trapezoid(), 1.0),
                  DerivativeOrderError);
}

}
