#include "fbmr/constants.hpp"

#include <cmath>

#include "fbmr/errors.hpp"
#include "fbmr/fbm.hpp"
#include "fbmr/riemann.hpp"
#include "fbmr/stats.hpp"

namespace fbmr {

namespace {

double ipow(double x, int q)
{
  double r = 1.0;
  for (int i = 0; i < q; ++i) r *= x;
  return r;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

void check_ell(int ell)
{
  if (ell < 1) throw DomainError("ell must be at least 1");
}

// Doubles J until the tail majorant drops below tol.
long choose_terms(double hurst, int q, double tol)
{
  long terms = 16;
  while (rho_power_tail_bound(hurst, q, terms) >= tol) {
    if (terms > (1L << 40)) throw DomainError("series tail does not reach the requested tolerance");
    terms *= 2;
  }
  return terms;
}

}  // namespace

double critical_hurst(int ell)
{
  check_ell(ell);
  return 1.0 / (4.0 * ell + 2.0);
}

double rho_power_tail_bound(double hurst, int q, long terms)
{
  if (terms < 2) throw DomainError("tail bound needs J >= 2");
  // |ρ(j)| ≤ |2H(2H−1)|·(j−1)^{2H−2} for j ≥ 2, so
  // Σ_{j>J} |ρ(j)|^q ≤ c^q Σ_{i≥J} i^p ≤ c^q ∫_{J−1}^∞ x^p dx,  p = (2H−2)q.
  const double c = std::abs(2.0 * hurst * (2.0 * hurst - 1.0));
  const double p = (2.0 * hurst - 2.0) * q;
  if (p >= -1.0) throw DomainError("rho power series diverges for this (H, q)");
  const double one_side = std::pow(c, q) * std::pow(static_cast<double>(terms - 1), p + 1.0) / (-p - 1.0);
  constexpr double kSafety = 2.0;
  return kSafety * 2.0 * one_side;
}

SeriesValue rho_power_series(double hurst, int q, long terms)
{
  CompensatedSum sum;
  for (long j = terms; j >= 1; --j) sum.add(2.0 * ipow(rho(hurst, j), q));
  sum.add(1.0);
  return {sum.value(), terms, rho_power_tail_bound(hurst, q, terms)};
}

SeriesValue rho_power_series(double hurst, int q, double tol)
{
  return rho_power_series(hurst, q, choose_terms(hurst, q, tol));
}

SeriesValue sigma_sq_truncated(int ell, long terms)
{
  check_ell(ell);
  const double hurst = critical_hurst(ell);
  const double a = 2.0 * hurst;  // 1/(2ℓ+1)
  const int q = 2 * ell + 1;
  CompensatedSum series;
  for (long j = terms; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    const double second_diff = std::pow(jd + 1.0, a) + std::pow(jd - 1.0, a) - 2.0 * std::pow(jd, a);
    series.add(ipow(second_diff, q));
  }
  const double value = 1.0 + std::pow(4.0, -ell) * series.value();
  // 4^{−ℓ}·|2ρ|^{2ℓ+1} = 2|ρ|^{2ℓ+1}: the tail matches the two-sided ρ-series tail.
  return {value, terms, rho_power_tail_bound(hurst, q, terms)};
}

SeriesValue sigma_sq(int ell, double tol)
{
  check_ell(ell);
  return sigma_sq_truncated(ell, choose_terms(critical_hurst(ell), 2 * ell + 1, tol));
}

double c_nu(const SymmetricMeasure& nu)
{
  const EllResult ell = ell_of(nu);
  if (ell.is_infinite()) throw InfiniteEll("c_nu is undefined for infinite ell");
  return kv_constant(nu, ell.value) * std::sqrt(sigma_sq(ell.value).value);
}

double exact_power_sum_variance(double hurst, int r, long n, double t)
{
  if (r < 1 || r % 2 == 0) throw DomainError("exact variance needs an odd r >= 1");
  if (n < 1) throw DomainError("n must be positive");
  if (!(t >= 0.0)) throw DomainError("t must be non-negative");
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("H must lie in (0,1)");
  const long steps = floor_index(static_cast<double>(n) * t);
  if (steps == 0) return 0.0;

  const HermiteExpansion e = hermite_coeffs(r);
  std::vector<double> weight;  // C_{r,u}²·(r−2u)!
  for (int u = 0; 2 * u <= r; ++u) {
    const double c = static_cast<double>(e.coefficients[static_cast<std::size_t>(u)]);
    weight.push_back(c * c * factorial(r - 2 * u));
  }
  auto lag_moment = [&](long d) {  // E[X^r Y^r] for standard (X,Y) with correlation ρ(d)
    const double rh = rho(hurst, d);
    double g = 0.0;
    for (int u = 0; 2 * u <= r; ++u) g += weight[static_cast<std::size_t>(u)] * ipow(rh, r - 2 * u);
    return g;
  };

  CompensatedSum sum;
  for (long d = steps - 1; d >= 1; --d)
    sum.add(2.0 * static_cast<double>(steps - d) * lag_moment(d));
  sum.add(static_cast<double>(steps) * lag_moment(0));
  return std::pow(static_cast<double>(n), -2.0 * r * hurst) * sum.value();
}

LimitVariance bm_limit_variance(double hurst, int r, double tol)
{
  if (r < 1 || r % 2 == 0) throw DomainError("limit variance needs an odd r >= 1");
  if (!(hurst > 0.0 && hurst < 0.5)) throw DomainError("H must lie in (0, 1/2)");
  LimitVariance out;
  out.scaling_warning = std::abs(2.0 * r * hurst - 1.0) > 1e-12;
  if (r == 1) return out;

  const HermiteExpansion e = hermite_coeffs(r);
  const int orders = (r - 1) / 2;  // chaos orders q = r, r−2, …, 3
  for (int u = 0; r - 2 * u >= 3; ++u) {
    const int q = r - 2 * u;
    const double c = static_cast<double>(e.coefficients[static_cast<std::size_t>(u)]);
    const double weight = c * c * factorial(q);
    const SeriesValue s = rho_power_series(hurst, q, tol / (weight * orders));
    out.value += weight * s.value;
    out.tail_bound += weight * s.tail_bound;
    out.terms_used = std::max(out.terms_used, s.terms_used);
  }
  return out;
}

ConstantsRow constants_row(const SymmetricMeasure& nu)
{
  ConstantsRow row;
  row.measure = nu.name();
  const EllResult ell = ell_of(nu);
  row.ell = ell.value;
  if (ell.is_infinite()) return row;
  const int l = ell.value;
  row.k_nu_ell = kv_constant(nu, l);
  row.sigma_sq = sigma_sq(l);
  row.oracle_variance = bm_limit_variance(critical_hurst(l), 2 * l + 1);
  row.c_nu = row.k_nu_ell * std::sqrt(row.sigma_sq.value);
  row.oracle_ratio = row.oracle_variance.value / row.sigma_sq.value;
  return row;
}

}  // namespace fbmr
