#include "fbmr/stats.hpp"

#include <algorithm>
#include <numbers>

#include "fbmr/errors.hpp"

namespace fbmr {

double pairwise_sum(std::span<const double> x)
{
  constexpr std::size_t kBlock = 32;
  if (x.size() <= kBlock) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

double mean(std::span<const double> x)
{
  if (x.empty()) throw SampleSizeError("mean of an empty sample");
  return pairwise_sum(x) / static_cast<double>(x.size());
}

namespace {

std::vector<double> centered_power(std::span<const double> x, double centre, int power)
{
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - centre;
    double p = 1.0;
    for (int k = 0; k < power; ++k) p *= d;
    out[i] = p;
  }
  return out;
}

}  // namespace

double variance(std::span<const double> x)
{
  if (x.size() < 2) throw SampleSizeError("variance needs at least two samples");
  const double m = mean(x);
  return pairwise_sum(centered_power(x, m, 2)) / static_cast<double>(x.size() - 1);
}

VarianceEstimate variance_with_se(std::span<const double> x)
{
  const double s2 = variance(x);
  const double m = mean(x);
  const double m4 = mean(centered_power(x, m, 4));
  const double m2 = mean(centered_power(x, m, 2));
  const double spread = std::max(0.0, m4 - m2 * m2);
  return {s2, std::sqrt(spread / static_cast<double>(x.size()))};
}

MeanEstimate mean_with_se(std::span<const double> x)
{
  const double m = mean(x);
  const double se = x.size() > 1 ? std::sqrt(variance(x) / static_cast<double>(x.size())) : 0.0;
  return {m, se};
}

double covariance_of(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw SampleSizeError("covariance needs two equal samples of size >= 2");
  const double mx = mean(x);
  const double my = mean(y);
  std::vector<double> prod(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prod[i] = (x[i] - mx) * (y[i] - my);
  return pairwise_sum(prod) / static_cast<double>(x.size() - 1);
}

double correlation(std::span<const double> x, std::span<const double> y)
{
  const double sx = variance(x);
  const double sy = variance(y);
  if (sx <= 0.0 || sy <= 0.0) return 0.0;
  return covariance_of(x, y) / std::sqrt(sx * sy);
}

double skewness(std::span<const double> x)
{
  const double m = mean(x);
  const double m2 = mean(centered_power(x, m, 2));
  const double m3 = mean(centered_power(x, m, 3));
  if (m2 <= 0.0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double kolmogorov_survival(double lambda)
{
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.0) {
    // Jacobi theta form converges fast for small λ:
    // P(K ≤ λ) = √(2π)/λ Σ_{k≥1} exp(−(2k−1)²π²/(8λ²)).
    const double c = std::sqrt(2.0 * std::numbers::pi) / lambda;
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      cdf += std::exp(-odd * odd * std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    }
    return std::clamp(1.0 - c * cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf)
{
  if (samples.size() < 100)
    throw SampleSizeError("Kolmogorov-Smirnov test needs at least 100 samples, got " +
                          std::to_string(samples.size()));
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  // Stephens' finite-sample correction to the asymptotic argument.
  const double sqrt_m = std::sqrt(m);
  const double lambda = (sqrt_m + 0.12 + 0.11 / sqrt_m) * d;
  return {d, kolmogorov_survival(lambda)};
}

}  // namespace fbmr
