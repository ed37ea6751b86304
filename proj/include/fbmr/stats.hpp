#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fbmr {

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x)
  {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Pairwise (cascade) summation in index order. The association pattern
/// depends only on the length, so the result is reproducible.
double pairwise_sum(std::span<const double> x);

double mean(std::span<const double> x);

/// Unbiased sample variance.
double variance(std::span<const double> x);

/// Sample variance with a delta-method standard error sqrt((m4 − s⁴)/M).
struct VarianceEstimate {
  double value;
  double standard_error;
};
VarianceEstimate variance_with_se(std::span<const double> x);

/// Mean with standard error s/√M.
struct MeanEstimate {
  double value;
  double standard_error;
};
MeanEstimate mean_with_se(std::span<const double> x);

double correlation(std::span<const double> x, std::span<const double> y);

/// Standardised third moment m3 / m2^{3/2}.
double skewness(std::span<const double> x);

/// Sample covariance of x and y.
double covariance_of(std::span<const double> x, std::span<const double> y);

double standard_normal_cdf(double x);

/// P(K > λ) for the Kolmogorov distribution K = sup|B_bridge|.
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic;
  double p_value;
};

/// One-sample Kolmogorov-Smirnov test. Throws SampleSizeError below 100 samples.
KsResult ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

}  // namespace fbmr
