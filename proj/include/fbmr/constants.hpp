#pragma once

#include <string>
#include <vector>

#include "fbmr/measure.hpp"

namespace fbmr {

/// A truncated infinite series with a rigorous bound on the neglected tail.
struct SeriesValue {
  double value = 0.0;
  long terms_used = 0;
  double tail_bound = 0.0;
};

/// Critical Hurst index 1/(4ℓ+2).
double critical_hurst(int ell);

/// σ_ℓ² = 1 + 4^{−ℓ} Σ_{j≥1} ((j+1)^{2H} + (j−1)^{2H} − 2j^{2H})^{2ℓ+1}, H = 1/(4ℓ+2).
SeriesValue sigma_sq(int ell, double tol = 1e-12);

/// The same series truncated at a fixed J (terms j = 1..J), with its tail bound.
SeriesValue sigma_sq_truncated(int ell, long terms);

/// Σ_{j∈Z} ρ(H,j)^q truncated at |j| ≤ J, with its tail bound.
SeriesValue rho_power_series(double hurst, int q, long terms);

/// Σ_{j∈Z} ρ(H,j)^q, truncated once the tail bound drops below tol.
SeriesValue rho_power_series(double hurst, int q, double tol);

/// Majorant of Σ_{|j|>J} |ρ(H,j)|^q (both sides), safety factor 2 included.
double rho_power_tail_bound(double hurst, int q, long terms);

/// c_ν = k_{ν,ℓ}·σ_ℓ. Throws InfiniteEll.
double c_nu(const SymmetricMeasure& nu);

/// Exact Var(Σ_{j<⌊nt⌋} (Δ_j)^r) from the Hermite covariance identity.
double exact_power_sum_variance(double hurst, int r, long n, double t);

struct LimitVariance : SeriesValue {
  bool scaling_warning = false;  // set when 2rH ≠ 1
};

/// Per-unit-time Breuer-Major variance of Σ(Δ_j)^r, chaos order 1 excluded.
LimitVariance bm_limit_variance(double hurst, int r, double tol = 1e-12);

/// One row of the constants table.
struct ConstantsRow {
  std::string measure;
  int ell = 0;  // EllResult::infinite for ℓ = ∞
  double k_nu_ell = 0.0;
  SeriesValue sigma_sq;
  LimitVariance oracle_variance;
  double c_nu = 0.0;
  double oracle_ratio = 0.0;  // oracle_variance / sigma_sq
};

ConstantsRow constants_row(const SymmetricMeasure& nu);

}  // namespace fbmr
