#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fbmr/fbm.hpp"
#include "fbmr/measure.hpp"

namespace fbmr {

/// Test function with closed-form derivatives of every order up to
/// max_derivative_order. All supported kinds have moderate growth.
class FunctionFamily {
 public:
  enum class Kind { polynomial, trig, gauss_mollified };

  static constexpr int kUnlimitedOrder = 64;

  /// Σ_k coefficients[k]·x^k.
  static FunctionFamily polynomial(std::vector<double> coefficients,
                                   int max_order = kUnlimitedOrder);
  static FunctionFamily monomial(int degree, int max_order = kUnlimitedOrder);
  /// a·sin(b·x + c).
  static FunctionFamily trig(double a, double b, double c, int max_order = kUnlimitedOrder);
  /// exp(−x²/(2σ²)) with σ ≥ 1.
  static FunctionFamily gauss_mollified(double sigma, int max_order = kUnlimitedOrder);

  Kind kind() const { return kind_; }
  int max_derivative_order() const { return max_order_; }
  std::string describe() const;

  /// Polynomial degree, or -1 for the non-polynomial kinds.
  int degree() const;

  double value(double x) const { return derivative(0, x); }

  /// f^{(k)}(x); throws DerivativeOrderError when k exceeds the declared order.
  double derivative(int k, double x) const;

  /// Throws DerivativeOrderError unless f^{(k)} is available.
  void require_order(int k) const;

  /// True when f^{(k)} vanishes identically.
  bool derivative_vanishes(int k) const;

 private:
  FunctionFamily() = default;

  Kind kind_ = Kind::polynomial;
  int max_order_ = kUnlimitedOrder;
  std::vector<double> coefficients_;
  double a_ = 1.0, b_ = 1.0, c_ = 0.0;
  double sigma_ = 1.0;
};

/// Probabilists' Hermite polynomial H_q by the three-term recursion.
double hermite_poly(int q, double x);

/// x^r = Σ_u coefficients[u]·H_{r−2u}(x) for odd r.
struct HermiteExpansion {
  int r;
  std::vector<std::int64_t> coefficients;
};

/// Coefficients from the recursion x·H_q = H_{q+1} + q·H_{q−1}; throws
/// DomainError for even or non-positive r.
HermiteExpansion hermite_coeffs(int r);

/// r! / (u!·(r−2u)!·2^u).
std::int64_t hermite_coeff_closed_form(int r, int u);

/// A single sampled path on `grid`; values[j] = B_{j/n}.
struct PathView {
  const GridSpec& grid;
  std::span<const double> values;
};

/// ν-symmetric Riemann sum S_n^ν(f′, t) over j < ⌊nt⌋.
double nu_symmetric_sum(PathView path, const FunctionFamily& f, const SymmetricMeasure& nu,
                        double t);

/// Σ_{j<⌊nt⌋} f^{(2h+1)}(B̃_j)·(Δ_j)^{2h+1}, times k_{ν,h} when include_weight.
double weighted_power_sum(PathView path, const FunctionFamily& f, int h,
                          const SymmetricMeasure& nu, double t, bool include_weight);

/// Σ_{j<⌊nt⌋} (Δ_j)^r for odd r.
double raw_power_sum(PathView path, int r, double t);

/// f(B_{⌊nt⌋/n}) − f(0) − S_n^ν − Σ_{h=ℓ}^{2ℓ} Φ_n^h.
double residual(PathView path, const FunctionFamily& f, const SymmetricMeasure& nu, double t);

/// Every term of the Taylor decomposition at one time, computed in one pass.
struct Decomposition {
  int ell = 0;
  double total = 0.0;          // f(B_{⌊nt⌋/n}) − f(0)
  double symmetric_sum = 0.0;  // S_n^ν(f′, t)
  std::vector<double> phi;     // Φ_n^h (weighted), h = ℓ..2ℓ
  double residual = 0.0;       // R_n(t)

  double phi_at(int h) const { return phi.at(static_cast<std::size_t>(h - ell)); }
};

Decomposition decompose(PathView path, const FunctionFamily& f, const SymmetricMeasure& nu,
                        double t);

/// Decomposition::residual evaluated at every grid time k/n, k = 0..⌊nT⌋.
std::vector<double> residual_trajectory(PathView path, const FunctionFamily& f,
                                        const SymmetricMeasure& nu);

}  // namespace fbmr
