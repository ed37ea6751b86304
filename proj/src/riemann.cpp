#include "fbmr/riemann.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fbmr/errors.hpp"

namespace fbmr {

namespace {

double ipow(double x, int r)
{
  double result = 1.0;
  for (int i = 0; i < r; ++i) result *= x;
  return result;
}

int require_finite_ell(const SymmetricMeasure& nu)
{
  const EllResult ell = ell_of(nu);
  if (ell.is_infinite())
    throw InfiniteEll("measure '" + nu.name() + "' has infinite ell; no finite decomposition");
  return ell.value;
}

}  // namespace

FunctionFamily FunctionFamily::polynomial(std::vector<double> coefficients, int max_order)
{
  while (!coefficients.empty() && coefficients.back() == 0.0) coefficients.pop_back();
  FunctionFamily f;
  f.kind_ = Kind::polynomial;
  f.coefficients_ = std::move(coefficients);
  f.max_order_ = max_order;
  return f;
}

FunctionFamily FunctionFamily::monomial(int degree, int max_order)
{
  if (degree < 0) throw DomainError("monomial degree must be non-negative");
  std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
  c.back() = 1.0;
  return polynomial(std::move(c), max_order);
}

FunctionFamily FunctionFamily::trig(double a, double b, double c, int max_order)
{
  FunctionFamily f;
  f.kind_ = Kind::trig;
  f.a_ = a;
  f.b_ = b;
  f.c_ = c;
  f.max_order_ = max_order;
  return f;
}

FunctionFamily FunctionFamily::gauss_mollified(double sigma, int max_order)
{
  if (!(sigma >= 1.0)) throw DomainError("gauss_mollified requires sigma >= 1");
  FunctionFamily f;
  f.kind_ = Kind::gauss_mollified;
  f.sigma_ = sigma;
  f.max_order_ = max_order;
  return f;
}

std::string FunctionFamily::describe() const
{
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::polynomial:
      os << "polynomial[";
      for (std::size_t i = 0; i < coefficients_.size(); ++i) os << (i ? "," : "") << coefficients_[i];
      os << "]";
      break;
    case Kind::trig:
      os << a_ << "*sin(" << b_ << "*x+" << c_ << ")";
      break;
    case Kind::gauss_mollified:
      os << "exp(-x^2/(2*" << sigma_ << "^2))";
      break;
  }
  return os.str();
}

int FunctionFamily::degree() const
{
  if (kind_ != Kind::polynomial) return -1;
  return static_cast<int>(coefficients_.size()) - 1;
}

void FunctionFamily::require_order(int k) const
{
  if (k < 0) throw DomainError("derivative order must be non-negative");
  if (k > max_order_)
    throw DerivativeOrderError("f^(" + std::to_string(k) + ") requested but " + describe() +
                               " declares order " + std::to_string(max_order_));
}

bool FunctionFamily::derivative_vanishes(int k) const
{
  return kind_ == Kind::polynomial && k > degree();
}

double FunctionFamily::derivative(int k, double x) const
{
  require_order(k);
  switch (kind_) {
    case Kind::polynomial: {
      const int deg = degree();
      if (k > deg) return 0.0;
      double acc = 0.0;
      for (int i = deg; i >= k; --i) {
        double falling = 1.0;
        for (int m = 0; m < k; ++m) falling *= static_cast<double>(i - m);
        acc = acc * x + falling * coefficients_[static_cast<std::size_t>(i)];
      }
      return acc;
    }
    case Kind::trig: {
      const double phase = b_ * x + c_;
      const double scale = a_ * ipow(b_, k);
      switch (k % 4) {
        case 0: return scale * std::sin(phase);
        case 1: return scale * std::cos(phase);
        case 2: return -scale * std::sin(phase);
        default: return -scale * std::cos(phase);
      }
    }
    case Kind::gauss_mollified: {
      const double y = x / sigma_;
      const double sign = (k % 2) ? -1.0 : 1.0;
      return sign * ipow(1.0 / sigma_, k) * hermite_poly(k, y) * std::exp(-0.5 * y * y);
    }
  }
  throw DomainError("unknown function kind");
}

double hermite_poly(int q, double x)
{
  if (q < 0) throw DomainError("Hermite degree must be non-negative");
  if (q == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < q; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::int64_t hermite_coeff_closed_form(int r, int u)
{
  if (u < 0 || 2 * u > r) throw DomainError("u out of range");
  __extension__ typedef __int128 wide;
  wide value = 1;
  for (int i = r - 2 * u + 1; i <= r; ++i) value *= i;  // r!/(r−2u)!
  for (int i = 2; i <= u; ++i) value /= i;
  value >>= u;
  return static_cast<std::int64_t>(value);
}

HermiteExpansion hermite_coeffs(int r)
{
  if (r < 1 || r % 2 == 0) throw DomainError("Hermite expansion needs an odd r >= 1");
  if (r > 31) throw DomainError("r > 31 overflows 64-bit coefficients");

  // power[q] is the H_q coefficient of x^k; multiply by x using x·H_q = H_{q+1} + q·H_{q−1}.
  std::vector<std::int64_t> power(static_cast<std::size_t>(r) + 2, 0);
  power[0] = 1;
  for (int k = 0; k < r; ++k) {
    std::vector<std::int64_t> next(power.size(), 0);
    for (int q = 0; q <= k; ++q) {
      const std::int64_t c = power[static_cast<std::size_t>(q)];
      if (c == 0) continue;
      next[static_cast<std::size_t>(q) + 1] += c;
      if (q >= 1) next[static_cast<std::size_t>(q) - 1] += q * c;
    }
    power = std::move(next);
  }

  HermiteExpansion e{r, {}};
  for (int u = 0; 2 * u <= r; ++u) {
    const std::int64_t c = power[static_cast<std::size_t>(r - 2 * u)];
    if (c != hermite_coeff_closed_form(r, u))
      throw std::logic_error("Hermite recursion disagrees with closed form");
    e.coefficients.push_back(c);
  }
  return e;
}

double nu_symmetric_sum(PathView path, const FunctionFamily& f, const SymmetricMeasure& nu,
                        double t)
{
  f.require_order(1);
  const long steps = path.grid.index_of(t);
  const auto& b = path.values;
  double sum = 0.0;
  for (long j = 0; j < steps; ++j) {
    const double a = b[j];
    const double delta = b[j + 1] - a;
    sum += delta * nu.integrate([&](double alpha) { return f.derivative(1, a + alpha * delta); });
  }
  return sum;
}

double weighted_power_sum(PathView path, const FunctionFamily& f, int h,
                          const SymmetricMeasure& nu, double t, bool include_weight)
{
  if (h < 1) throw DomainError("h must be at least 1");
  const int order = 2 * h + 1;
  f.require_order(order);
  const long steps = path.grid.index_of(t);
  const auto& b = path.values;
  double sum = 0.0;
  if (!f.derivative_vanishes(order)) {
    for (long j = 0; j < steps; ++j) {
      const double delta = b[j + 1] - b[j];
      sum += f.derivative(order, 0.5 * (b[j] + b[j + 1])) * ipow(delta, order);
    }
  }
  return include_weight ? kv_constant(nu, h) * sum : sum;
}

double raw_power_sum(PathView path, int r, double t)
{
  if (r < 1 || r % 2 == 0) throw DomainError("power sums are defined for odd r >= 1");
  const long steps = path.grid.index_of(t);
  const auto& b = path.values;
  double sum = 0.0;
  for (long j = 0; j < steps; ++j) sum += ipow(b[j + 1] - b[j], r);
  return sum;
}

Decomposition decompose(PathView path, const FunctionFamily& f, const SymmetricMeasure& nu,
                        double t)
{
  const int ell = require_finite_ell(nu);
  f.require_order(4 * ell + 1);
  const long steps = path.grid.index_of(t);
  const auto& b = path.values;

  Decomposition d;
  d.ell = ell;
  d.phi.assign(static_cast<std::size_t>(ell) + 1, 0.0);
  for (long j = 0; j < steps; ++j) {
    const double a = b[j];
    const double delta = b[j + 1] - a;
    d.symmetric_sum +=
        delta * nu.integrate([&](double alpha) { return f.derivative(1, a + alpha * delta); });
    const double mid = 0.5 * (a + b[j + 1]);
    for (int h = ell; h <= 2 * ell; ++h) {
      const int order = 2 * h + 1;
      if (f.derivative_vanishes(order)) continue;
      d.phi[static_cast<std::size_t>(h - ell)] += f.derivative(order, mid) * ipow(delta, order);
    }
  }
  for (int h = ell; h <= 2 * ell; ++h) d.phi[static_cast<std::size_t>(h - ell)] *= kv_constant(nu, h);

  d.total = f.value(b[steps]) - f.value(0.0);
  d.residual = d.total - d.symmetric_sum;
  for (double p : d.phi) d.residual -= p;
  return d;
}

double residual(PathView path, const FunctionFamily& f, const SymmetricMeasure& nu, double t)
{
  return decompose(path, f, nu, t).residual;
}

std::vector<double> residual_trajectory(PathView path, const FunctionFamily& f,
                                        const SymmetricMeasure& nu)
{
  const int ell = require_finite_ell(nu);
  f.require_order(4 * ell + 1);
  const long steps = path.grid.steps();
  const auto& b = path.values;

  std::vector<double> k(static_cast<std::size_t>(ell) + 1);
  for (int h = ell; h <= 2 * ell; ++h) k[static_cast<std::size_t>(h - ell)] = kv_constant(nu, h);

  std::vector<double> out(static_cast<std::size_t>(steps) + 1, 0.0);
  double chain = 0.0;
  const double f0 = f.value(0.0);
  for (long j = 0; j < steps; ++j) {
    const double a = b[j];
    const double delta = b[j + 1] - a;
    double step = delta * nu.integrate([&](double alpha) { return f.derivative(1, a + alpha * delta); });
    const double mid = 0.5 * (a + b[j + 1]);
    for (int h = ell; h <= 2 * ell; ++h) {
      const int order = 2 * h + 1;
      if (f.derivative_vanishes(order)) continue;
      step += k[static_cast<std::size_t>(h - ell)] * f.derivative(order, mid) * ipow(delta, order);
    }
    chain += step;
    out[static_cast<std::size_t>(j) + 1] = (f.value(b[j + 1]) - f0) - chain;
  }
  return out;
}

}  // namespace fbmr
