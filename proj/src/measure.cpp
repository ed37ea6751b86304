#include "fbmr/measure.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/legendre.hpp>

#include "fbmr/errors.hpp"

namespace fbmr {

namespace {

constexpr double kTol = 1e-12;

QuadratureRule build_gauss_legendre(int order)
{
  // Boost returns the non-negative roots of P_order in increasing order.
  const std::vector<double> roots = boost::math::legendre_p_zeros<double>(order);
  QuadratureRule rule;
  auto add = [&](double x) {
    const double dp = boost::math::legendre_p_prime(order, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes.push_back(0.5 * (x + 1.0));
    rule.weights.push_back(0.5 * w);
  };
  for (auto it = roots.rbegin(); it != roots.rend(); ++it)
    if (*it != 0.0) add(-*it);
  for (double x : roots) add(x);
  return rule;
}

std::vector<Atom> merge_and_sort(std::vector<Atom> atoms)
{
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && std::abs(merged.back().location - a.location) <= 1e-15)
      merged.back().weight += a.weight;
    else
      merged.push_back(a);
  }
  return merged;
}

}  // namespace

const QuadratureRule& gauss_legendre_unit()
{
  static const QuadratureRule rule = build_gauss_legendre(64);
  return rule;
}

SymmetricMeasure SymmetricMeasure::make(std::vector<Atom> atoms, std::optional<Density> density,
                                        MomentRule rule, std::string name)
{
  for (const Atom& a : atoms) {
    if (!(a.location >= 0.0 && a.location <= 1.0))
      throw DomainError("atom location " + std::to_string(a.location) + " outside [0,1]");
    if (!(a.weight > 0.0 && a.weight <= 1.0))
      throw DomainError("atom weight " + std::to_string(a.weight) + " outside (0,1]");
  }

  SymmetricMeasure nu;
  nu.atoms_ = merge_and_sort(std::move(atoms));
  nu.rule_ = rule;
  nu.name_ = std::move(name);

  const auto& as = nu.atoms_;
  for (std::size_t i = 0, k = as.size(); i < k; ++i) {
    const Atom& lo = as[i];
    const Atom& hi = as[k - 1 - i];
    if (std::abs(lo.location + hi.location - 1.0) > kTol || std::abs(lo.weight - hi.weight) > kTol)
      throw SymmetryViolation("atom at " + std::to_string(lo.location) +
                              " has no mirror partner of equal weight at " +
                              std::to_string(1.0 - lo.location));
  }

  double mass = 0.0;
  for (const Atom& a : as) mass += a.weight;

  if (density) {
    const QuadratureRule& gl = gauss_legendre_unit();
    double quad_mass = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double x = gl.nodes[q];
      const double d = density->fn(x);
      const double d_mirror = density->fn(1.0 - x);
      if (d < 0.0) throw DomainError("negative density at " + std::to_string(x));
      if (std::abs(d - d_mirror) > kTol)
        throw SymmetryViolation("density is not symmetric at " + std::to_string(x));
      nu.nodes_.push_back(x);
      nu.density_weights_.push_back(gl.weights[q] * d);
      quad_mass += gl.weights[q] * d;
    }
    if (std::abs(quad_mass - density->mass) > 1e-10)
      throw MassError("declared density mass " + std::to_string(density->mass) +
                      " disagrees with quadrature " + std::to_string(quad_mass));
    nu.has_density_ = true;
    mass += density->mass;
  }

  if (std::abs(mass - 1.0) > kTol)
    throw MassError("total mass is " + std::to_string(mass) + ", expected 1");
  return nu;
}

SymmetricMeasure SymmetricMeasure::trapezoid()
{
  return make({{0.0, 0.5}, {1.0, 0.5}}, std::nullopt, MomentRule::none, "trapezoid");
}

SymmetricMeasure SymmetricMeasure::simpson()
{
  return make({{0.0, 1.0 / 6.0}, {0.5, 2.0 / 3.0}, {1.0, 1.0 / 6.0}}, std::nullopt,
              MomentRule::none, "simpson");
}

SymmetricMeasure SymmetricMeasure::midpoint()
{
  return make({{0.5, 1.0}}, std::nullopt, MomentRule::none, "midpoint");
}

SymmetricMeasure SymmetricMeasure::lebesgue()
{
  return make({}, Density{[](double) { return 1.0; }, 1.0}, MomentRule::lebesgue, "lebesgue");
}

SymmetricMeasure SymmetricMeasure::by_name(const std::string& keyword)
{
  if (keyword == "trapezoid") return trapezoid();
  if (keyword == "simpson") return simpson();
  if (keyword == "midpoint") return midpoint();
  if (keyword == "lebesgue") return lebesgue();
  throw DomainError("unknown measure keyword '" + keyword + "'");
}

double SymmetricMeasure::moment(int k) const
{
  if (k < 0) throw DomainError("moment order must be non-negative");
  if (rule_ == MomentRule::lebesgue) return 1.0 / (k + 1);
  return integrate([k](double a) { return std::pow(a, k); });
}

double SymmetricMeasure::central_even_moment(int h) const
{
  if (h < 0) throw DomainError("order must be non-negative");
  if (rule_ == MomentRule::lebesgue) return 1.0 / ((2.0 * h + 1.0) * std::pow(4.0, h));
  return integrate([h](double a) { return std::pow(a - 0.5, 2 * h); });
}

EllResult ell_of(const SymmetricMeasure& nu, int ell_max, double tol)
{
  if (ell_max < 1) throw DomainError("ell_max must be at least 1");
  for (int j = 0; j < ell_max; ++j) {
    if (std::abs(nu.moment(2 * j) - 1.0 / (2 * j + 1)) > tol) return {j, ell_max};
  }
  return {EllResult::infinite, ell_max};
}

double kv_constant(const SymmetricMeasure& nu, int h)
{
  if (h < 1) throw DomainError("k_{nu,h} requires h >= 1");
  const double lebesgue_part = 1.0 / ((2.0 * h + 1.0) * std::pow(4.0, h));
  return (lebesgue_part - nu.central_even_moment(h)) / std::tgamma(2.0 * h + 1.0);
}

}  // namespace fbmr
