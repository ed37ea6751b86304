#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fbmr {

struct Atom {
  double location;
  double weight;
};

// Absolutely continuous part of a measure. `mass` is the declared total mass
// and is checked against quadrature at construction.
struct Density {
  std::function<double(double)> fn;
  double mass;
};

enum class MomentRule { none, lebesgue };

/// A symmetric probability measure on [0,1]: finitely many atoms plus an
/// optional density. Immutable once built.
class SymmetricMeasure {
 public:
  /// Validates symmetry and unit mass; throws SymmetryViolation or MassError.
  static SymmetricMeasure make(std::vector<Atom> atoms,
                               std::optional<Density> density = std::nullopt,
                               MomentRule rule = MomentRule::none,
                               std::string name = "custom");

  static SymmetricMeasure trapezoid();
  static SymmetricMeasure simpson();
  static SymmetricMeasure midpoint();
  static SymmetricMeasure lebesgue();

  /// Built-in keyword lookup (`trapezoid`, `simpson`, `midpoint`, `lebesgue`).
  static SymmetricMeasure by_name(const std::string& keyword);

  /// ∫ α^k ν(dα).
  double moment(int k) const;

  /// ∫ g dν. Atoms are summed exactly; the density part uses 64-node
  /// Gauss-Legendre on ½(g(α) + g(1−α)).
  template <class G>
  double integrate(G&& g) const
  {
    double sum = 0.0;
    for (const Atom& a : atoms_) sum += a.weight * g(a.location);
    if (has_density_) {
      double dens = 0.0;
      for (std::size_t q = 0; q < nodes_.size(); ++q)
        dens += density_weights_[q] * 0.5 * (g(nodes_[q]) + g(1.0 - nodes_[q]));
      sum += dens;
    }
    return sum;
  }

  /// ∫ (α − ½)^(2h) ν(dα).
  double central_even_moment(int h) const;

  std::span<const Atom> atoms() const { return atoms_; }
  bool has_density() const { return has_density_; }
  MomentRule rule() const { return rule_; }
  const std::string& name() const { return name_; }

 private:
  SymmetricMeasure() = default;

  std::vector<Atom> atoms_;
  bool has_density_ = false;
  // Quadrature nodes on [0,1] and node weights already multiplied by the density.
  std::vector<double> nodes_;
  std::vector<double> density_weights_;
  MomentRule rule_ = MomentRule::none;
  std::string name_;
};

struct EllResult {
  static constexpr int infinite = -1;
  int value;  // ℓ(ν), or `infinite`
  int cap;

  bool is_infinite() const { return value == infinite; }
};

/// Largest ℓ ≤ ell_max with ∫ α^(2j) dν = 1/(2j+1) for all j < ℓ.
EllResult ell_of(const SymmetricMeasure& nu, int ell_max = 8, double tol = 1e-12);

/// k_{ν,h} = [1/((2h+1)4^h) − ∫(α−½)^(2h) dν] / (2h)!
double kv_constant(const SymmetricMeasure& nu, int h);

/// 64-node Gauss-Legendre rule mapped to [0,1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const QuadratureRule& gauss_legendre_unit();

}  // namespace fbmr
