#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fbmr {

/// Uniform grid j/n, j = 0..⌊nT⌋, for fBm with Hurst index H ∈ (0, ½).
struct GridSpec {
  double hurst;
  long n;
  double horizon;

  /// Throws DomainError unless H ∈ (0,½), n ≥ 1, T > 0 and ⌊nT⌋ ≥ 1.
  void validate() const;

  /// ⌊nT⌋, the number of increments.
  long steps() const;
  long points() const { return steps() + 1; }

  /// ⌊nt⌋ for t ∈ [0, T]; throws DomainError otherwise.
  long index_of(double t) const;
};

/// ⌊x⌋ with a relative guard so that e.g. 100·0.29 maps to 29.
long floor_index(double x);

/// R(s,t) = ½(s^{2H} + t^{2H} − |t−s|^{2H}).
double covariance(double hurst, double s, double t);

/// Lag-j correlation of unit-variance fractional Gaussian noise,
/// ½(|j+1|^{2H} + |j−1|^{2H} − 2|j|^{2H}).
double rho(double hurst, long j);

enum class SamplerMethod { cholesky, circulant };

std::string to_string(SamplerMethod method);
SamplerMethod sampler_method_from_string(const std::string& name);

/// Exact sampler of (B_0, B_{1/n}, …, B_{⌊nT⌋/n}). Setup (factorisation or
/// embedding spectrum) happens once; `sample` is then a pure function of
/// (seed, path index) and is safe to call from several threads.
class PathSampler {
 public:
  static constexpr long kCholeskyCap = 8192;

  PathSampler(const GridSpec& grid, SamplerMethod method);
  ~PathSampler();
  PathSampler(PathSampler&&) noexcept;
  PathSampler& operator=(PathSampler&&) noexcept;

  const GridSpec& grid() const { return grid_; }
  SamplerMethod method() const { return method_; }

  /// Writes path `index` of the stream `seed` into `out` (size points()).
  void sample(std::uint64_t seed, std::uint64_t index, std::span<double> out) const;

  /// Eigenvalues of the circulant embedding (empty for Cholesky).
  std::span<const double> embedding_spectrum() const;

 private:
  struct Impl;
  GridSpec grid_;
  SamplerMethod method_;
  std::unique_ptr<Impl> impl_;
};

/// A batch of sampled paths stored row-major, one row of points() values per path.
class PathBatch {
 public:
  PathBatch(GridSpec grid, std::size_t count, std::uint64_t seed, SamplerMethod method,
            std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t count() const { return count_; }
  std::uint64_t seed() const { return seed_; }
  SamplerMethod method() const { return method_; }

  std::span<const double> path(std::size_t p) const;

  /// CSV with header `path,j,t,value`.
  void write_csv(std::ostream& os) const;

 private:
  GridSpec grid_;
  std::size_t count_;
  std::uint64_t seed_;
  SamplerMethod method_;
  std::vector<double> values_;
};

PathBatch sample_paths(const GridSpec& grid, std::size_t count, std::uint64_t seed,
                       SamplerMethod method, unsigned threads = 1);

enum class InnerProductKind {
  inc_ind,    // ⟨∂_{j/n}, ε_t⟩, arg is a time t
  inc_inc,    // ⟨∂_{j/n}, ∂_{i/n}⟩, arg is a grid index i
  inc_tilde,  // ⟨∂_{j/n}, ε̃_{i/n}⟩, arg is a grid index i
};

/// Closed-form inner products in the fBm Hilbert space. Throws IndexError
/// when j or i falls outside the grid.
double grid_inner_product(InnerProductKind kind, const GridSpec& grid, long j, double arg);

double inc_indicator(const GridSpec& grid, long j, double t);
double inc_increment(const GridSpec& grid, long j, long i);
double inc_tilde(const GridSpec& grid, long j, long i);

}  // namespace fbmr
