#include "fbmr/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <mutex>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <fftw3.h>

#include "fbmr/errors.hpp"
#include "fbmr/parallel.hpp"
#include "fbmr/random.hpp"

namespace fbmr {

unsigned default_thread_count()
{
  if (const char* env = std::getenv("FBMR_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

long floor_index(double x)
{
  return static_cast<long>(std::floor(x + 1e-9 * std::max(1.0, std::abs(x))));
}

void GridSpec::validate() const
{
  if (!(hurst > 0.0 && hurst < 0.5))
    throw DomainError("Hurst parameter must lie in (0, 1/2), got " + std::to_string(hurst));
  if (n < 1) throw DomainError("n must be a positive integer");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  if (steps() < 1) throw DomainError("grid needs at least two points (nT >= 1)");
}

long GridSpec::steps() const { return floor_index(static_cast<double>(n) * horizon); }

long GridSpec::index_of(double t) const
{
  if (!(t >= 0.0) || t > horizon * (1.0 + 1e-12))
    throw DomainError("time " + std::to_string(t) + " outside [0, T]");
  return std::min(floor_index(static_cast<double>(n) * t), steps());
}

double covariance(double hurst, double s, double t)
{
  if (s < 0.0 || t < 0.0) throw DomainError("covariance requires non-negative times");
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("H must lie in (0,1)");
  const double a = 2.0 * hurst;
  return 0.5 * (std::pow(s, a) + std::pow(t, a) - std::pow(std::abs(t - s), a));
}

double rho(double hurst, long j)
{
  j = std::abs(j);
  const double a = 2.0 * hurst;
  if (j == 0) return 1.0;
  if (j == 1) return 0.5 * (std::pow(2.0, a) - 2.0);
  const double x = 1.0 / static_cast<double>(j);
  if (j < 4) {
    const double up = std::expm1(a * std::log1p(x));
    const double down = std::expm1(a * std::log1p(-x));
    return 0.5 * std::pow(static_cast<double>(j), a) * (up + down);
  }
  // (1+x)^a + (1−x)^a − 2 = 2·Σ_{k≥1} C(a,2k)·x^{2k}; for 0 < a < 2 every term
  // has the same sign, so nothing cancels.
  const double x2 = x * x;
  double coeff = 0.5 * a * (a - 1.0);
  double power = x2;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double term = coeff * power;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    coeff *= (a - 2.0 * k) * (a - 2.0 * k - 1.0) / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
    power *= x2;
  }
  return std::pow(static_cast<double>(j), a) * sum;
}

std::string to_string(SamplerMethod method)
{
  return method == SamplerMethod::cholesky ? "cholesky" : "circulant";
}

SamplerMethod sampler_method_from_string(const std::string& name)
{
  if (name == "cholesky") return SamplerMethod::cholesky;
  if (name == "circulant") return SamplerMethod::circulant;
  throw DomainError("unknown sampler method '" + name + "'");
}

namespace {

// The FFTW planner is not thread-safe; execution with new-array is.
std::mutex& fftw_planner_mutex()
{
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t size)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size)))
  {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

}  // namespace

struct PathSampler::Impl {
  long steps = 0;
  double scale = 1.0;  // n^{-H}

  // circulant
  long embed = 0;
  std::vector<double> spectrum;
  std::vector<double> amplitude;  // sqrt(λ_k / (2N))
  fftw_plan plan = nullptr;

  // cholesky
  Eigen::MatrixXd lower;

  ~Impl()
  {
    if (plan) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }

  void setup_circulant(double hurst)
  {
    embed = 2 * steps;
    FftwBuffer row(embed);
    for (long k = 0; k < embed; ++k) {
      const long lag = k <= steps ? k : embed - k;
      row.data[k][0] = rho(hurst, lag);
      row.data[k][1] = 0.0;
    }
    FftwBuffer out(embed);
    {
      std::lock_guard lock(fftw_planner_mutex());
      plan = fftw_plan_dft_1d(static_cast<int>(embed), row.data, out.data, FFTW_FORWARD,
                              FFTW_ESTIMATE);
    }
    if (!plan) throw EmbeddingError("FFTW could not create a plan");
    fftw_execute_dft(plan, row.data, out.data);

    spectrum.resize(embed);
    double max_eig = 0.0;
    for (long k = 0; k < embed; ++k) {
      spectrum[k] = out.data[k][0];
      max_eig = std::max(max_eig, spectrum[k]);
    }
    amplitude.resize(embed);
    for (long k = 0; k < embed; ++k) {
      double lambda = spectrum[k];
      if (lambda < 0.0) {
        if (lambda < -1e-10 * max_eig)
          throw EmbeddingError("circulant eigenvalue " + std::to_string(lambda) +
                               " is not clampable (max " + std::to_string(max_eig) + ")");
        lambda = 0.0;
      }
      amplitude[k] = std::sqrt(lambda / static_cast<double>(embed));
    }
  }

  void setup_cholesky(double hurst)
  {
    if (steps > kCholeskyCap)
      throw SizeError("Cholesky sampler is capped at " + std::to_string(kCholeskyCap) +
                      " increments, requested " + std::to_string(steps));
    Eigen::MatrixXd cov(steps, steps);
    for (long i = 0; i < steps; ++i)
      for (long j = 0; j < steps; ++j) cov(i, j) = rho(hurst, i - j);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw EmbeddingError("increment covariance is not positive definite");
    lower = llt.matrixL();
  }

  void increments_circulant(const CounterStream& stream, std::span<double> inc) const
  {
    FftwBuffer in(embed);
    FftwBuffer out(embed);
    std::vector<double> z(2 * static_cast<std::size_t>(embed));
    stream.normals(std::span<double>(z));
    for (long k = 0; k < embed; ++k) {
      in.data[k][0] = amplitude[k] * z[2 * k];
      in.data[k][1] = amplitude[k] * z[2 * k + 1];
    }
    fftw_execute_dft(plan, in.data, out.data);
    for (long j = 0; j < steps; ++j) inc[j] = out.data[j][0];
  }

  void increments_cholesky(const CounterStream& stream, std::span<double> inc) const
  {
    Eigen::VectorXd z(steps);
    stream.normals(std::span<double>(z.data(), steps));
    Eigen::VectorXd x = lower.triangularView<Eigen::Lower>() * z;
    for (long j = 0; j < steps; ++j) inc[j] = x[j];
  }
};

PathSampler::PathSampler(const GridSpec& grid, SamplerMethod method)
    : grid_(grid), method_(method), impl_(std::make_unique<Impl>())
{
  grid_.validate();
  impl_->steps = grid_.steps();
  impl_->scale = std::pow(static_cast<double>(grid_.n), -grid_.hurst);
  if (method == SamplerMethod::circulant)
    impl_->setup_circulant(grid_.hurst);
  else
    impl_->setup_cholesky(grid_.hurst);
}

PathSampler::~PathSampler() = default;
PathSampler::PathSampler(PathSampler&&) noexcept = default;
PathSampler& PathSampler::operator=(PathSampler&&) noexcept = default;

void PathSampler::sample(std::uint64_t seed, std::uint64_t index, std::span<double> out) const
{
  const long steps = impl_->steps;
  if (static_cast<long>(out.size()) != steps + 1)
    throw SizeError("output span must hold " + std::to_string(steps + 1) + " values");
  const CounterStream stream(seed, index);
  std::span<double> inc = out.subspan(1);
  if (method_ == SamplerMethod::circulant)
    impl_->increments_circulant(stream, inc);
  else
    impl_->increments_cholesky(stream, inc);
  out[0] = 0.0;
  double level = 0.0;
  for (long j = 0; j < steps; ++j) {
    level += impl_->scale * inc[j];
    out[j + 1] = level;
  }
}

std::span<const double> PathSampler::embedding_spectrum() const { return impl_->spectrum; }

PathBatch::PathBatch(GridSpec grid, std::size_t count, std::uint64_t seed, SamplerMethod method,
                     std::vector<double> values)
    : grid_(grid), count_(count), seed_(seed), method_(method), values_(std::move(values))
{
  if (values_.size() != count_ * static_cast<std::size_t>(grid_.points()))
    throw SizeError("path batch storage does not match count x points");
}

std::span<const double> PathBatch::path(std::size_t p) const
{
  if (p >= count_) throw IndexError("path index out of range");
  const std::size_t width = static_cast<std::size_t>(grid_.points());
  return std::span<const double>(values_).subspan(p * width, width);
}

void PathBatch::write_csv(std::ostream& os) const
{
  os << "path,j,t,value\n";
  os << std::setprecision(17);
  for (std::size_t p = 0; p < count_; ++p) {
    const auto row = path(p);
    for (std::size_t j = 0; j < row.size(); ++j)
      os << p << ',' << j << ',' << static_cast<double>(j) / static_cast<double>(grid_.n) << ','
         << row[j] << '\n';
  }
}

PathBatch sample_paths(const GridSpec& grid, std::size_t count, std::uint64_t seed,
                       SamplerMethod method, unsigned threads)
{
  if (count < 1) throw SizeError("path count must be at least 1");
  const PathSampler sampler(grid, method);
  const std::size_t width = static_cast<std::size_t>(sampler.grid().points());
  std::vector<double> values(count * width);
  parallel_for(count, threads, [&](std::size_t p) {
    sampler.sample(seed, p, std::span<double>(values).subspan(p * width, width));
  });
  return PathBatch(sampler.grid(), count, seed, method, std::move(values));
}

namespace {

void check_increment_index(const GridSpec& grid, long j, const char* what)
{
  if (j < 0 || j >= grid.steps())
    throw IndexError(std::string(what) + " index " + std::to_string(j) + " outside [0, " +
                     std::to_string(grid.steps() - 1) + "]");
}

}  // namespace

double inc_indicator(const GridSpec& grid, long j, double t)
{
  check_increment_index(grid, j, "increment");
  if (!(t >= 0.0) || t > grid.horizon * (1.0 + 1e-12))
    throw IndexError("time " + std::to_string(t) + " outside [0, T]");
  const double n = static_cast<double>(grid.n);
  return covariance(grid.hurst, (j + 1) / n, t) - covariance(grid.hurst, j / n, t);
}

double inc_increment(const GridSpec& grid, long j, long i)
{
  check_increment_index(grid, j, "increment");
  check_increment_index(grid, i, "increment");
  return std::pow(static_cast<double>(grid.n), -2.0 * grid.hurst) * rho(grid.hurst, i - j);
}

double inc_tilde(const GridSpec& grid, long j, long i)
{
  check_increment_index(grid, j, "increment");
  check_increment_index(grid, i, "midpoint");
  const double n = static_cast<double>(grid.n);
  return 0.5 * (inc_indicator(grid, j, i / n) + inc_indicator(grid, j, (i + 1) / n));
}

double grid_inner_product(InnerProductKind kind, const GridSpec& grid, long j, double arg)
{
  switch (kind) {
    case InnerProductKind::inc_ind:
      return inc_indicator(grid, j, arg);
    case InnerProductKind::inc_inc:
    case InnerProductKind::inc_tilde: {
      if (arg != std::floor(arg)) throw IndexError("grid index must be an integer");
      const long i = static_cast<long>(arg);
      return kind == InnerProductKind::inc_inc ? inc_increment(grid, j, i) : inc_tilde(grid, j, i);
    }
  }
  throw DomainError("unknown inner product kind");
}

}  // namespace fbmr
