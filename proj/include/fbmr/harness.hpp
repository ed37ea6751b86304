#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbmr/fbm.hpp"
#include "fbmr/measure.hpp"
#include "fbmr/riemann.hpp"
#include "fbmr/stats.hpp"

namespace fbmr {

inline constexpr const char* kLibraryVersion = "1.0.0";

enum class LemmaKind { L21a, L21b, L22_26, L22_27, L22_28, phi4moment };

std::string to_string(LemmaKind lemma);
LemmaKind lemma_from_string(const std::string& name);

struct ExperimentConfig {
  int schema_version = 1;
  std::string experiment;
  SymmetricMeasure measure = SymmetricMeasure::trapezoid();
  std::string measure_spec = "\"trapezoid\"";  // JSON text as given
  FunctionFamily function = FunctionFamily::monomial(3);
  std::string function_spec = "{\"kind\":\"monomial\",\"degree\":3}";
  std::optional<int> ell;
  std::optional<double> hurst;
  std::vector<long> n_values{1024};
  std::vector<long> m_values;
  std::vector<double> hurst_values;  // lemma scans; defaults to the critical H
  std::vector<int> r_values;         // L21b powers; defaults to {1, 2ℓ+1}
  double horizon = 1.0;
  std::vector<double> times{1.0};
  std::size_t paths = 1000;
  std::uint64_t seed = 42;
  SamplerMethod method = SamplerMethod::circulant;
  std::vector<std::string> statistics;  // empty selects everything
  std::vector<LemmaKind> lemmas;
  std::optional<int> power;  // r for the power-sum experiment, default 2ℓ+1
  std::optional<int> h;      // Φ order for phi4moment, default ℓ
  bool include_timing = false;
  unsigned threads = 1;  // execution knob only; never echoed

  /// ℓ from the explicit field, else from the measure. Throws InfiniteEll.
  int resolved_ell() const;
  /// H from the explicit field, else 1/(4ℓ+2).
  double resolved_hurst() const;
};

struct StatRecord {
  std::string name;
  double estimate = 0.0;
  std::optional<double> standard_error;
  bool exact = false;
  std::optional<double> statistic;
  std::optional<double> p_value;
  std::optional<bool> pass;
  bool control = false;
};

struct ExperimentReport {
  std::string experiment;
  ExperimentConfig config;
  std::vector<StatRecord> records;
  std::optional<double> wall_clock_seconds;

  bool all_controls_pass() const;
  bool all_pass() const;
  /// Throws IndexError when absent.
  const StatRecord& find(const std::string& name) const;
  bool contains(const std::string& name) const;
};

/// Power-sum CLT at the critical H: finite-n variance against the exact and
/// limiting oracles, KS normality and asymptotic independence from B_T.
ExperimentReport power_sum_clt_experiment(const ExperimentConfig& config);

/// End-to-end check of the change-of-variable formula in law.
ExperimentReport limit_law_experiment(const ExperimentConfig& config);

/// Exact (or, for phi4moment, Monte Carlo) scans of lemma bound ratios.
ExperimentReport lemma_bound_scan(LemmaKind lemma, const ExperimentConfig& config);

/// All lemmas listed in config.lemmas in one report.
ExperimentReport lemma_scan_experiment(const ExperimentConfig& config);

/// Decay of the Taylor remainder R_n and the Markov-bound diagnostic.
ExperimentReport residual_decay_experiment(const ExperimentConfig& config);

/// Summary of every decomposition term over simulated paths.
ExperimentReport riemann_experiment(const ExperimentConfig& config);

/// Gaussian moment μ_k = E[Z^k].
double gaussian_moment(int k);

/// Applies config.statistics (name suffix filter); controls are always kept.
void apply_statistic_selection(ExperimentReport& report);

}  // namespace fbmr
