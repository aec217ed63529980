// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef REVCAL_CORE_SIMULATE_HPP
#define REVCAL_CORE_SIMULATE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace revcal::simulate {

struct LatentDistribution {
  enum class Kind { kUniform, kGaussian };
  Kind kind = Kind::kUniform;
  double a = 0.0;  // lo, or mean
  double b = 1.0;  // hi, or sd

  static LatentDistribution uniform(double lo, double hi) { return {Kind::kUniform, lo, hi}; }
  static LatentDistribution gaussian(double mean, double sd) { return {Kind::kGaussian, mean, sd}; }
  /// Interval holding the latent means: [lo, hi] or mean +- 3 sd.
  std::pair<double, double> support() const;
};

enum class ClipMode { kClip, kRejectResample, kNone };

/// Synthetic papers with known latent quality reviewed by M noisy reviewers.
struct CohortSpec {
  std::int64_t n_papers = 5000;
  std::int64_t m_reviewers = 3;
  LatentDistribution latent = LatentDistribution::uniform(4.0, 7.0);
  NoiseProfile noise = NoiseProfile::identical(3, 1.0, 1.0, 10.0);
  ClipMode clip_mode = ClipMode::kClip;
  std::uint64_t seed = 42;

  /// Throws InvalidInput on a malformed spec.
  void validate() const;
  /// Latent support sits at least three noise sd inside [a, b], so clipping
  /// barely moves the mean of any reviewer score.
  bool bound_validation_ready() const;
  /// Copy with M reviewers; variances are taken cyclically from this spec.
  CohortSpec with_reviewers(std::int64_t m) const;
};

struct Paper {
  double latent;
  std::vector<double> scores;
};

struct Cohort {
  CohortSpec spec;
  std::vector<Paper> papers;
};

/// Deterministic given spec.seed. Paper i draws its latent mean and each
/// reviewer's noise from independent counter-based streams keyed by (seed, i,
/// reviewer), so the cohort does not depend on evaluation order and the first
/// m reviewers of an M-reviewer cohort coincide with an m-reviewer cohort.
Cohort generate_cohort(const CohortSpec& spec);

/// Weighted consensus of a paper's scores.
double consensus(const Paper& paper, const ReviewerWeights& weights);

struct MarginBinRow {
  double gamma_lo;
  double gamma_hi;
  std::optional<double> empirical_rate;  // absent for empty bins
  std::optional<double> std_error;
  double theoretical_bound;
  std::int64_t count;
  std::int64_t m;

  double gamma_mid() const { return 0.5 * (gamma_lo + gamma_hi); }
};

/// `n_bins` uniform bins over [0, max observed margin].
std::vector<double> default_margin_edges(const Cohort& cohort, double tau, std::size_t n_bins = 20);

/// Empirical rate of consensus decisions disagreeing with the latent decision,
/// per margin bin, beside the concentration bound at the bin midpoint.
std::vector<MarginBinRow> margin_experiment(const Cohort& cohort, const ReviewerWeights& weights,
                                            double tau, std::span<const double> bin_edges);

/// Agent scores and human outcomes for a synthetic calibration population.
/// Human acceptance follows a logistic link in the latent quality:
/// P(accept) = 1 / (1 + exp(-slope (mu - center))).
struct PopulationSpec {
  CohortSpec cohort{.n_papers = 100000};
  double link_slope = 2.0;
  double link_center = 6.0;

  void validate() const;
};

std::vector<CalibrationRecord> generate_calibration_population(const PopulationSpec& spec);

struct ThresholdErrorRow {
  std::int64_t n_cal;
  double mean_abs_error;  // over replicates that reached 1/2
  double std_error;
  std::int64_t failures;  // replicates whose curve never reached 1/2
  std::int64_t replicates;
};

struct BootstrapResult {
  double reference_tau05;
  std::vector<ThresholdErrorRow> rows;
};

/// For each n_cal, fits tau_0.5 on `replicates` subsamples drawn without
/// replacement and reports the mean absolute deviation from the tau_0.5 of
/// the full population.
BootstrapResult threshold_bootstrap(std::span<const CalibrationRecord> population,
                                    std::span<const std::int64_t> n_cal_grid,
                                    std::int64_t replicates, std::uint64_t seed);

struct VarianceRow {
  std::int64_t m;
  double var_empirical;  // sample variance of consensus - latent
  double proxy;          // (b - a)^2 / M
};

std::vector<VarianceRow> variance_experiment(const CohortSpec& base_spec,
                                             std::span<const std::int64_t> m_grid);

/// Least-squares slope of log(error) against log(n_cal).
double log_log_slope(std::span<const ThresholdErrorRow> rows);

struct CheckResult {
  bool passed = true;
  std::vector<std::string> failures;
  void fail(std::string why) {
    passed = false;
    failures.push_back(std::move(why));
  }
};

/// Every non-empty bin: empirical <= bound + se_factor * binomial se.
CheckResult check_bound_dominance(std::span<const MarginBinRow> rows, double se_factor = 3.0);

/// Bins with at least `min_count` papers: the larger panel's rate never
/// exceeds the smaller panel's. Rows must share bin edges.
CheckResult check_panel_ordering(std::span<const MarginBinRow> smaller_panel,
                                 std::span<const MarginBinRow> larger_panel,
                                 std::int64_t min_count = 50);

/// Slope within [slope_lo, slope_hi]; at most one increase between adjacent
/// grid points, and that one within the summed standard errors.
CheckResult check_threshold_decay(std::span<const ThresholdErrorRow> rows, double slope_lo = -0.6,
                                  double slope_hi = -0.4);

/// var(M_min) / var(M_max), divided by M_max / M_min, lies in
/// [ratio_lo, ratio_hi] (for M = 1 vs 3 the defaults mean a ratio in
/// [2.5, 3.5]); the proxy column equals (b - a)^2 / M exactly.
CheckResult check_variance_scaling(std::span<const VarianceRow> rows, double range_width,
                                   double ratio_lo = 2.5 / 3.0, double ratio_hi = 3.5 / 3.0);

}  // namespace revcal::simulate

#endif  // REVCAL_CORE_SIMULATE_HPP
