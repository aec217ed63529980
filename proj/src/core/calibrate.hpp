// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef REVCAL_CORE_CALIBRATE_HPP
#define REVCAL_CORE_CALIBRATE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace revcal::calibrate {

/// One (score bin, status) stratum.
struct Cell {
  std::size_t bin = 0;
  std::size_t status = 0;  // index into the status vocabulary
  std::int64_t population = 0;
  std::int64_t quota = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Proportional allocation of N_cal draws over (bin, status) cells.
struct StratificationPlan {
  std::vector<double> bin_edges;
  std::vector<std::string> status_vocabulary;
  std::vector<Cell> cells;  // ordered by (bin, status)
  std::int64_t n_cal = 0;
  std::int64_t total_population = 0;
  /// Number of +1 increments that were moved off a full cell.
  std::int64_t overflow_reallocations = 0;

  /// p_{b,c} N_cal for a cell.
  double target(const Cell& c) const;
};

/// Score bins are [t_{b-1}, t_b); the last bin also includes t_B. Returns the
/// bin of `score` or throws if it lies outside [t_0, t_B].
std::size_t bin_of(double score, std::span<const double> bin_edges);

/// Counts pool records per (bin, status) cell. Every cell of the grid is
/// present, including empty ones.
std::vector<Cell> cell_populations(std::span<const CalibrationRecord> pool,
                                   std::span<const double> bin_edges,
                                   std::span<const std::string> status_vocabulary);

/// Largest-remainder allocation: floor(p N_cal) per cell, then +1 to the R
/// cells with the largest fractional remainders. Ties go to the lower bin,
/// then the earlier status. A cell already at its population passes its +1
/// to the next remainder in line.
StratificationPlan allocate_quotas(std::vector<Cell> cells, std::int64_t n_cal,
                                   std::vector<double> bin_edges = {},
                                   std::vector<std::string> status_vocabulary = {});

/// Per-cell uniform draws without replacement. Output keeps pool order.
std::vector<CalibrationRecord> stratified_sample(std::span<const CalibrationRecord> pool,
                                                 const StratificationPlan& plan,
                                                 std::uint64_t seed);

/// Fraction of scores at or above tau.
double empirical_acceptance(std::span<const double> scores, double tau);

/// Smallest tau among the minimizers of |alpha_hat(tau) - target|, searched
/// over distinct observed scores plus +infinity (accept nothing).
double rate_matching_threshold(std::span<const double> scores, double target_rate);

struct CurvePoint {
  double t;
  double value;
  double weight;
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Raw tail-conditional acceptance P(accept | s >= t) at each candidate, with
/// the tail size as weight.
std::vector<CurvePoint> tail_probability_points(std::span<const CalibrationRecord> records,
                                                std::span<const double> candidate_thresholds);

/// Non-decreasing weighted least-squares fit (pool adjacent violators).
struct IsotonicCurve {
  std::vector<CurvePoint> knots;  // value holds the fitted probability
};

IsotonicCurve isotonic_fit(std::span<const CurvePoint> points);

/// Smallest knot whose fitted value reaches 1/2. Throws CalibrationInfeasible
/// when the curve never gets there.
double tau_05(const IsotonicCurve& curve);

/// Distinct scores, ascending.
std::vector<double> distinct_scores(std::span<const CalibrationRecord> records);

/// tail points over all distinct scores -> isotonic fit -> tau_05.
double fit_tau_05(std::span<const CalibrationRecord> records);

/// Both operating thresholds for a calibration set.
DecisionThresholds fit_thresholds(std::span<const CalibrationRecord> records, double target_rate,
                                  std::string score_source = "agent");

}  // namespace revcal::calibrate

#endif  // REVCAL_CORE_CALIBRATE_HPP
