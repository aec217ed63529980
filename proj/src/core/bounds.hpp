// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef REVCAL_CORE_BOUNDS_HPP
#define REVCAL_CORE_BOUNDS_HPP

#include <cstdint>
#include <span>

#include "core/types.hpp"

namespace revcal::bounds {

/// One-sided Bernstein-McDiarmid tail
///   P(s - mu_s >= t) <= exp(-t^2 / (2 sigma_w^2 + (2/3) c_max t)).
/// When sigma_w^2 = c_max = 0 the score is noiseless and the bound is 0.
double tail_bound(double t, const BoundInputs& inputs);

/// Misclassification bound at margin gamma = |mu_s - tau|; same form as the
/// tail evaluated at t = gamma.
double margin_misclassification_bound(double gamma, const BoundInputs& inputs);

/// Uniform weights, identical per-review variance sigma^2, scores in [a, b]:
///   exp(-M gamma^2 / (2 sigma^2 + (2/3)(b - a) gamma)).
double scalar_uniform_bound(std::int64_t m_reviewers, double gamma, double sigma_sq,
                            double range_width);

/// sigma_w^2 = sum w_m^2 sigma_m^2 and c_max = max_m w_m (b - a).
BoundInputs scalar_bound_inputs(const ReviewerWeights& weights, const NoiseProfile& noise);

/// Vector-rubric inputs: c_max = max_m L_phi w_m sqrt(sum_k (b_k - a_k)^2) and
/// sigma_w^2 set to its upper bound L_phi^2 sum_m w_m^2 lambda_max(Sigma_m).
/// The stored variance is that upper bound, not the true Var[s].
BoundInputs rubric_bound_inputs(const ReviewerWeights& weights, const RubricSchema& schema,
                                const ScoringFunctional& functional,
                                std::span<const double> lambda_max);

/// Uniform acceptance-rate deviation sqrt(log(4/delta) / (2 N_cal)).
double dkw_bound(std::int64_t n_cal, double delta);

/// Threshold error of the inverted isotonic curve: min(Delta, eps_pi / c_min).
double tau05_error_bound(double eps_pi, double c_min, double flat_width);

}  // namespace revcal::bounds

#endif  // REVCAL_CORE_BOUNDS_HPP
