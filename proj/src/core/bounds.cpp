// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/bounds.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace revcal::bounds {

namespace {

double bernstein_form(double x, double sigma_w_sq, double c_max) {
  const double denom = 2.0 * sigma_w_sq + (2.0 / 3.0) * c_max * x;
  if (denom == 0.0) return 0.0;
  return std::exp(-(x * x) / denom);
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InvalidInput(fmt::format("{}: must be finite and positive, got {}", name, x));
  }
}

}  // namespace

double tail_bound(double t, const BoundInputs& inputs) {
  require_positive(t, "t");
  return bernstein_form(t, inputs.sigma_w_sq, inputs.c_max);
}

double margin_misclassification_bound(double gamma, const BoundInputs& inputs) {
  require_positive(gamma, "gamma");
  return bernstein_form(gamma, inputs.sigma_w_sq, inputs.c_max);
}

double scalar_uniform_bound(std::int64_t m_reviewers, double gamma, double sigma_sq,
                            double range_width) {
  if (m_reviewers < 1) throw InvalidInput("m_reviewers: must be at least 1");
  require_positive(gamma, "gamma");
  require_positive(range_width, "range_width");
  if (!(sigma_sq >= 0.0) || !std::isfinite(sigma_sq)) {
    throw InvalidInput("sigma_sq: must be finite and non-negative");
  }
  const double m = static_cast<double>(m_reviewers);
  return std::exp(-(m * gamma * gamma) / (2.0 * sigma_sq + (2.0 / 3.0) * range_width * gamma));
}

BoundInputs scalar_bound_inputs(const ReviewerWeights& weights, const NoiseProfile& noise) {
  if (weights.size() != noise.per_reviewer_variance.size()) {
    throw InvalidInput(fmt::format("per_reviewer_variance: {} variances for {} weights",
                                   noise.per_reviewer_variance.size(), weights.size()));
  }
  const double width = noise.range_width();
  double sigma_w_sq = 0.0;
  double c_max = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    sigma_w_sq += weights[m] * weights[m] * noise.per_reviewer_variance[m];
    c_max = std::max(c_max, weights[m] * width);
  }
  return BoundInputs::make(sigma_w_sq, c_max);
}

BoundInputs rubric_bound_inputs(const ReviewerWeights& weights, const RubricSchema& schema,
                                const ScoringFunctional& functional,
                                std::span<const double> lambda_max) {
  if (weights.size() != lambda_max.size()) {
    throw InvalidInput(fmt::format("lambda_max: {} entries for {} weights", lambda_max.size(),
                                   weights.size()));
  }
  const double lip = functional.lipschitz_constant();
  const double diameter = schema.diameter();
  double weighted = 0.0;
  double c_max = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    if (!(lambda_max[m] >= 0.0) || !std::isfinite(lambda_max[m])) {
      throw InvalidInput(fmt::format("lambda_max[{}]: must be finite and non-negative", m));
    }
    weighted += weights[m] * weights[m] * lambda_max[m];
    c_max = std::max(c_max, lip * weights[m] * diameter);
  }
  return BoundInputs::make(lip * lip * weighted, c_max);
}

double dkw_bound(std::int64_t n_cal, double delta) {
  if (n_cal < 1) throw InvalidInput("n_cal: must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidInput(fmt::format("delta: must lie in (0, 1), got {}", delta));
  }
  return std::sqrt(std::log(4.0 / delta) / (2.0 * static_cast<double>(n_cal)));
}

double tau05_error_bound(double eps_pi, double c_min, double flat_width) {
  require_positive(c_min, "c_min");
  if (!(eps_pi >= 0.0) || !std::isfinite(eps_pi)) {
    throw InvalidInput("eps_pi: must be finite and non-negative");
  }
  if (!(flat_width >= 0.0)) throw InvalidInput("flat_width: must be non-negative");
  return std::min(flat_width, eps_pi / c_min);
}

}  // namespace revcal::bounds
