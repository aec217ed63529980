// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/aggregate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace revcal::aggregate {

ConsensusRubric consensus_rubric(const ReviewPanel& panel, const ReviewerWeights& weights) {
  if (panel.empty()) {
    throw InvalidInput(fmt::format("reviews: panel '{}' has no reviews", panel.submission_id()));
  }
  if (weights.size() != panel.size()) {
    throw InvalidInput(fmt::format("weights: {} weights for a panel of {} reviews",
                                   weights.size(), panel.size()));
  }
  const std::size_t k_dim = panel.reviews().front().rubric.size();
  ConsensusRubric out{std::vector<double>(k_dim, 0.0)};
  for (std::size_t m = 0; m < panel.size(); ++m) {
    const auto& r = panel.reviews()[m].rubric;
    if (r.size() != k_dim) throw InvalidInput("rubric: panel rubrics do not share one schema");
    for (std::size_t k = 0; k < k_dim; ++k) out.values[k] += weights[m] * r[k];
  }
  // Rounding can push a weighted mean a hair past the panel extremes.
  for (std::size_t k = 0; k < k_dim; ++k) {
    double lo = panel.reviews().front().rubric[k];
    double hi = lo;
    for (const auto& rev : panel.reviews()) {
      lo = std::min(lo, rev.rubric[k]);
      hi = std::max(hi, rev.rubric[k]);
    }
    out.values[k] = std::clamp(out.values[k], lo, hi);
  }
  return out;
}

double score(const ConsensusRubric& consensus, const ScoringFunctional& functional,
             const RubricSchema& schema) {
  functional.check_compatible(schema);
  if (consensus.values.size() != schema.criteria_count()) {
    throw InvalidInput("values: consensus length does not match schema");
  }
  if (!functional.is_linear()) return consensus.values[*schema.overall_index()];
  const auto& v = functional.coefficients();
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * consensus.values[k];
  return s;
}

Decision decide(double score, double tau) {
  if (!std::isfinite(score)) throw InvalidInput("score: must be finite");
  if (!std::isfinite(tau)) throw InvalidInput("tau: must be finite");
  return Decision{score, tau, score >= tau, score - tau};
}

ReviewerWeights gls_weights(std::span<const double> projected_variances) {
  if (projected_variances.empty()) throw InvalidInput("projected_variances: must be non-empty");
  std::vector<double> w(projected_variances.size());
  double total = 0.0;
  for (std::size_t m = 0; m < w.size(); ++m) {
    const double c = projected_variances[m];
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw InvalidInput(fmt::format("projected_variances[{}]: must be positive, got {}", m, c));
    }
    w[m] = 1.0 / c;
    total += w[m];
  }
  for (auto& x : w) x /= total;
  return ReviewerWeights::make(std::move(w));
}

double panel_variance(const ReviewerWeights& weights,
                      std::span<const double> projected_variances) {
  if (weights.size() != projected_variances.size()) {
    throw InvalidInput(fmt::format("projected_variances: length {} does not match {} weights",
                                   projected_variances.size(), weights.size()));
  }
  double v = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    v += weights[m] * weights[m] * projected_variances[m];
  }
  return v;
}

}  // namespace revcal::aggregate
