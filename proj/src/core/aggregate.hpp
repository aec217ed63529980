// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef REVCAL_CORE_AGGREGATE_HPP
#define REVCAL_CORE_AGGREGATE_HPP

#include <span>
#include <vector>

#include "core/types.hpp"

namespace revcal::aggregate {

/// Weighted average of the panel's rubric vectors.
struct ConsensusRubric {
  std::vector<double> values;
  friend bool operator==(const ConsensusRubric&, const ConsensusRubric&) = default;
};

struct Decision {
  double score;
  double threshold;
  bool accept;    // score >= threshold, inclusive
  double margin;  // score - threshold
};

ConsensusRubric consensus_rubric(const ReviewPanel& panel, const ReviewerWeights& weights);

/// Applies phi to a consensus rubric. The schema supplies the overall index
/// for the overall_pick form.
double score(const ConsensusRubric& consensus, const ScoringFunctional& functional,
             const RubricSchema& schema);

Decision decide(double score, double tau);

/// Precision weights w_m proportional to 1 / c_m.
ReviewerWeights gls_weights(std::span<const double> projected_variances);

/// V_w = sum_m w_m^2 c_m.
double panel_variance(const ReviewerWeights& weights, std::span<const double> projected_variances);

}  // namespace revcal::aggregate

#endif  // REVCAL_CORE_AGGREGATE_HPP
