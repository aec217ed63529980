// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef REVCAL_CORE_METRICS_HPP
#define REVCAL_CORE_METRICS_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace revcal::metrics {

/// Fraction of accept decisions.
double acpt(std::span<const bool> decisions);

/// ICR-m: fraction of panels in which `reviewer_id` raised an integrity
/// concern. The reviewer must appear in every panel.
double icr_per_model(std::span<const ReviewPanel> panels, std::string_view reviewer_id);

/// ICR@M: fraction of panels with at least one integrity concern.
double icr_any(std::span<const ReviewPanel> panels);

/// Among panels flagged by `reviewer_id`, the share scored at or above tau.
/// Absent when the reviewer flagged nothing.
std::optional<double> conflict_rate(std::span<const ReviewPanel> panels,
                                    const std::map<std::string, double>& scores, double tau,
                                    std::string_view reviewer_id);

struct DetectorMetrics {
  std::optional<double> tpr;  // absent without positives
  std::optional<double> fpr;  // absent without negatives
  double accuracy;
  double f1;                  // 0 when tp = 0
};

DetectorMetrics detector_metrics(const ConfusionCounts& counts);

/// Tallies a binary predictor against ground-truth labels.
ConfusionCounts confusion(std::span<const bool> predicted, std::span<const bool> actual);

/// Reviewer ids in first-appearance order across the corpus.
std::vector<std::string> reviewer_ids(std::span<const ReviewPanel> panels);

}  // namespace revcal::metrics

#endif  // REVCAL_CORE_METRICS_HPP
