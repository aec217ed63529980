// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/metrics.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace revcal::metrics {

double acpt(std::span<const bool> decisions) {
  if (decisions.empty()) throw InvalidInput("decisions: must be non-empty");
  const auto n = std::count(decisions.begin(), decisions.end(), true);
  return static_cast<double>(n) / static_cast<double>(decisions.size());
}

double icr_per_model(std::span<const ReviewPanel> panels, std::string_view reviewer_id) {
  if (panels.empty()) throw InvalidInput("panels: must be non-empty");
  std::size_t flagged = 0;
  for (const auto& p : panels) {
    const auto* r = p.find(reviewer_id);
    if (r == nullptr) {
      throw InvalidInput(fmt::format("reviewer_id: '{}' is missing from panel '{}'", reviewer_id,
                                     p.submission_id()));
    }
    if (r->integrity_flag) ++flagged;
  }
  return static_cast<double>(flagged) / static_cast<double>(panels.size());
}

double icr_any(std::span<const ReviewPanel> panels) {
  if (panels.empty()) throw InvalidInput("panels: must be non-empty");
  const auto n = std::count_if(panels.begin(), panels.end(), [](const ReviewPanel& p) {
    return std::any_of(p.reviews().begin(), p.reviews().end(),
                       [](const ReviewRecord& r) { return r.integrity_flag; });
  });
  return static_cast<double>(n) / static_cast<double>(panels.size());
}

std::optional<double> conflict_rate(std::span<const ReviewPanel> panels,
                                    const std::map<std::string, double>& scores, double tau,
                                    std::string_view reviewer_id) {
  std::vector<bool> accepted;
  for (const auto& p : panels) {
    const auto* r = p.find(reviewer_id);
    if (r == nullptr || !r->integrity_flag) continue;
    auto it = scores.find(p.submission_id());
    if (it == scores.end()) {
      throw InvalidInput(
          fmt::format("scores: no score for flagged panel '{}'", p.submission_id()));
    }
    accepted.push_back(it->second >= tau);
  }
  if (accepted.empty()) return std::nullopt;
  const auto n = std::count(accepted.begin(), accepted.end(), true);
  return static_cast<double>(n) / static_cast<double>(accepted.size());
}

DetectorMetrics detector_metrics(const ConfusionCounts& counts) {
  const auto c = ConfusionCounts::make(counts.tp, counts.fp, counts.tn, counts.fn);
  DetectorMetrics m{};
  if (c.tp + c.fn > 0) m.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (c.fp + c.tn > 0) m.fpr = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  m.f1 = c.tp == 0 ? 0.0
                   : static_cast<double>(2 * c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn);
  return m;
}

ConfusionCounts confusion(std::span<const bool> predicted, std::span<const bool> actual) {
  if (predicted.size() != actual.size()) {
    throw InvalidInput("predicted: length does not match labels");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (actual[i]) {
      (predicted[i] ? c.tp : c.fn) += 1;
    } else {
      (predicted[i] ? c.fp : c.tn) += 1;
    }
  }
  return ConfusionCounts::make(c.tp, c.fp, c.tn, c.fn);
}

std::vector<std::string> reviewer_ids(std::span<const ReviewPanel> panels) {
  std::vector<std::string> ids;
  for (const auto& p : panels) {
    for (const auto& r : p.reviews()) {
      if (std::find(ids.begin(), ids.end(), r.reviewer_id) == ids.end()) {
        ids.push_back(r.reviewer_id);
      }
    }
  }
  return ids;
}

}  // namespace revcal::metrics
