// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace revcal {

namespace {

void require(bool ok, std::string_view field, std::string_view what) {
  if (!ok) throw InvalidInput(fmt::format("{}: {}", field, what));
}

void require_finite(double x, std::string_view field) {
  require(std::isfinite(x), field, "must be finite");
}

}  // namespace

RubricSchema RubricSchema::make(std::vector<CriterionBounds> bounds,
                                std::optional<std::size_t> overall_index) {
  require(!bounds.empty(), "criteria_count", "rubric needs at least one criterion");
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    const auto field = fmt::format("bounds[{}]", k);
    require_finite(bounds[k].lo, field);
    require_finite(bounds[k].hi, field);
    require(bounds[k].lo < bounds[k].hi, field, "lower bound must be below upper bound");
  }
  if (overall_index) {
    require(*overall_index < bounds.size(), "overall_index", "out of range for criteria_count");
  }
  RubricSchema s;
  s.bounds_ = std::move(bounds);
  s.overall_index_ = overall_index;
  return s;
}

RubricSchema RubricSchema::scalar(double lo, double hi) { return make({{lo, hi}}, 0); }

double RubricSchema::diameter() const {
  if (bounds_.size() == 1) return bounds_.front().width();
  double acc = 0.0;
  for (const auto& b : bounds_) acc += b.width() * b.width();
  return std::sqrt(acc);
}

RubricVector RubricVector::raw(std::vector<double> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    require_finite(values[k], fmt::format("values[{}]", k));
  }
  RubricVector v;
  v.values_ = std::move(values);
  return v;
}

RubricVector RubricVector::make(std::vector<double> values, const RubricSchema& schema) {
  require(values.size() == schema.criteria_count(), "values",
          fmt::format("length {} does not match schema K={}", values.size(),
                      schema.criteria_count()));
  auto v = raw(std::move(values));
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto& b = schema.bounds()[k];
    require(v[k] >= b.lo && v[k] <= b.hi, fmt::format("values[{}]", k),
            fmt::format("{} outside [{}, {}]", v[k], b.lo, b.hi));
  }
  return v;
}

bool RubricVector::fits(const RubricSchema& schema) const {
  if (values_.size() != schema.criteria_count()) return false;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const auto& b = schema.bounds()[k];
    if (values_[k] < b.lo || values_[k] > b.hi) return false;
  }
  return true;
}

ReviewRecord ReviewRecord::make(std::string reviewer_id, RubricVector rubric, bool integrity_flag,
                                std::optional<std::string> feedback,
                                std::optional<double> overall) {
  require(!reviewer_id.empty(), "reviewer_id", "must be non-empty");
  if (overall) require_finite(*overall, "overall");
  return ReviewRecord{std::move(reviewer_id), std::move(rubric), std::move(feedback),
                      integrity_flag, overall};
}

ReviewPanel ReviewPanel::make(std::string submission_id, std::vector<ReviewRecord> reviews,
                              const RubricSchema& schema, std::optional<bool> fabrication_label) {
  require(!submission_id.empty(), "submission_id", "must be non-empty");
  require(!reviews.empty(), "reviews", "panel needs at least one review");
  std::set<std::string_view> seen;
  for (const auto& r : reviews) {
    require(!r.reviewer_id.empty(), "reviewer_id", "must be non-empty");
    require(seen.insert(r.reviewer_id).second, "reviewer_id",
            fmt::format("duplicate reviewer '{}' in panel '{}'", r.reviewer_id, submission_id));
    require(r.rubric.fits(schema), "rubric",
            fmt::format("review by '{}' in panel '{}' does not fit the rubric schema",
                        r.reviewer_id, submission_id));
  }
  ReviewPanel p;
  p.submission_id_ = std::move(submission_id);
  p.reviews_ = std::move(reviews);
  p.fabrication_label_ = fabrication_label;
  return p;
}

ReviewPanel ReviewPanel::prior_only(std::string submission_id,
                                    std::optional<bool> fabrication_label) {
  require(!submission_id.empty(), "submission_id", "must be non-empty");
  ReviewPanel p;
  p.submission_id_ = std::move(submission_id);
  p.fabrication_label_ = fabrication_label;
  return p;
}

const ReviewRecord* ReviewPanel::find(std::string_view reviewer_id) const {
  auto it = std::find_if(reviews_.begin(), reviews_.end(),
                         [&](const ReviewRecord& r) { return r.reviewer_id == reviewer_id; });
  return it == reviews_.end() ? nullptr : &*it;
}

ReviewerWeights ReviewerWeights::make(std::vector<double> weights) {
  require(!weights.empty(), "weights", "must be non-empty");
  for (std::size_t m = 0; m < weights.size(); ++m) {
    const auto field = fmt::format("weights[{}]", m);
    require_finite(weights[m], field);
    require(weights[m] >= 0.0, field, "must be non-negative");
  }
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  require(std::abs(sum - 1.0) <= 1e-9, "weights",
          fmt::format("sum {} is not 1 within 1e-9", sum));
  for (auto& w : weights) w /= sum;
  ReviewerWeights out;
  out.weights_ = std::move(weights);
  return out;
}

ReviewerWeights ReviewerWeights::uniform(std::size_t m) {
  require(m >= 1, "weights", "uniform weights need at least one reviewer");
  ReviewerWeights out;
  out.weights_.assign(m, 1.0 / static_cast<double>(m));
  return out;
}

ScoringFunctional ScoringFunctional::linear(std::vector<double> coefficients) {
  require(!coefficients.empty(), "coefficients", "must be non-empty");
  double sq = 0.0;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    require_finite(coefficients[k], fmt::format("coefficients[{}]", k));
    sq += coefficients[k] * coefficients[k];
  }
  require(sq > 0.0, "lipschitz_constant", "linear coefficients must not all be zero");
  ScoringFunctional f;
  f.lipschitz_ = std::sqrt(sq);
  f.variant_ = Linear{std::move(coefficients)};
  return f;
}

ScoringFunctional ScoringFunctional::overall_pick() {
  ScoringFunctional f;
  f.variant_ = OverallPick{};
  f.lipschitz_ = 1.0;
  return f;
}

const std::vector<double>& ScoringFunctional::coefficients() const {
  if (!is_linear()) throw InvalidInput("functional: overall_pick has no coefficients");
  return std::get<Linear>(variant_).coefficients;
}

void ScoringFunctional::check_compatible(const RubricSchema& schema) const {
  if (is_linear()) {
    require(coefficients().size() == schema.criteria_count(), "coefficients",
            fmt::format("length {} does not match schema K={}", coefficients().size(),
                        schema.criteria_count()));
  } else {
    require(schema.overall_index().has_value(), "overall_index",
            "overall_pick requires the schema to designate an overall criterion");
  }
}

NoiseProfile NoiseProfile::make(std::vector<double> variances, double lo, double hi) {
  require(!variances.empty(), "per_reviewer_variance", "must be non-empty");
  for (std::size_t m = 0; m < variances.size(); ++m) {
    const auto field = fmt::format("per_reviewer_variance[{}]", m);
    require_finite(variances[m], field);
    require(variances[m] >= 0.0, field, "must be non-negative");
  }
  require_finite(lo, "scalar_bounds");
  require_finite(hi, "scalar_bounds");
  require(lo < hi, "scalar_bounds", "a must be below b");
  return NoiseProfile{std::move(variances), lo, hi};
}

NoiseProfile NoiseProfile::identical(std::size_t m, double variance, double lo, double hi) {
  return make(std::vector<double>(m, variance), lo, hi);
}

BoundInputs BoundInputs::make(double sigma_w_sq, double c_max,
                              std::vector<double> projected_variances) {
  require_finite(sigma_w_sq, "sigma_w_sq");
  require_finite(c_max, "c_max");
  require(sigma_w_sq >= 0.0, "sigma_w_sq", "must be non-negative");
  require(c_max >= 0.0, "c_max", "must be non-negative");
  for (std::size_t m = 0; m < projected_variances.size(); ++m) {
    require(std::isfinite(projected_variances[m]) && projected_variances[m] >= 0.0,
            fmt::format("projected_variances[{}]", m), "must be finite and non-negative");
  }
  return BoundInputs{sigma_w_sq, c_max, std::move(projected_variances)};
}

CalibrationRecord CalibrationRecord::make(std::string submission_id, double agent_score,
                                          bool human_accept, std::string status) {
  require(!submission_id.empty(), "submission_id", "must be non-empty");
  require_finite(agent_score, "agent_score");
  return CalibrationRecord{std::move(submission_id), agent_score, human_accept,
                           std::move(status)};
}

CalibrationRecord CalibrationRecord::make(std::string submission_id, double agent_score,
                                          bool human_accept, std::string status,
                                          std::span<const std::string> vocabulary) {
  require(std::find(vocabulary.begin(), vocabulary.end(), status) != vocabulary.end(), "status",
          fmt::format("'{}' is not in the status vocabulary", status));
  return make(std::move(submission_id), agent_score, human_accept, std::move(status));
}

DecisionThresholds DecisionThresholds::make(double tau_rate, double tau_05, double target_rate,
                                            std::int64_t calibration_size,
                                            std::string score_source) {
  require(!std::isnan(tau_rate), "tau_rate", "must not be NaN");
  require(!std::isnan(tau_05), "tau_05", "must not be NaN");
  require(target_rate > 0.0 && target_rate < 1.0, "target_rate", "must lie in (0, 1)");
  require(calibration_size >= 1, "calibration_size", "must be at least 1");
  return DecisionThresholds{tau_rate, tau_05, target_rate, calibration_size,
                            std::move(score_source)};
}

GaussianPosterior GaussianPosterior::make(double mean, double variance) {
  require_finite(mean, "mean");
  require(std::isfinite(variance) && variance > 0.0, "variance", "must be finite and positive");
  GaussianPosterior p;
  p.mean_ = mean;
  p.variance_ = variance;
  return p;
}

double GaussianPosterior::sd() const { return std::sqrt(variance_); }

ConfusionCounts ConfusionCounts::make(std::int64_t tp, std::int64_t fp, std::int64_t tn,
                                      std::int64_t fn) {
  require(tp >= 0, "tp", "must be non-negative");
  require(fp >= 0, "fp", "must be non-negative");
  require(tn >= 0, "tn", "must be non-negative");
  require(fn >= 0, "fn", "must be non-negative");
  require(tp + fp + tn + fn >= 1, "tp+fp+tn+fn", "at least one count required");
  return ConfusionCounts{tp, fp, tn, fn};
}

}  // namespace revcal
