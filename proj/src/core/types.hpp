// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef REVCAL_CORE_TYPES_HPP
#define REVCAL_CORE_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace revcal {

/// Raised when a value violates a domain invariant. The message names the
/// offending field.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when calibration data cannot support a requested operating point.
class CalibrationInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CriterionBounds {
  double lo;
  double hi;
  double width() const { return hi - lo; }
  friend bool operator==(const CriterionBounds&, const CriterionBounds&) = default;
};

/// Shape of a K-criterion rubric: per-criterion score ranges and an optional
/// "overall assessment" criterion.
class RubricSchema {
 public:
  static RubricSchema make(std::vector<CriterionBounds> bounds,
                           std::optional<std::size_t> overall_index = std::nullopt);
  /// Single-criterion scale [lo, hi] whose only criterion is the overall score.
  static RubricSchema scalar(double lo, double hi);

  std::size_t criteria_count() const { return bounds_.size(); }
  const std::vector<CriterionBounds>& bounds() const { return bounds_; }
  std::optional<std::size_t> overall_index() const { return overall_index_; }
  /// sqrt(sum_k (b_k - a_k)^2); exactly b - a when K = 1.
  double diameter() const;

  friend bool operator==(const RubricSchema&, const RubricSchema&) = default;

 private:
  RubricSchema() = default;
  std::vector<CriterionBounds> bounds_;
  std::optional<std::size_t> overall_index_;
};

class RubricVector {
 public:
  static RubricVector make(std::vector<double> values, const RubricSchema& schema);
  /// Unchecked against any schema; only finiteness is enforced.
  static RubricVector raw(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  bool fits(const RubricSchema& schema) const;

  friend bool operator==(const RubricVector&, const RubricVector&) = default;

 private:
  RubricVector() = default;
  std::vector<double> values_;
};

struct ReviewRecord {
  std::string reviewer_id;
  RubricVector rubric;
  std::optional<std::string> feedback;  // stored verbatim, never interpreted
  bool integrity_flag = false;
  std::optional<double> overall;        // optional scalar overall assessment

  static ReviewRecord make(std::string reviewer_id, RubricVector rubric, bool integrity_flag,
                           std::optional<std::string> feedback = std::nullopt,
                           std::optional<double> overall = std::nullopt);
  friend bool operator==(const ReviewRecord&, const ReviewRecord&) = default;
};

/// One submission and the reviews it received.
class ReviewPanel {
 public:
  /// Requires at least one review, distinct reviewer ids, and rubrics that all
  /// fit `schema`.
  static ReviewPanel make(std::string submission_id, std::vector<ReviewRecord> reviews,
                          const RubricSchema& schema,
                          std::optional<bool> fabrication_label = std::nullopt);
  /// A submission with no reviews yet; only meaningful to the Bayesian layer,
  /// where the posterior equals the prior.
  static ReviewPanel prior_only(std::string submission_id,
                                std::optional<bool> fabrication_label = std::nullopt);

  const std::string& submission_id() const { return submission_id_; }
  const std::vector<ReviewRecord>& reviews() const { return reviews_; }
  std::optional<bool> fabrication_label() const { return fabrication_label_; }
  std::size_t size() const { return reviews_.size(); }
  bool empty() const { return reviews_.empty(); }
  const ReviewRecord* find(std::string_view reviewer_id) const;

  friend bool operator==(const ReviewPanel&, const ReviewPanel&) = default;

 private:
  ReviewPanel() = default;
  std::string submission_id_;
  std::vector<ReviewRecord> reviews_;
  std::optional<bool> fabrication_label_;
};

/// Reviewer weights on the probability simplex.
class ReviewerWeights {
 public:
  /// Sums within 1e-9 of one are renormalized; anything further off is rejected.
  static ReviewerWeights make(std::vector<double> weights);
  static ReviewerWeights uniform(std::size_t m);

  const std::vector<double>& values() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t m) const { return weights_[m]; }

  friend bool operator==(const ReviewerWeights&, const ReviewerWeights&) = default;

 private:
  ReviewerWeights() = default;
  std::vector<double> weights_;
};

/// phi: consensus rubric -> scalar score.
class ScoringFunctional {
 public:
  struct Linear {
    std::vector<double> coefficients;
    friend bool operator==(const Linear&, const Linear&) = default;
  };
  struct OverallPick {
    friend bool operator==(const OverallPick&, const OverallPick&) = default;
  };

  static ScoringFunctional linear(std::vector<double> coefficients);
  static ScoringFunctional overall_pick();

  bool is_linear() const { return std::holds_alternative<Linear>(variant_); }
  const std::vector<double>& coefficients() const;
  /// ||v||_2 for the linear form, 1 for overall selection.
  double lipschitz_constant() const { return lipschitz_; }
  /// Throws if the functional cannot be applied to rubrics of this schema.
  void check_compatible(const RubricSchema& schema) const;

  friend bool operator==(const ScoringFunctional&, const ScoringFunctional&) = default;

 private:
  ScoringFunctional() = default;
  std::variant<Linear, OverallPick> variant_;
  double lipschitz_ = 1.0;
};

struct NoiseProfile {
  std::vector<double> per_reviewer_variance;
  double lo = 0.0;
  double hi = 1.0;

  static NoiseProfile make(std::vector<double> variances, double lo, double hi);
  /// M reviewers sharing one variance.
  static NoiseProfile identical(std::size_t m, double variance, double lo, double hi);
  double range_width() const { return hi - lo; }
  friend bool operator==(const NoiseProfile&, const NoiseProfile&) = default;
};

/// Inputs of the Bernstein-McDiarmid tail: variance term and the largest
/// single-reviewer influence on the aggregate.
struct BoundInputs {
  double sigma_w_sq = 0.0;
  double c_max = 0.0;
  std::vector<double> projected_variances;  // optional, c_m = v' Sigma_m v

  static BoundInputs make(double sigma_w_sq, double c_max,
                          std::vector<double> projected_variances = {});
  friend bool operator==(const BoundInputs&, const BoundInputs&) = default;
};

struct CalibrationRecord {
  std::string submission_id;
  double agent_score = 0.0;
  bool human_accept = false;
  std::string status;

  static CalibrationRecord make(std::string submission_id, double agent_score, bool human_accept,
                                std::string status);
  /// Also requires `status` to be a member of `vocabulary`.
  static CalibrationRecord make(std::string submission_id, double agent_score, bool human_accept,
                                std::string status, std::span<const std::string> vocabulary);
  friend bool operator==(const CalibrationRecord&, const CalibrationRecord&) = default;
};

struct DecisionThresholds {
  double tau_rate = 0.0;
  double tau_05 = 0.0;
  double target_rate = 0.5;
  std::int64_t calibration_size = 1;
  std::string score_source = "agent";

  static DecisionThresholds make(double tau_rate, double tau_05, double target_rate,
                                 std::int64_t calibration_size,
                                 std::string score_source = "agent");
  friend bool operator==(const DecisionThresholds&, const DecisionThresholds&) = default;
};

class GaussianPosterior {
 public:
  static GaussianPosterior make(double mean, double variance);

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double sd() const;
  double precision() const { return 1.0 / variance_; }

  friend bool operator==(const GaussianPosterior&, const GaussianPosterior&) = default;

 private:
  GaussianPosterior() = default;
  double mean_ = 0.0;
  double variance_ = 1.0;
};

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  static ConfusionCounts make(std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn);
  std::int64_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

}  // namespace revcal

#endif  // REVCAL_CORE_TYPES_HPP
