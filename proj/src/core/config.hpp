// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef REVCAL_CORE_CONFIG_HPP
#define REVCAL_CORE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/simulate.hpp"
#include "core/types.hpp"

namespace revcal {

struct WeightsConfig {
  enum class Mode { kUniform, kGls, kExplicit };
  Mode mode = Mode::kUniform;
  std::map<std::string, double> explicit_weights;
  std::map<std::string, double> projected_variances;  // GLS inputs c_m
};

struct CalibrationConfig {
  std::optional<double> target_rate;
  std::vector<double> bin_edges{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::string> status_vocabulary;  // empty: any status, strata in first-seen order
  std::optional<std::int64_t> n_cal;           // set: stratify before fitting
  std::string score_source = "agent";
};

struct BayesConfig {
  std::optional<GaussianPosterior> prior;  // required by the bayes command
  std::map<std::string, double> reviewer_variances;
  std::optional<double> default_reviewer_variance;
  double alpha = 0.05;
  std::optional<double> sigma_new_sq;
  std::string threshold = "tau_rate";  // "tau_rate" | "tau_05"
};

struct MarginPreset {
  simulate::CohortSpec cohort;
  double tau = 5.5;
  std::size_t bins = 20;
  std::vector<std::int64_t> m_grid{1, 2, 3};
};

struct ThresholdErrorPreset {
  simulate::PopulationSpec population;
  std::vector<std::int64_t> grid{50, 100, 200, 400, 800};
  std::int64_t replicates = 200;
};

struct VariancePreset {
  simulate::CohortSpec cohort;
  std::vector<std::int64_t> m_grid{1, 2, 3};
};

struct SimulationConfig {
  MarginPreset margins;
  ThresholdErrorPreset threshold_error;
  VariancePreset variance;
};

/// One JSON document per run. Every section is optional; defaults describe a
/// single-criterion [1, 10] overall score with uniform weights.
struct Config {
  RubricSchema schema = RubricSchema::scalar(1.0, 10.0);
  ScoringFunctional functional = ScoringFunctional::overall_pick();
  WeightsConfig weights;
  CalibrationConfig calibration;
  BayesConfig bayes;
  SimulationConfig simulation;
  std::optional<std::uint64_t> seed;

  static Config from_json(const nlohmann::json& j);
  static Config defaults() { return from_json(nlohmann::json::object()); }
};

/// Weights for the reviewers actually present in `panel`. Explicit weights
/// are restricted to those reviewers and renormalized; a reviewer without a
/// configured weight (or GLS variance) is an error.
ReviewerWeights weights_for(const ReviewPanel& panel, const WeightsConfig& cfg);

/// sigma_m^2 for one reviewer, from the per-reviewer map or the default.
double reviewer_variance(const BayesConfig& cfg, const std::string& reviewer_id);

}  // namespace revcal

#endif  // REVCAL_CORE_CONFIG_HPP
