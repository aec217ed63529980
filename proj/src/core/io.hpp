// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef REVCAL_CORE_IO_HPP
#define REVCAL_CORE_IO_HPP

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "core/types.hpp"

namespace revcal {

// JSON encodings of the domain types. Decoding re-runs every invariant check.
void to_json(nlohmann::json& j, const CriterionBounds& v);
void from_json(const nlohmann::json& j, CriterionBounds& v);
void to_json(nlohmann::json& j, const RubricSchema& v);
RubricSchema rubric_schema_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ReviewerWeights& v);
ReviewerWeights reviewer_weights_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ScoringFunctional& v);
ScoringFunctional scoring_functional_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const NoiseProfile& v);
NoiseProfile noise_profile_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const BoundInputs& v);
BoundInputs bound_inputs_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const CalibrationRecord& v);
CalibrationRecord calibration_record_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const DecisionThresholds& v);
DecisionThresholds decision_thresholds_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const GaussianPosterior& v);
GaussianPosterior gaussian_posterior_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ConfusionCounts& v);
ConfusionCounts confusion_counts_from_json(const nlohmann::json& j);

/// Panel JSONL record (one line):
///   {"id": str, "label": bool?, "reviews": [{"reviewer": str, "rubric": [num...],
///    "overall": num?, "flag": bool, "feedback": str?}]}
nlohmann::json panel_to_json(const ReviewPanel& panel);
ReviewPanel panel_from_json(const nlohmann::json& j, const RubricSchema& schema,
                            bool allow_empty = false);

namespace io {

/// Schema violation in a JSONL stream; `line` is 1-based.
class RecordError : public InvalidInput {
 public:
  RecordError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string sha256_hex(std::string_view bytes);

/// Blank lines are skipped. Throws RecordError on the first bad record.
std::vector<ReviewPanel> parse_panels(std::string_view text, const RubricSchema& schema,
                                      bool allow_empty_panels = false);
std::string emit_panels(std::span<const ReviewPanel> panels);

/// Calibration JSONL record: {"id": str, "score": num, "accept": bool, "status": str}.
/// An empty vocabulary accepts any status.
std::vector<CalibrationRecord> parse_calibration(std::string_view text,
                                                 std::span<const std::string> vocabulary = {});
std::string emit_calibration(std::span<const CalibrationRecord> records);

}  // namespace io
}  // namespace revcal

#endif  // REVCAL_CORE_IO_HPP
