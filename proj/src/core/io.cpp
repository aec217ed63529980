// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "core/json_util.hpp"

namespace revcal {

using nlohmann::json;
using namespace json_util;

namespace {

json real_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double real_from_json(const json& j, std::string_view key) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  if (!j.is_number()) throw InvalidInput(fmt::format("{}: expected a number", key));
  return j.get<double>();
}

}  // namespace

void to_json(json& j, const CriterionBounds& v) { j = json{{"min", v.lo}, {"max", v.hi}}; }

void from_json(const json& j, CriterionBounds& v) {
  only_keys(j, {"min", "max", "name"}, "criterion");
  v.lo = number(j, "min");
  v.hi = number(j, "max");
}

void to_json(json& j, const RubricSchema& v) {
  j = json{{"criteria", v.bounds()}};
  if (v.overall_index()) j["overall_index"] = *v.overall_index();
}

RubricSchema rubric_schema_from_json(const json& j) {
  only_keys(j, {"criteria", "overall_index"}, "rubric");
  const auto& crit = field(j, "criteria");
  if (!crit.is_array()) throw InvalidInput("criteria: expected an array");
  std::vector<CriterionBounds> bounds;
  for (const auto& c : crit) bounds.push_back(c.get<CriterionBounds>());
  std::optional<std::size_t> overall;
  if (j.contains("overall_index")) {
    const auto& oi = j.at("overall_index");
    if (!oi.is_number_unsigned()) throw InvalidInput("overall_index: expected a non-negative integer");
    overall = oi.get<std::size_t>();
  }
  return RubricSchema::make(std::move(bounds), overall);
}

void to_json(json& j, const ReviewerWeights& v) { j = json{{"weights", v.values()}}; }

ReviewerWeights reviewer_weights_from_json(const json& j) {
  only_keys(j, {"weights"}, "reviewer weights");
  return ReviewerWeights::make(number_array(j, "weights"));
}

void to_json(json& j, const ScoringFunctional& v) {
  if (v.is_linear()) {
    j = json{{"linear", v.coefficients()}};
  } else {
    j = "overall";
  }
}

ScoringFunctional scoring_functional_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "overall") return ScoringFunctional::overall_pick();
    throw InvalidInput("functional: expected \"overall\" or {\"linear\": [...]}");
  }
  only_keys(j, {"linear"}, "functional");
  return ScoringFunctional::linear(number_array(j, "linear"));
}

void to_json(json& j, const NoiseProfile& v) {
  j = json{{"per_reviewer_variance", v.per_reviewer_variance}, {"range", {v.lo, v.hi}}};
}

NoiseProfile noise_profile_from_json(const json& j) {
  only_keys(j, {"per_reviewer_variance", "range"}, "noise");
  const auto range = number_array(j, "range");
  if (range.size() != 2) throw InvalidInput("range: expected [a, b]");
  return NoiseProfile::make(number_array(j, "per_reviewer_variance"), range[0], range[1]);
}

void to_json(json& j, const BoundInputs& v) {
  j = json{{"sigma_w_sq", v.sigma_w_sq}, {"c_max", v.c_max}};
  if (!v.projected_variances.empty()) j["projected_variances"] = v.projected_variances;
}

BoundInputs bound_inputs_from_json(const json& j) {
  only_keys(j, {"sigma_w_sq", "c_max", "projected_variances"}, "bound inputs");
  std::vector<double> pv;
  if (j.contains("projected_variances")) pv = number_array(j, "projected_variances");
  return BoundInputs::make(number(j, "sigma_w_sq"), number(j, "c_max"), std::move(pv));
}

void to_json(json& j, const CalibrationRecord& v) {
  j = json{{"id", v.submission_id},
           {"score", v.agent_score},
           {"accept", v.human_accept},
           {"status", v.status}};
}

CalibrationRecord calibration_record_from_json(const json& j) {
  only_keys(j, {"id", "score", "accept", "status"}, "calibration record");
  return CalibrationRecord::make(string(j, "id"), number(j, "score"), boolean(j, "accept"),
                                 string(j, "status"));
}

void to_json(json& j, const DecisionThresholds& v) {
  j = json{{"tau_rate", real_to_json(v.tau_rate)},
           {"tau_05", real_to_json(v.tau_05)},
           {"target_rate", v.target_rate},
           {"calibration_size", v.calibration_size},
           {"score_source", v.score_source}};
}

DecisionThresholds decision_thresholds_from_json(const json& j) {
  only_keys(j, {"tau_rate", "tau_05", "target_rate", "calibration_size", "score_source"},
            "thresholds");
  const auto& size = field(j, "calibration_size");
  if (!size.is_number_integer()) throw InvalidInput("calibration_size: expected an integer");
  return DecisionThresholds::make(real_from_json(field(j, "tau_rate"), "tau_rate"),
                                  real_from_json(field(j, "tau_05"), "tau_05"),
                                  number(j, "target_rate"), size.get<std::int64_t>(),
                                  j.contains("score_source") ? string(j, "score_source") : "agent");
}

void to_json(json& j, const GaussianPosterior& v) {
  j = json{{"mean", v.mean()}, {"variance", v.variance()}};
}

GaussianPosterior gaussian_posterior_from_json(const json& j) {
  only_keys(j, {"mean", "variance"}, "posterior");
  return GaussianPosterior::make(number(j, "mean"), number(j, "variance"));
}

void to_json(json& j, const ConfusionCounts& v) {
  j = json{{"tp", v.tp}, {"fp", v.fp}, {"tn", v.tn}, {"fn", v.fn}};
}

ConfusionCounts confusion_counts_from_json(const json& j) {
  only_keys(j, {"tp", "fp", "tn", "fn"}, "confusion counts");
  return ConfusionCounts::make(integer(j, "tp"), integer(j, "fp"), integer(j, "tn"),
                               integer(j, "fn"));
}

json panel_to_json(const ReviewPanel& panel) {
  json reviews = json::array();
  for (const auto& r : panel.reviews()) {
    json rj{{"reviewer", r.reviewer_id}, {"rubric", r.rubric.values()}};
    if (r.overall) rj["overall"] = *r.overall;
    rj["flag"] = r.integrity_flag;
    if (r.feedback) rj["feedback"] = *r.feedback;
    reviews.push_back(std::move(rj));
  }
  json j{{"id", panel.submission_id()}};
  if (panel.fabrication_label()) j["label"] = *panel.fabrication_label();
  j["reviews"] = std::move(reviews);
  return j;
}

ReviewPanel panel_from_json(const json& j, const RubricSchema& schema, bool allow_empty) {
  only_keys(j, {"id", "label", "reviews"}, "panel");
  std::string id = string(j, "id");
  std::optional<bool> label;
  if (j.contains("label") && !j.at("label").is_null()) label = boolean(j, "label");
  const auto& reviews = field(j, "reviews");
  if (!reviews.is_array()) throw InvalidInput("reviews: expected an array");
  if (reviews.empty()) {
    if (allow_empty) return ReviewPanel::prior_only(std::move(id), label);
    throw InvalidInput(fmt::format("reviews: panel '{}' has no reviews", id));
  }
  std::vector<ReviewRecord> out;
  for (const auto& rj : reviews) {
    only_keys(rj, {"reviewer", "rubric", "overall", "flag", "feedback"}, "review");
    std::optional<std::string> feedback;
    if (rj.contains("feedback") && !rj.at("feedback").is_null()) feedback = string(rj, "feedback");
    std::optional<double> overall;
    if (rj.contains("overall") && !rj.at("overall").is_null()) {
      overall = number(rj, "overall");
      if (auto oi = schema.overall_index()) {
        const auto& b = schema.bounds()[*oi];
        if (*overall < b.lo || *overall > b.hi) {
          throw InvalidInput(fmt::format("overall: {} outside [{}, {}]", *overall, b.lo, b.hi));
        }
      }
    }
    out.push_back(ReviewRecord::make(string(rj, "reviewer"),
                                     RubricVector::make(number_array(rj, "rubric"), schema),
                                     boolean(rj, "flag"), std::move(feedback), overall));
  }
  return ReviewPanel::make(std::move(id), std::move(out), schema, label);
}

namespace io {

RecordError::RecordError(std::size_t line, const std::string& what)
    : InvalidInput(fmt::format("line {}: {}", line, what)), line_(line) {}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(fmt::format("{}: cannot open file", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("{}: cannot write file", path.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(fmt::format("{}: write failed", path.string()));
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

namespace {

template <class Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw RecordError(line_no, fmt::format("malformed JSON ({})", e.what()));
    } catch (const RecordError&) {
      throw;
    } catch (const InvalidInput& e) {
      throw RecordError(line_no, e.what());
    }
    if (end == text.size()) break;
  }
}

}  // namespace

std::vector<ReviewPanel> parse_panels(std::string_view text, const RubricSchema& schema,
                                      bool allow_empty_panels) {
  std::vector<ReviewPanel> panels;
  for_each_record(text, [&](const json& j) {
    panels.push_back(panel_from_json(j, schema, allow_empty_panels));
  });
  return panels;
}

std::string emit_panels(std::span<const ReviewPanel> panels) {
  std::string out;
  for (const auto& p : panels) out += panel_to_json(p).dump() + "\n";
  return out;
}

std::vector<CalibrationRecord> parse_calibration(std::string_view text,
                                                 std::span<const std::string> vocabulary) {
  std::vector<CalibrationRecord> records;
  for_each_record(text, [&](const json& j) {
    auto rec = calibration_record_from_json(j);
    if (!vocabulary.empty()) {
      rec = CalibrationRecord::make(rec.submission_id, rec.agent_score, rec.human_accept,
                                    rec.status, vocabulary);
    }
    records.push_back(std::move(rec));
  });
  return records;
}

std::string emit_calibration(std::span<const CalibrationRecord> records) {
  std::string out;
  for (const auto& r : records) out += json(r).dump() + "\n";
  return out;
}

}  // namespace io
}  // namespace revcal
