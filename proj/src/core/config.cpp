// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/config.hpp"

#include <cmath>

#include <fmt/format.h>

#include "core/aggregate.hpp"
#include "core/io.hpp"
#include "core/json_util.hpp"

namespace revcal {

using nlohmann::json;
using namespace json_util;

namespace {

std::map<std::string, double> number_map(const json& j, std::string_view key) {
  const auto& v = field(j, key);
  if (!v.is_object()) throw InvalidInput(fmt::format("{}: expected an object of numbers", key));
  std::map<std::string, double> out;
  for (const auto& [k, x] : v.items()) {
    if (!x.is_number()) throw InvalidInput(fmt::format("{}.{}: expected a number", key, k));
    out[k] = x.get<double>();
  }
  return out;
}

simulate::ClipMode clip_mode_from(const std::string& s) {
  if (s == "clip") return simulate::ClipMode::kClip;
  if (s == "reject-resample") return simulate::ClipMode::kRejectResample;
  if (s == "none") return simulate::ClipMode::kNone;
  throw InvalidInput(fmt::format("clip_mode: unknown mode '{}'", s));
}

simulate::LatentDistribution latent_from(const json& j) {
  only_keys(j, {"uniform", "gaussian"}, "latent");
  if (j.size() != 1) throw InvalidInput("latent: give exactly one of uniform or gaussian");
  if (j.contains("uniform")) {
    const auto v = number_array(j, "uniform");
    if (v.size() != 2) throw InvalidInput("latent.uniform: expected [lo, hi]");
    return simulate::LatentDistribution::uniform(v[0], v[1]);
  }
  const auto v = number_array(j, "gaussian");
  if (v.size() != 2) throw InvalidInput("latent.gaussian: expected [mean, sd]");
  return simulate::LatentDistribution::gaussian(v[0], v[1]);
}

void parse_simulation(const json& j, SimulationConfig& sim) {
  only_keys(j,
            {"seed", "n_papers", "sigma_sq", "score_range", "latent", "clip_mode", "margins",
             "threshold_error", "variance"},
            "simulation");
  simulate::CohortSpec common;
  if (j.contains("seed")) common.seed = static_cast<std::uint64_t>(integer(j, "seed"));
  if (j.contains("n_papers")) common.n_papers = integer(j, "n_papers");
  double sigma_sq = 1.0;
  if (j.contains("sigma_sq")) sigma_sq = number(j, "sigma_sq");
  double lo = 1.0, hi = 10.0;
  if (j.contains("score_range")) {
    const auto r = number_array(j, "score_range");
    if (r.size() != 2) throw InvalidInput("score_range: expected [a, b]");
    lo = r[0];
    hi = r[1];
  }
  common.noise = NoiseProfile::identical(static_cast<std::size_t>(common.m_reviewers), sigma_sq,
                                         lo, hi);
  if (j.contains("latent")) common.latent = latent_from(j.at("latent"));
  if (j.contains("clip_mode")) common.clip_mode = clip_mode_from(string(j, "clip_mode"));

  sim.margins.cohort = common;
  sim.variance.cohort = common;
  sim.threshold_error.population.cohort = common;
  sim.threshold_error.population.cohort.n_papers = 100000;

  if (j.contains("margins")) {
    const auto& m = j.at("margins");
    only_keys(m, {"tau", "bins", "m"}, "simulation.margins");
    if (m.contains("tau")) sim.margins.tau = number(m, "tau");
    if (m.contains("bins")) {
      const auto b = integer(m, "bins");
      if (b < 1) throw InvalidInput("simulation.margins.bins: must be at least 1");
      sim.margins.bins = static_cast<std::size_t>(b);
    }
    if (m.contains("m")) sim.margins.m_grid = integer_array(m, "m");
  }
  if (j.contains("threshold_error")) {
    const auto& t = j.at("threshold_error");
    only_keys(t, {"population", "m", "link_slope", "link_center", "grid", "replicates"},
              "simulation.threshold_error");
    auto& pop = sim.threshold_error.population;
    if (t.contains("population")) pop.cohort.n_papers = integer(t, "population");
    if (t.contains("m")) pop.cohort = pop.cohort.with_reviewers(integer(t, "m"));
    if (t.contains("link_slope")) pop.link_slope = number(t, "link_slope");
    if (t.contains("link_center")) pop.link_center = number(t, "link_center");
    if (t.contains("grid")) sim.threshold_error.grid = integer_array(t, "grid");
    if (t.contains("replicates")) sim.threshold_error.replicates = integer(t, "replicates");
  }
  if (j.contains("variance")) {
    const auto& v = j.at("variance");
    only_keys(v, {"m"}, "simulation.variance");
    if (v.contains("m")) sim.variance.m_grid = integer_array(v, "m");
  }
}

}  // namespace

Config Config::from_json(const json& j) {
  only_keys(j,
            {"rubric", "functional", "weights", "projected_variances", "target_rate",
             "calibration", "prior", "reviewer_variances", "default_reviewer_variance", "bayes",
             "simulation", "seed"},
            "config");
  Config cfg{};
  if (j.contains("rubric")) cfg.schema = rubric_schema_from_json(j.at("rubric"));
  if (j.contains("functional")) cfg.functional = scoring_functional_from_json(j.at("functional"));
  cfg.functional.check_compatible(cfg.schema);

  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    if (w.is_string() && w.get<std::string>() == "uniform") {
      cfg.weights.mode = WeightsConfig::Mode::kUniform;
    } else if (w.is_string() && w.get<std::string>() == "gls") {
      cfg.weights.mode = WeightsConfig::Mode::kGls;
    } else if (w.is_object()) {
      cfg.weights.mode = WeightsConfig::Mode::kExplicit;
      cfg.weights.explicit_weights = number_map(j, "weights");
    } else {
      throw InvalidInput("weights: expected \"uniform\", \"gls\", or {reviewer: weight}");
    }
  }
  if (j.contains("projected_variances")) {
    cfg.weights.projected_variances = number_map(j, "projected_variances");
  }
  if (cfg.weights.mode == WeightsConfig::Mode::kGls && cfg.weights.projected_variances.empty()) {
    throw InvalidInput("projected_variances: required when weights is \"gls\"");
  }

  if (j.contains("target_rate")) {
    const double a = number(j, "target_rate");
    if (!(a > 0.0 && a < 1.0)) throw InvalidInput("target_rate: must lie in (0, 1)");
    cfg.calibration.target_rate = a;
  }
  if (j.contains("calibration")) {
    const auto& c = j.at("calibration");
    only_keys(c, {"bin_edges", "status_vocabulary", "n_cal", "score_source"}, "calibration");
    if (c.contains("bin_edges")) cfg.calibration.bin_edges = number_array(c, "bin_edges");
    if (c.contains("status_vocabulary")) {
      const auto& v = c.at("status_vocabulary");
      if (!v.is_array()) throw InvalidInput("status_vocabulary: expected an array of strings");
      for (const auto& s : v) {
        if (!s.is_string()) throw InvalidInput("status_vocabulary: expected an array of strings");
        cfg.calibration.status_vocabulary.push_back(s.get<std::string>());
      }
    }
    if (c.contains("n_cal")) cfg.calibration.n_cal = integer(c, "n_cal");
    if (c.contains("score_source")) {
      cfg.calibration.score_source = string(c, "score_source");
      if (cfg.calibration.score_source != "agent" && cfg.calibration.score_source != "venue") {
        throw InvalidInput("score_source: expected \"agent\" or \"venue\"");
      }
    }
  }

  if (j.contains("prior")) cfg.bayes.prior = gaussian_posterior_from_json(j.at("prior"));
  if (j.contains("reviewer_variances")) {
    cfg.bayes.reviewer_variances = number_map(j, "reviewer_variances");
    for (const auto& [id, v] : cfg.bayes.reviewer_variances) {
      if (!(v > 0.0)) throw InvalidInput(fmt::format("reviewer_variances.{}: must be positive", id));
    }
  }
  if (j.contains("default_reviewer_variance")) {
    const double v = number(j, "default_reviewer_variance");
    if (!(v > 0.0)) throw InvalidInput("default_reviewer_variance: must be positive");
    cfg.bayes.default_reviewer_variance = v;
  }
  if (j.contains("bayes")) {
    const auto& b = j.at("bayes");
    only_keys(b, {"alpha", "sigma_new_sq", "threshold"}, "bayes");
    if (b.contains("alpha")) cfg.bayes.alpha = number(b, "alpha");
    if (!(cfg.bayes.alpha > 0.0 && cfg.bayes.alpha < 1.0)) {
      throw InvalidInput("bayes.alpha: must lie in (0, 1)");
    }
    if (b.contains("sigma_new_sq")) {
      cfg.bayes.sigma_new_sq = number(b, "sigma_new_sq");
      if (!(*cfg.bayes.sigma_new_sq > 0.0)) throw InvalidInput("bayes.sigma_new_sq: must be positive");
    }
    if (b.contains("threshold")) {
      cfg.bayes.threshold = string(b, "threshold");
      if (cfg.bayes.threshold != "tau_rate" && cfg.bayes.threshold != "tau_05") {
        throw InvalidInput("bayes.threshold: expected \"tau_rate\" or \"tau_05\"");
      }
    }
  }

  parse_simulation(j.contains("simulation") ? j.at("simulation") : json::object(), cfg.simulation);
  if (j.contains("seed")) cfg.seed = static_cast<std::uint64_t>(integer(j, "seed"));
  return cfg;
}

ReviewerWeights weights_for(const ReviewPanel& panel, const WeightsConfig& cfg) {
  if (panel.empty()) {
    throw InvalidInput(fmt::format("reviews: panel '{}' has no reviews", panel.submission_id()));
  }
  switch (cfg.mode) {
    case WeightsConfig::Mode::kUniform:
      return ReviewerWeights::uniform(panel.size());
    case WeightsConfig::Mode::kGls: {
      std::vector<double> c;
      for (const auto& r : panel.reviews()) {
        auto it = cfg.projected_variances.find(r.reviewer_id);
        if (it == cfg.projected_variances.end()) {
          throw InvalidInput(fmt::format("projected_variances: no entry for reviewer '{}' (panel '{}')",
                                         r.reviewer_id, panel.submission_id()));
        }
        c.push_back(it->second);
      }
      return aggregate::gls_weights(c);
    }
    case WeightsConfig::Mode::kExplicit: {
      std::vector<double> w;
      double total = 0.0;
      for (const auto& r : panel.reviews()) {
        auto it = cfg.explicit_weights.find(r.reviewer_id);
        if (it == cfg.explicit_weights.end()) {
          throw InvalidInput(fmt::format("weights: no configured weight for reviewer '{}' (panel '{}')",
                                         r.reviewer_id, panel.submission_id()));
        }
        if (!(it->second >= 0.0)) {
          throw InvalidInput(fmt::format("weights.{}: must be non-negative", r.reviewer_id));
        }
        w.push_back(it->second);
        total += it->second;
      }
      if (!(total > 0.0)) {
        throw InvalidInput(fmt::format("weights: reviewers of panel '{}' carry zero total weight",
                                       panel.submission_id()));
      }
      for (auto& x : w) x /= total;
      return ReviewerWeights::make(std::move(w));
    }
  }
  throw std::logic_error("unreachable weights mode");
}

double reviewer_variance(const BayesConfig& cfg, const std::string& reviewer_id) {
  auto it = cfg.reviewer_variances.find(reviewer_id);
  if (it != cfg.reviewer_variances.end()) return it->second;
  if (cfg.default_reviewer_variance) return *cfg.default_reviewer_variance;
  throw InvalidInput(
      fmt::format("reviewer_variances: no variance configured for reviewer '{}'", reviewer_id));
}

}  // namespace revcal
