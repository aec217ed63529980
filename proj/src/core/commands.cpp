// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <map>
#include <memory>
#include <span>

#include <fmt/format.h>
#include <json.hpp>

#include "core/aggregate.hpp"
#include "core/bayes.hpp"
#include "core/bounds.hpp"
#include "core/calibrate.hpp"
#include "core/config.hpp"
#include "core/io.hpp"
#include "core/metrics.hpp"
#include "core/report.hpp"
#include "core/simulate.hpp"

#ifndef REVCAL_VERSION
#define REVCAL_VERSION "0.0.0"
#endif

namespace revcal::commands {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string compact_stamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

struct LoadedConfig {
  Config config;
  std::string digest;
  std::optional<std::string> path;
};

LoadedConfig load_config(const RunOptions& opts) {
  if (!opts.config_path) {
    return LoadedConfig{Config::defaults(), io::sha256_hex("{}"), std::nullopt};
  }
  const std::string bytes = io::read_file(*opts.config_path);
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw InvalidInput(fmt::format("{}: malformed JSON ({})", *opts.config_path, e.what()));
  }
  return LoadedConfig{Config::from_json(j), io::sha256_hex(bytes), opts.config_path};
}

/// One run directory with its manifest. The manifest is written on creation
/// and rewritten by finish() once every output is on disk.
class RunDirectory {
 public:
  RunDirectory(const RunOptions& opts, std::string command, const LoadedConfig& cfg,
               std::uint64_t seed, std::map<std::string, std::string> input_digests)
      : command_(std::move(command)),
        config_digest_(cfg.digest),
        seed_(seed),
        inputs_(std::move(input_digests)),
        started_(utc_now()) {
    fs::create_directories(opts.out_root);
    const std::string base = fmt::format("{}-{}-{}", compact_stamp(), command_,
                                         config_digest_.substr(0, 8));
    fs::path dir = fs::path(opts.out_root) / base;
    for (int i = 1; fs::exists(dir); ++i) dir = fs::path(opts.out_root) / fmt::format("{}-{}", base, i);
    fs::create_directory(dir);
    dir_ = dir;
    write_manifest(std::nullopt);
  }

  void add(const std::string& name, std::string_view bytes) {
    io::write_file(dir_ / name, bytes);
    outputs_.push_back(name);
  }

  void note(const std::string& key, json value) { extra_[key] = std::move(value); }

  void finish(int exit_code) { write_manifest(exit_code); }

  std::string path() const { return dir_.string(); }

 private:
  void write_manifest(std::optional<int> exit_code) {
    json m{{"command", command_},
           {"config_digest", config_digest_},
           {"seed", seed_},
           {"tool_version", REVCAL_VERSION},
           {"input_digests", inputs_},
           {"started_at", started_},
           {"finished_at", exit_code ? json(utc_now()) : json(nullptr)},
           {"outputs", outputs_}};
    if (exit_code) m["exit_code"] = *exit_code;
    for (const auto& [k, v] : extra_.items()) m[k] = v;
    io::write_file(dir_ / "manifest.json", m.dump(2) + "\n");
  }

  std::string command_;
  std::string config_digest_;
  std::uint64_t seed_;
  std::map<std::string, std::string> inputs_;
  std::string started_;
  fs::path dir_;
  std::vector<std::string> outputs_;
  json extra_ = json::object();
};

/// Runs `body`, mapping exceptions onto the exit-code contract.
template <class Body>
CommandResult guarded(Body&& body) {
  try {
    return body();
  } catch (const io::RecordError& e) {
    return CommandResult{kInputError, {}, {}, e.what()};
  } catch (const InvalidInput& e) {
    return CommandResult{kInputError, {}, {}, e.what()};
  } catch (const CalibrationInfeasible& e) {
    return CommandResult{kCalibrationInfeasible, {}, {}, e.what()};
  } catch (const std::exception& e) {
    return CommandResult{kInternalError, {}, {}, e.what()};
  }
}

std::string read_input(const std::string& path, std::map<std::string, std::string>& digests) {
  std::string bytes = io::read_file(path);
  digests[path] = io::sha256_hex(bytes);
  return bytes;
}

std::string with_context(const std::string& path, const std::exception& e) {
  return fmt::format("{}: {}", path, e.what());
}

DecisionThresholds load_thresholds(const std::string& path,
                                   std::map<std::string, std::string>& digests) {
  const std::string bytes = read_input(path, digests);
  try {
    return decision_thresholds_from_json(json::parse(bytes));
  } catch (const json::exception& e) {
    throw InvalidInput(fmt::format("{}: malformed JSON ({})", path, e.what()));
  } catch (const InvalidInput& e) {
    throw InvalidInput(with_context(path, e));
  }
}

std::vector<ReviewPanel> load_panels(const std::string& path, const Config& cfg, bool allow_empty,
                                     std::map<std::string, std::string>& digests) {
  const std::string bytes = read_input(path, digests);
  std::vector<ReviewPanel> panels;
  try {
    panels = io::parse_panels(bytes, cfg.schema, allow_empty);
  } catch (const InvalidInput& e) {
    throw InvalidInput(with_context(path, e));
  }
  if (panels.empty()) throw InvalidInput(fmt::format("{}: no records", path));
  return panels;
}

/// Contiguous bool storage; std::vector<bool> cannot back a span.
class Flags {
 public:
  void push_back(bool b) { data_.push_back(b ? 1 : 0); }
  bool back() const { return data_.back() != 0; }
  std::size_t size() const { return data_.size(); }
  std::int64_t count() const { return std::count(data_.begin(), data_.end(), 1); }
  std::unique_ptr<bool[]> copy() const {
    auto out = std::make_unique<bool[]>(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = data_[i] != 0;
    return out;
  }

 private:
  std::vector<unsigned char> data_;
};

double flags_acpt(const Flags& f) {
  const auto buf = f.copy();
  return metrics::acpt(std::span<const bool>(buf.get(), f.size()));
}

metrics::DetectorMetrics flags_metrics(const Flags& predicted, const Flags& actual,
                                       ConfusionCounts& counts) {
  const auto p = predicted.copy();
  const auto a = actual.copy();
  counts = metrics::confusion(std::span<const bool>(p.get(), predicted.size()),
                              std::span<const bool>(a.get(), actual.size()));
  return metrics::detector_metrics(counts);
}

std::uint64_t pick_seed(const RunOptions& opts, const Config& cfg, std::uint64_t fallback) {
  if (opts.seed) return *opts.seed;
  if (cfg.seed) return *cfg.seed;
  return fallback;
}

}  // namespace

// ---------------------------------------------------------------------------
// calibrate

CommandResult calibrate(const RunOptions& opts, const std::string& calibration_path) {
  return guarded([&]() -> CommandResult {
    const auto cfg = load_config(opts);
    const auto& cal = cfg.config.calibration;
    if (!cal.target_rate) throw InvalidInput("target_rate: missing from config");
    std::map<std::string, std::string> digests;
    const std::string bytes = read_input(calibration_path, digests);
    std::vector<CalibrationRecord> pool;
    try {
      pool = io::parse_calibration(bytes, cal.status_vocabulary);
    } catch (const InvalidInput& e) {
      throw InvalidInput(with_context(calibration_path, e));
    }
    if (pool.empty()) throw InvalidInput(fmt::format("{}: no records", calibration_path));

    const std::uint64_t seed = pick_seed(opts, cfg.config, 0);
    std::optional<calibrate::StratificationPlan> plan;
    std::vector<CalibrationRecord> records = pool;
    if (cal.n_cal) {
      std::vector<std::string> vocab = cal.status_vocabulary;
      if (vocab.empty()) {
        for (const auto& r : pool) {
          if (std::find(vocab.begin(), vocab.end(), r.status) == vocab.end()) vocab.push_back(r.status);
        }
      }
      auto cells = calibrate::cell_populations(pool, cal.bin_edges, vocab);
      plan = calibrate::allocate_quotas(std::move(cells), *cal.n_cal, cal.bin_edges, vocab);
      records = calibrate::stratified_sample(pool, *plan, seed);
    }

    RunDirectory run(opts, "calibrate", cfg, seed, digests);
    run.note("score_source", cal.score_source);
    std::string report = fmt::format("calibration records: {} (pool {})\nscore source: {}\n",
                                     records.size(), pool.size(), cal.score_source);

    if (plan) {
      report::Table strata({"bin_lo", "bin_hi", "status", "population", "quota", "target"});
      for (const auto& c : plan->cells) {
        strata.add_row({report::full(plan->bin_edges[c.bin]),
                        report::full(plan->bin_edges[c.bin + 1]), plan->status_vocabulary[c.status],
                        std::to_string(c.population), std::to_string(c.quota),
                        report::full(plan->target(c))});
      }
      run.add("strata.csv", strata.to_csv());
      run.add("calibration_sample.jsonl", io::emit_calibration(records));
      report += fmt::format("stratified sample: N_cal={} over {} cells\n", plan->n_cal,
                            plan->cells.size());
      if (plan->overflow_reallocations > 0) {
        report += fmt::format(
            "WARNING: {} remainder increment(s) moved off cells already at full population\n",
            plan->overflow_reallocations);
      }
    }

    std::vector<double> scores;
    scores.reserve(records.size());
    for (const auto& r : records) scores.push_back(r.agent_score);
    const double tau_rate = calibrate::rate_matching_threshold(scores, *cal.target_rate);
    const double alpha_hat = calibrate::empirical_acceptance(scores, tau_rate);
    report += fmt::format("target rate: {}\ntau_rate: {} (empirical acceptance {})\n",
                          report::full(*cal.target_rate), report::full(tau_rate),
                          report::full(alpha_hat));
    report += fmt::format("DKW uniform deviation at delta=0.05: {}\n",
                          report::sig6(bounds::dkw_bound(
                              static_cast<std::int64_t>(records.size()), 0.05)));

    const auto candidates = calibrate::distinct_scores(records);
    const auto raw = calibrate::tail_probability_points(records, candidates);
    const auto curve = calibrate::isotonic_fit(raw);
    report::Table curve_csv({"t", "raw", "fitted", "weight"});
    for (std::size_t i = 0; i < raw.size(); ++i) {
      curve_csv.add_row({report::full(raw[i].t), report::full(raw[i].value),
                         report::full(curve.knots[i].value), report::full(raw[i].weight)});
    }
    run.add("calibration_curve.csv", curve_csv.to_csv());

    double tau05 = 0.0;
    try {
      tau05 = calibrate::tau_05(curve);
    } catch (const CalibrationInfeasible& e) {
      report += fmt::format("tau_05: infeasible ({})\n", e.what());
      run.add("calibration_report.txt", report);
      run.finish(kCalibrationInfeasible);
      return CommandResult{kCalibrationInfeasible, report, run.path(), e.what()};
    }
    report += fmt::format("tau_05: {}\n", report::full(tau05));

    const auto thresholds =
        DecisionThresholds::make(tau_rate, tau05, *cal.target_rate,
                                 static_cast<std::int64_t>(records.size()), cal.score_source);
    run.add("thresholds.json", json(thresholds).dump(2) + "\n");
    run.add("calibration_report.txt", report);
    run.finish(kOk);
    return CommandResult{kOk, report, run.path(), {}};
  });
}

// ---------------------------------------------------------------------------
// review

CommandResult review(const RunOptions& opts, const std::string& panels_path,
                     const std::string& thresholds_path) {
  return guarded([&]() -> CommandResult {
    const auto cfg = load_config(opts);
    std::map<std::string, std::string> digests;
    const auto panels = load_panels(panels_path, cfg.config, false, digests);
    const auto th = load_thresholds(thresholds_path, digests);

    std::map<std::string, double> scores;
    report::Table decisions({"id", "score", "accept_tau_rate", "accept_tau_05"});
    Flags accept_rate, accept_05;
    for (const auto& p : panels) {
      const auto w = weights_for(p, cfg.config.weights);
      const double s = aggregate::score(aggregate::consensus_rubric(p, w), cfg.config.functional,
                                        cfg.config.schema);
      if (!scores.emplace(p.submission_id(), s).second) {
        throw InvalidInput(fmt::format("{}: duplicate panel id '{}'", panels_path, p.submission_id()));
      }
      // +inf means "accept nothing"; compare directly rather than via decide()
      accept_rate.push_back(s >= th.tau_rate);
      accept_05.push_back(s >= th.tau_05);
      decisions.add_row({p.submission_id(), report::full(s), accept_rate.back() ? "1" : "0",
                         accept_05.back() ? "1" : "0"});
    }

    const std::vector<std::pair<std::string, double>> taus{{"tau_rate", th.tau_rate},
                                                           {"tau_05", th.tau_05}};
    report::Table acpt_csv({"threshold", "tau", "acpt", "accepted", "total"});
    report::Table acpt_txt({"Threshold", "tau", "ACPT"});
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const auto& d = i == 0 ? accept_rate : accept_05;
      const double a = flags_acpt(d);
      const auto n = d.count();
      acpt_csv.add_row({taus[i].first, report::full(taus[i].second), report::full(a),
                        std::to_string(n), std::to_string(d.size())});
      acpt_txt.add_row({"ACPT-" + taus[i].first, report::full(taus[i].second), report::percent(a)});
    }

    const auto reviewers = metrics::reviewer_ids(panels);
    report::Table icr_csv({"reviewer", "icr", "flagged", "panels", "missing_panel"});
    report::Table icr_txt({"Metric", "Value"});
    for (const auto& id : reviewers) {
      const auto missing = std::find_if(panels.begin(), panels.end(),
                                        [&](const ReviewPanel& p) { return !p.find(id); });
      const auto flagged = std::count_if(panels.begin(), panels.end(), [&](const ReviewPanel& p) {
        const auto* r = p.find(id);
        return r && r->integrity_flag;
      });
      if (missing == panels.end()) {
        const double icr = metrics::icr_per_model(panels, id);
        icr_csv.add_row({id, report::full(icr), std::to_string(flagged),
                         std::to_string(panels.size()), ""});
        icr_txt.add_row({"ICR-" + id, report::percent(icr)});
      } else {
        icr_csv.add_row({id, "", std::to_string(flagged), std::to_string(panels.size()),
                         missing->submission_id()});
        icr_txt.add_row({"ICR-" + id,
                         fmt::format("n/a (absent from panel '{}')", missing->submission_id())});
      }
    }
    const double any = metrics::icr_any(panels);
    const auto any_n = std::count_if(panels.begin(), panels.end(), [](const ReviewPanel& p) {
      return std::any_of(p.reviews().begin(), p.reviews().end(),
                         [](const ReviewRecord& r) { return r.integrity_flag; });
    });
    icr_csv.add_row({"ICR@M", report::full(any), std::to_string(any_n),
                     std::to_string(panels.size()), ""});
    icr_txt.add_row({"ICR@M", report::percent(any)});

    report::Table conflict_csv(
        {"reviewer", "threshold", "tau", "conflict_rate", "flagged", "accepted_flagged"});
    std::vector<std::string> conflict_header{"Reviewer"};
    for (const auto& [name, _] : taus) conflict_header.push_back("conflict@" + name);
    report::Table conflict_txt(conflict_header);
    for (const auto& id : reviewers) {
      std::vector<std::string> row{id};
      for (const auto& [name, tau] : taus) {
        const auto rate = metrics::conflict_rate(panels, scores, tau, id);
        std::int64_t flagged = 0, accepted = 0;
        for (const auto& p : panels) {
          const auto* r = p.find(id);
          if (!r || !r->integrity_flag) continue;
          ++flagged;
          if (scores.at(p.submission_id()) >= tau) ++accepted;
        }
        conflict_csv.add_row({id, name, report::full(tau), report::full(rate),
                              std::to_string(flagged), std::to_string(accepted)});
        row.push_back(report::percent(rate));
      }
      conflict_txt.add_row(std::move(row));
    }

    const std::string text = acpt_txt.to_text("Acceptance") + "\n" +
                             icr_txt.to_text("Integrity concerns") + "\n" +
                             conflict_txt.to_text("Concern-acceptance conflict");

    RunDirectory run(opts, "review", cfg, pick_seed(opts, cfg.config, 0), digests);
    run.add("decisions.csv", decisions.to_csv());
    run.add("acpt.csv", acpt_csv.to_csv());
    run.add("icr.csv", icr_csv.to_csv());
    run.add("conflict.csv", conflict_csv.to_csv());
    run.add("report.txt", text);
    run.finish(kOk);
    return CommandResult{kOk, text, run.path(), {}};
  });
}

// ---------------------------------------------------------------------------
// bayes

CommandResult bayes(const RunOptions& opts, const std::string& panels_path,
                    const std::string& thresholds_path) {
  return guarded([&]() -> CommandResult {
    const auto cfg = load_config(opts);
    const auto& bc = cfg.config.bayes;
    if (!bc.prior) throw InvalidInput("prior: missing from config (no default prior)");
    std::map<std::string, std::string> digests;
    const auto panels = load_panels(panels_path, cfg.config, true, digests);
    const auto th = load_thresholds(thresholds_path, digests);
    const double tau = bc.threshold == "tau_05" ? th.tau_05 : th.tau_rate;
    if (!std::isfinite(tau)) {
      throw InvalidInput(fmt::format("{}: threshold is not finite", bc.threshold));
    }

    double sigma_new_sq = 0.0;
    if (bc.sigma_new_sq) {
      sigma_new_sq = *bc.sigma_new_sq;
    } else {
      // most informative reviewer available
      std::optional<double> best = bc.default_reviewer_variance;
      for (const auto& [_, v] : bc.reviewer_variances) best = best ? std::min(*best, v) : v;
      if (!best) throw InvalidInput("bayes.sigma_new_sq: missing and no reviewer variances configured");
      sigma_new_sq = *best;
    }

    report::Table csv({"id", "reviews", "mu_n", "var_n", "p_accept", "robust", "solicit",
                       "prior_only"});
    report::Table txt({"id", "reviews", "mu_n", "var_n", "P(accept)", "robust", "solicit", "note"});
    for (const auto& p : panels) {
      std::vector<bayes::ScoredReview> obs;
      for (const auto& r : p.reviews()) {
        double s = 0.0;
        if (r.overall) {
          s = *r.overall;
        } else {
          s = aggregate::score(aggregate::ConsensusRubric{r.rubric.values()},
                               cfg.config.functional, cfg.config.schema);
        }
        obs.push_back({s, reviewer_variance(bc, r.reviewer_id)});
      }
      const auto post = bayes::posterior_update(*bc.prior, obs);
      const double pa = bayes::acceptance_probability(post, tau);
      const bool robust = bayes::credible_robust(post, tau, bc.alpha);
      const bool solicit = bayes::solicit_worthwhile(post, tau, bc.alpha, sigma_new_sq);
      const bool prior_only = p.empty();
      csv.add_row({p.submission_id(), std::to_string(p.size()), report::full(post.mean()),
                   report::full(post.variance()), report::full(pa), robust ? "1" : "0",
                   solicit ? "1" : "0", prior_only ? "1" : "0"});
      txt.add_row({p.submission_id(), std::to_string(p.size()), fmt::format("{:.4f}", post.mean()),
                   fmt::format("{:.4f}", post.variance()), fmt::format("{:.4f}", pa),
                   robust ? "yes" : "no", solicit ? "yes" : "no", prior_only ? "prior-only" : ""});
    }
    const std::string text =
        txt.to_text(fmt::format("Posterior decisions at {}={} (alpha={}, sigma_new^2={})",
                                bc.threshold, report::full(tau), report::full(bc.alpha),
                                report::full(sigma_new_sq)));

    RunDirectory run(opts, "bayes", cfg, pick_seed(opts, cfg.config, 0), digests);
    run.add("bayes.csv", csv.to_csv());
    run.add("report.txt", text);
    run.finish(kOk);
    return CommandResult{kOk, text, run.path(), {}};
  });
}

// ---------------------------------------------------------------------------
// detector-eval

CommandResult detector_eval(const RunOptions& opts, const std::string& panels_path) {
  return guarded([&]() -> CommandResult {
    const auto cfg = load_config(opts);
    std::map<std::string, std::string> digests;
    const auto panels = load_panels(panels_path, cfg.config, false, digests);
    for (const auto& p : panels) {
      if (!p.fabrication_label()) {
        throw InvalidInput(fmt::format("{}: panel '{}' has no label", panels_path, p.submission_id()));
      }
    }

    report::Table csv({"detector", "tp", "fp", "tn", "fn", "tpr", "fpr", "accuracy", "f1"});
    report::Table txt({"Detector", "TPR", "FPR", "Acc", "F1", "tp/fn/fp/tn"});
    csv.add_row({"random-guess", "", "", "", "", "0.5", "0.5", "0.5", "0.5"});
    txt.add_row({"Random Guess", "50.0%", "50.0%", "50.0%", "50.0%", ""});
    for (const auto& id : metrics::reviewer_ids(panels)) {
      Flags predicted, actual;
      for (const auto& p : panels) {
        const auto* r = p.find(id);
        if (!r) continue;
        predicted.push_back(r->integrity_flag);
        actual.push_back(*p.fabrication_label());
      }
      ConfusionCounts counts{};
      const auto m = flags_metrics(predicted, actual, counts);
      csv.add_row({id, std::to_string(counts.tp), std::to_string(counts.fp),
                   std::to_string(counts.tn), std::to_string(counts.fn), report::full(m.tpr),
                   report::full(m.fpr), report::full(m.accuracy), report::full(m.f1)});
      txt.add_row({id, report::percent(m.tpr), report::percent(m.fpr), report::percent(m.accuracy),
                   report::percent(m.f1),
                   fmt::format("{}/{}/{}/{}", counts.tp, counts.fn, counts.fp, counts.tn)});
    }
    const std::string text = txt.to_text("Detector evaluation");
    RunDirectory run(opts, "detector-eval", cfg, pick_seed(opts, cfg.config, 0), digests);
    run.add("detector.csv", csv.to_csv());
    run.add("detector.txt", text);
    run.finish(kOk);
    return CommandResult{kOk, text, run.path(), {}};
  });
}

// ---------------------------------------------------------------------------
// simulate

namespace {

std::string check_lines(const std::string& name, const simulate::CheckResult& c) {
  std::string out = fmt::format("check {}: {}\n", name, c.passed ? "PASS" : "FAIL");
  for (const auto& f : c.failures) out += "  " + f + "\n";
  return out;
}

json cohort_json(const simulate::CohortSpec& s) {
  const auto [lo, hi] = s.latent.support();
  return json{{"n_papers", s.n_papers},
              {"m_reviewers", s.m_reviewers},
              {"latent", s.latent.kind == simulate::LatentDistribution::Kind::kUniform
                             ? json{{"uniform", {s.latent.a, s.latent.b}}}
                             : json{{"gaussian", {s.latent.a, s.latent.b}}}},
              {"latent_support", {lo, hi}},
              {"noise", s.noise},
              {"clip_mode", s.clip_mode == simulate::ClipMode::kClip             ? "clip"
                            : s.clip_mode == simulate::ClipMode::kRejectResample ? "reject-resample"
                                                                                 : "none"},
              {"seed", s.seed}};
}

}  // namespace

CommandResult simulate(const RunOptions& opts, const std::string& which,
                       const SimulateOverrides& overrides) {
  return guarded([&]() -> CommandResult {
    const auto cfg = load_config(opts);
    auto sim = cfg.config.simulation;
    const std::uint64_t seed = pick_seed(opts, cfg.config, sim.margins.cohort.seed);
    sim.margins.cohort.seed = seed;
    sim.variance.cohort.seed = seed;
    sim.threshold_error.population.cohort.seed = seed;
    if (!overrides.m_grid.empty()) {
      sim.margins.m_grid = overrides.m_grid;
      sim.variance.m_grid = overrides.m_grid;
    }
    if (!overrides.n_cal_grid.empty()) sim.threshold_error.grid = overrides.n_cal_grid;
    if (overrides.replicates) sim.threshold_error.replicates = *overrides.replicates;

    std::string text;
    bool passed = true;
    json settings;
    std::vector<std::pair<std::string, std::string>> outputs;

    if (which == "margins") {
      const auto& pre = sim.margins;
      if (pre.m_grid.empty()) throw InvalidInput("m: grid must be non-empty");
      const auto& base = pre.cohort;
      base.validate();
      if (!base.bound_validation_ready()) {
        throw InvalidInput(
            "latent_distribution: bound-validation presets need latent support within "
            "[a + 3 sd, b - 3 sd]");
      }
      report::Table csv({"gamma_lo", "gamma_hi", "gamma_mid", "empirical", "stderr", "bound",
                         "count", "m"});
      std::vector<std::vector<simulate::MarginBinRow>> curves;
      simulate::CheckResult dominance;
      std::vector<double> edges;
      for (auto m : pre.m_grid) {
        const auto cohort = simulate::generate_cohort(base.with_reviewers(m));
        // margins depend only on the latent means, shared across M
        if (edges.empty()) edges = simulate::default_margin_edges(cohort, pre.tau, pre.bins);
        const auto rows = simulate::margin_experiment(
            cohort, ReviewerWeights::uniform(static_cast<std::size_t>(m)), pre.tau, edges);
        for (const auto& r : rows) {
          csv.add_row({report::full(r.gamma_lo), report::full(r.gamma_hi),
                       report::full(r.gamma_mid()), report::full(r.empirical_rate),
                       report::full(r.std_error), report::full(r.theoretical_bound),
                       std::to_string(r.count), std::to_string(r.m)});
        }
        const auto c = simulate::check_bound_dominance(rows);
        for (const auto& f : c.failures) dominance.fail(f);
        curves.push_back(rows);
      }
      text += check_lines("bound dominance (empirical <= bound + 3 se)", dominance);
      passed = dominance.passed;
      if (curves.size() > 1) {
        const auto [lo_it, hi_it] = std::minmax_element(pre.m_grid.begin(), pre.m_grid.end());
        const auto order = simulate::check_panel_ordering(
            curves[static_cast<std::size_t>(lo_it - pre.m_grid.begin())],
            curves[static_cast<std::size_t>(hi_it - pre.m_grid.begin())]);
        text += "(informational) " +
                check_lines(fmt::format("M={} at or below M={} in bins with count >= 50", *hi_it,
                                        *lo_it),
                            order);
      }
      settings = json{{"cohort", cohort_json(base)}, {"tau", pre.tau}, {"bins", pre.bins},
                      {"m", pre.m_grid}};
      outputs.emplace_back("margin_bins.csv", csv.to_csv());
    } else if (which == "threshold-error") {
      const auto& pre = sim.threshold_error;
      if (pre.grid.empty()) throw InvalidInput("grid: must be non-empty");
      const auto population = simulate::generate_calibration_population(pre.population);
      const auto res = simulate::threshold_bootstrap(population, pre.grid, pre.replicates, seed);
      report::Table csv({"n_cal", "mean_abs_err", "stderr", "failures"});
      for (const auto& r : res.rows) {
        csv.add_row({std::to_string(r.n_cal), report::full(r.mean_abs_error),
                     report::full(r.std_error), std::to_string(r.failures)});
      }
      const double slope = simulate::log_log_slope(res.rows);
      text += fmt::format("reference tau_05 on the full population: {}\n",
                          report::full(res.reference_tau05));
      text += fmt::format("log-log slope: {:.4f}\n", slope);
      for (const auto& r : res.rows) {
        if (r.n_cal == 200) {
          text += fmt::format("mean |tau_hat - tau| at N_cal=200: {:.4f}\n", r.mean_abs_error);
        }
      }
      const auto c = simulate::check_threshold_decay(res.rows);
      text += check_lines("O(1/sqrt(N_cal)) decay", c);
      passed = c.passed;
      settings = json{{"population", cohort_json(pre.population.cohort)},
                      {"link", {{"form", "logistic"},
                                {"slope", pre.population.link_slope},
                                {"center", pre.population.link_center}}},
                      {"grid", pre.grid},
                      {"replicates", pre.replicates},
                      {"reference_tau05", res.reference_tau05}};
      outputs.emplace_back("threshold_error.csv", csv.to_csv());
    } else if (which == "variance") {
      const auto& pre = sim.variance;
      if (pre.m_grid.empty()) throw InvalidInput("m: grid must be non-empty");
      const auto rows = simulate::variance_experiment(pre.cohort, pre.m_grid);
      report::Table csv({"m", "var_empirical", "proxy"});
      for (const auto& r : rows) {
        csv.add_row({std::to_string(r.m), report::full(r.var_empirical), report::full(r.proxy)});
      }
      const auto c = simulate::check_variance_scaling(rows, pre.cohort.noise.range_width());
      text += check_lines("1/M variance scaling", c);
      passed = c.passed;
      settings = json{{"cohort", cohort_json(pre.cohort)}, {"m", pre.m_grid}};
      outputs.emplace_back("variance.csv", csv.to_csv());
    } else {
      throw InvalidInput(fmt::format("simulate: unknown experiment '{}'", which));
    }

    RunDirectory run(opts, "simulate-" + which, cfg, seed, {});
    run.note("settings", settings);
    for (const auto& [name, bytes] : outputs) run.add(name, bytes);
    text = fmt::format("settings: {}\n", settings.dump()) + text;
    run.add("simulate_report.txt", text);
    const int code = passed ? kOk : kCheckFailed;
    run.finish(code);
    return CommandResult{code, text, run.path(), passed ? "" : "property check failed"};
  });
}

// ---------------------------------------------------------------------------
// bound

CommandResult bound(const std::string& name, const BoundArgs& a, double* value) {
  return guarded([&]() -> CommandResult {
    auto need = [&](const std::optional<double>& v, const char* flag) {
      if (!v) throw InvalidInput(fmt::format("--{}: required for bound '{}'", flag, name));
      return *v;
    };
    auto as_count = [&](const std::optional<double>& v, const char* flag) {
      const double x = need(v, flag);
      if (x != std::floor(x) || !std::isfinite(x)) {
        throw InvalidInput(fmt::format("--{}: expected an integer", flag));
      }
      return static_cast<std::int64_t>(x);
    };
    double out = 0.0;
    if (name == "tail" || name == "margin") {
      const auto inputs = BoundInputs::make(need(a.sigma_w_sq, "sigma-w-sq"), need(a.c_max, "c-max"));
      out = name == "tail" ? bounds::tail_bound(need(a.t, "t"), inputs)
                           : bounds::margin_misclassification_bound(need(a.gamma, "gamma"), inputs);
    } else if (name == "scalar") {
      out = bounds::scalar_uniform_bound(as_count(a.m, "m"), need(a.gamma, "gamma"),
                                         need(a.sigma_sq, "sigma-sq"), need(a.range, "range"));
    } else if (name == "dkw") {
      out = bounds::dkw_bound(as_count(a.n, "n"), need(a.delta, "delta"));
    } else if (name == "tau05") {
      out = bounds::tau05_error_bound(need(a.eps_pi, "eps-pi"), need(a.c_min, "c-min"),
                                      need(a.flat_width, "flat-width"));
    } else {
      throw InvalidInput(fmt::format("bound: unknown bound '{}'", name));
    }
    if (value) *value = out;
    return CommandResult{kOk, report::sig6(out) + "\n", {}, {}};
  });
}

}  // namespace revcal::commands
