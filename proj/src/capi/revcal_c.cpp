// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "revcal/revcal.h"

#include <cmath>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "core/aggregate.hpp"
#include "core/bayes.hpp"
#include "core/bounds.hpp"
#include "core/calibrate.hpp"
#include "core/commands.hpp"
#include "core/io.hpp"
#include "core/metrics.hpp"

struct revcal_calibration {
  std::vector<revcal::CalibrationRecord> records;
};

struct revcal_options {
  revcal::commands::RunOptions opts;
};

struct revcal_run {
  revcal::commands::CommandResult result;
};

namespace {

thread_local std::string g_last_error;

revcal_status fail(revcal_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
revcal_status wrap(F&& f) {
  g_last_error.clear();
  try {
    f();
    return REVCAL_OK;
  } catch (const revcal::InvalidInput& e) {
    return fail(REVCAL_ERR_INPUT, e.what());
  } catch (const revcal::CalibrationInfeasible& e) {
    return fail(REVCAL_ERR_INFEASIBLE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(REVCAL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(REVCAL_ERR_INTERNAL, e.what());
  }
}

revcal_status null_arg(const char* name) {
  return fail(REVCAL_ERR_INPUT, std::string(name) + ": null pointer");
}

revcal::GaussianPosterior to_core(revcal_gaussian g) {
  return revcal::GaussianPosterior::make(g.mean, g.variance);
}

revcal::commands::RunOptions options_or_default(const revcal_options* o) {
  return o ? o->opts : revcal::commands::RunOptions{};
}

revcal_status finish(revcal::commands::CommandResult r, revcal_run** run) {
  const auto status = static_cast<revcal_status>(r.exit_code);
  g_last_error = r.error;
  if (run) {
    *run = new (std::nothrow) revcal_run{std::move(r)};
    if (!*run) return fail(REVCAL_ERR_INTERNAL, "out of memory");
  }
  return status;
}

std::optional<double> opt(double v) {
  return std::isnan(v) ? std::nullopt : std::optional<double>(v);
}

}  // namespace

extern "C" {

const char* revcal_version(void) { return REVCAL_VERSION; }

const char* revcal_last_error(void) { return g_last_error.c_str(); }

revcal_status revcal_tail_bound(double t, double sigma_w_sq, double c_max, double* out) {
  if (!out) return null_arg("out");
  return wrap([&] {
    *out = revcal::bounds::tail_bound(t, revcal::BoundInputs::make(sigma_w_sq, c_max));
  });
}

revcal_status revcal_margin_bound(double gamma, double sigma_w_sq, double c_max, double* out) {
  if (!out) return null_arg("out");
  return wrap([&] {
    *out = revcal::bounds::margin_misclassification_bound(
        gamma, revcal::BoundInputs::make(sigma_w_sq, c_max));
  });
}

revcal_status revcal_scalar_uniform_bound(int64_t m, double gamma, double sigma_sq,
                                          double range_width, double* out) {
  if (!out) return null_arg("out");
  return wrap([&] { *out = revcal::bounds::scalar_uniform_bound(m, gamma, sigma_sq, range_width); });
}

revcal_status revcal_dkw_bound(int64_t n, double delta, double* out) {
  if (!out) return null_arg("out");
  return wrap([&] { *out = revcal::bounds::dkw_bound(n, delta); });
}

revcal_status revcal_tau05_error_bound(double eps_pi, double c_min, double flat_width,
                                       double* out) {
  if (!out) return null_arg("out");
  return wrap([&] { *out = revcal::bounds::tau05_error_bound(eps_pi, c_min, flat_width); });
}

revcal_status revcal_gls_weights(const double* projected_variances, size_t m, double* weights_out) {
  if (!projected_variances || !weights_out) return null_arg("projected_variances/weights_out");
  return wrap([&] {
    const auto w = revcal::aggregate::gls_weights({projected_variances, m});
    for (size_t i = 0; i < m; ++i) weights_out[i] = w[i];
  });
}

revcal_status revcal_panel_variance(const double* weights, const double* projected_variances,
                                    size_t m, double* out) {
  if (!weights || !projected_variances || !out) return null_arg("weights/projected_variances/out");
  return wrap([&] {
    const auto w = revcal::ReviewerWeights::make({weights, weights + m});
    *out = revcal::aggregate::panel_variance(w, {projected_variances, m});
  });
}

revcal_status revcal_posterior_update(revcal_gaussian prior, const double* scores,
                                      const double* variances, size_t n, revcal_gaussian* out) {
  if (!out || (n > 0 && (!scores || !variances))) return null_arg("scores/variances/out");
  return wrap([&] {
    std::vector<revcal::bayes::ScoredReview> reviews;
    reviews.reserve(n);
    for (size_t i = 0; i < n; ++i) reviews.push_back({scores[i], variances[i]});
    const auto post = revcal::bayes::posterior_update(to_core(prior), reviews);
    *out = revcal_gaussian{post.mean(), post.variance()};
  });
}

revcal_status revcal_acceptance_probability(revcal_gaussian posterior, double tau, double* out) {
  if (!out) return null_arg("out");
  return wrap([&] { *out = revcal::bayes::acceptance_probability(to_core(posterior), tau); });
}

revcal_status revcal_credible_robust(revcal_gaussian posterior, double tau, double alpha,
                                     int* out) {
  if (!out) return null_arg("out");
  return wrap([&] { *out = revcal::bayes::credible_robust(to_core(posterior), tau, alpha) ? 1 : 0; });
}

revcal_status revcal_solicit_worthwhile(revcal_gaussian posterior, double tau, double alpha,
                                        double sigma_new_sq, int* out) {
  if (!out) return null_arg("out");
  return wrap([&] {
    *out = revcal::bayes::solicit_worthwhile(to_core(posterior), tau, alpha, sigma_new_sq) ? 1 : 0;
  });
}

revcal_status revcal_detector_metrics_compute(int64_t tp, int64_t fp, int64_t tn, int64_t fn,
                                              revcal_detector_metrics* out) {
  if (!out) return null_arg("out");
  return wrap([&] {
    const auto m = revcal::metrics::detector_metrics(revcal::ConfusionCounts::make(tp, fp, tn, fn));
    *out = revcal_detector_metrics{m.tpr.has_value(), m.tpr.value_or(0.0), m.fpr.has_value(),
                                   m.fpr.value_or(0.0), m.accuracy, m.f1};
  });
}

revcal_status revcal_calibration_create(revcal_calibration** out) {
  if (!out) return null_arg("out");
  return wrap([&] { *out = new revcal_calibration{}; });
}

revcal_status revcal_calibration_load(const char* path, revcal_calibration** out) {
  if (!path || !out) return null_arg("path/out");
  return wrap([&] {
    auto records = revcal::io::parse_calibration(revcal::io::read_file(path));
    *out = new revcal_calibration{std::move(records)};
  });
}

revcal_status revcal_calibration_add(revcal_calibration* set, const char* id, double score,
                                     int accept, const char* status) {
  if (!set || !id || !status) return null_arg("set/id/status");
  return wrap([&] {
    set->records.push_back(revcal::CalibrationRecord::make(id, score, accept != 0, status));
  });
}

size_t revcal_calibration_size(const revcal_calibration* set) {
  return set ? set->records.size() : 0;
}

revcal_status revcal_calibration_fit(const revcal_calibration* set, double target_rate,
                                     double* tau_rate, double* tau_05) {
  if (!set || !tau_rate || !tau_05) return null_arg("set/tau_rate/tau_05");
  if (set->records.empty()) return fail(REVCAL_ERR_INPUT, "calibration set: no records");
  return wrap([&] {
    std::vector<double> scores;
    for (const auto& r : set->records) scores.push_back(r.agent_score);
    if (!(target_rate > 0.0 && target_rate < 1.0)) {
      throw revcal::InvalidInput("target_rate: must lie in (0, 1)");
    }
    *tau_rate = revcal::calibrate::rate_matching_threshold(scores, target_rate);
    *tau_05 = revcal::calibrate::fit_tau_05(set->records);
  });
}

void revcal_calibration_free(revcal_calibration* set) { delete set; }

revcal_status revcal_options_create(revcal_options** out) {
  if (!out) return null_arg("out");
  return wrap([&] { *out = new revcal_options{}; });
}

revcal_status revcal_options_set_config(revcal_options* opts, const char* path) {
  if (!opts) return null_arg("opts");
  if (path) {
    opts->opts.config_path = path;
  } else {
    opts->opts.config_path.reset();
  }
  return REVCAL_OK;
}

revcal_status revcal_options_set_out_root(revcal_options* opts, const char* dir) {
  if (!opts || !dir) return null_arg("opts/dir");
  opts->opts.out_root = dir;
  return REVCAL_OK;
}

revcal_status revcal_options_set_seed(revcal_options* opts, uint64_t seed) {
  if (!opts) return null_arg("opts");
  opts->opts.seed = seed;
  return REVCAL_OK;
}

void revcal_options_free(revcal_options* opts) { delete opts; }

revcal_status revcal_cmd_calibrate(const revcal_options* opts, const char* calibration_path,
                                   revcal_run** run) {
  if (!calibration_path) return null_arg("calibration_path");
  return finish(revcal::commands::calibrate(options_or_default(opts), calibration_path), run);
}

revcal_status revcal_cmd_review(const revcal_options* opts, const char* panels_path,
                                const char* thresholds_path, revcal_run** run) {
  if (!panels_path || !thresholds_path) return null_arg("panels_path/thresholds_path");
  return finish(revcal::commands::review(options_or_default(opts), panels_path, thresholds_path),
                run);
}

revcal_status revcal_cmd_bayes(const revcal_options* opts, const char* panels_path,
                               const char* thresholds_path, revcal_run** run) {
  if (!panels_path || !thresholds_path) return null_arg("panels_path/thresholds_path");
  return finish(revcal::commands::bayes(options_or_default(opts), panels_path, thresholds_path),
                run);
}

revcal_status revcal_cmd_detector_eval(const revcal_options* opts, const char* panels_path,
                                       revcal_run** run) {
  if (!panels_path) return null_arg("panels_path");
  return finish(revcal::commands::detector_eval(options_or_default(opts), panels_path), run);
}

revcal_status revcal_cmd_simulate(const revcal_options* opts, const char* which,
                                  const int64_t* m_grid, size_t m_count, const int64_t* n_cal_grid,
                                  size_t n_cal_count, int64_t replicates, revcal_run** run) {
  if (!which) return null_arg("which");
  if ((m_count && !m_grid) || (n_cal_count && !n_cal_grid)) return null_arg("grid");
  revcal::commands::SimulateOverrides ov;
  if (m_count) ov.m_grid.assign(m_grid, m_grid + m_count);
  if (n_cal_count) ov.n_cal_grid.assign(n_cal_grid, n_cal_grid + n_cal_count);
  if (replicates > 0) ov.replicates = replicates;
  return finish(revcal::commands::simulate(options_or_default(opts), which, ov), run);
}

void revcal_bound_args_init(revcal_bound_args* a) {
  if (!a) return;
  const double nan = std::nan("");
  *a = revcal_bound_args{nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan};
}

revcal_status revcal_cmd_bound(const char* name, const revcal_bound_args* a, double* value,
                               revcal_run** run) {
  if (!name || !a) return null_arg("name/args");
  revcal::commands::BoundArgs b{opt(a->t),     opt(a->gamma),  opt(a->sigma_w_sq),
                                opt(a->c_max), opt(a->m),      opt(a->sigma_sq),
                                opt(a->range), opt(a->n),      opt(a->delta),
                                opt(a->eps_pi), opt(a->c_min), opt(a->flat_width)};
  return finish(revcal::commands::bound(name, b, value), run);
}

int revcal_run_exit_code(const revcal_run* run) { return run ? run->result.exit_code : 1; }

const char* revcal_run_summary(const revcal_run* run) {
  return run ? run->result.summary.c_str() : "";
}

const char* revcal_run_dir(const revcal_run* run) { return run ? run->result.run_dir.c_str() : ""; }

const char* revcal_run_error(const revcal_run* run) { return run ? run->result.error.c_str() : ""; }

void revcal_run_free(revcal_run* run) { delete run; }

}  // extern "C"
