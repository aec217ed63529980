// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "core/aggregate.hpp"
#include "core/bayes.hpp"
#include "core/bounds.hpp"
#include "core/calibrate.hpp"
#include "core/config.hpp"
#include "core/io.hpp"
#include "core/metrics.hpp"
#include "core/report.hpp"
#include "core/simulate.hpp"
#include "support/oracles.hpp"

namespace {

using namespace revcal;

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

Outcome dkw_closed_form() {
  Outcome o;
  const double v = bounds::dkw_bound(200, 0.05);
  o.require(std::abs(v - 0.104666) <= 1e-6, fmt::format("dkw_bound(200, 0.05) = {}", v));
  if (o.passed) o.detail = fmt::format("dkw_bound(200, 0.05) = {}", report::sig6(v));
  return o;
}

Outcome bound_dominance() {
  Outcome o;
  const auto pre = Config::defaults().simulation.margins;
  std::vector<double> edges;
  std::map<std::int64_t, std::vector<simulate::MarginBinRow>> curves;
  for (auto m : pre.m_grid) {
    const auto cohort = simulate::generate_cohort(pre.cohort.with_reviewers(m));
    if (edges.empty()) edges = simulate::default_margin_edges(cohort, pre.tau, pre.bins);
    curves[m] = simulate::margin_experiment(
        cohort, ReviewerWeights::uniform(static_cast<std::size_t>(m)), pre.tau, edges);
    const auto c = simulate::check_bound_dominance(curves[m]);
    for (const auto& f : c.failures) o.require(false, fmt::format("M={}: {}", m, f));
  }
  const auto order = simulate::check_panel_ordering(curves.at(1), curves.at(3));
  for (const auto& f : order.failures) o.require(false, "M=3 vs M=1: " + f);
  if (o.passed) o.detail = "every bin dominated; M=3 at or below M=1";
  return o;
}

Outcome variance_scaling() {
  Outcome o;
  const auto pre = Config::defaults().simulation.variance;
  const std::vector<std::int64_t> grid{1, 3};
  const auto rows = simulate::variance_experiment(pre.cohort, grid);
  const double width = pre.cohort.noise.range_width();
  for (const auto& r : rows) {
    o.require(r.proxy == width * width / static_cast<double>(r.m),
              fmt::format("proxy at M={} is {}", r.m, r.proxy));
  }
  const double ratio = rows[0].var_empirical / rows[1].var_empirical;
  o.require(ratio >= 2.5 && ratio <= 3.5, fmt::format("ratio {:.4f} outside [2.5, 3.5]", ratio));
  if (o.passed) o.detail = fmt::format("Var ratio M=1/M=3 = {:.4f}", ratio);
  return o;
}

Outcome threshold_decay() {
  Outcome o;
  const auto pre = Config::defaults().simulation.threshold_error;
  const auto population = simulate::generate_calibration_population(pre.population);
  const auto res = simulate::threshold_bootstrap(population, pre.grid, pre.replicates, 42);
  const auto c = simulate::check_threshold_decay(res.rows);
  for (const auto& f : c.failures) o.require(false, f);
  double at200 = std::nan("");
  for (const auto& r : res.rows) {
    if (r.n_cal == 200) at200 = r.mean_abs_error;
  }
  const std::string info = fmt::format("slope {:.4f}, mean error at N_cal=200 is {:.4f}",
                                       simulate::log_log_slope(res.rows), at200);
  o.detail = o.passed ? info : o.detail + " (" + info + ")";
  return o;
}

Outcome pava_oracle() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> value(0.0, 1.0), weight(0.1, 5.0);
  std::uniform_int_distribution<int> size(1, 6);
  double worst = 0.0, worst_idem = 0.0, worst_mean = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(rng);
    std::vector<calibrate::CurvePoint> pts;
    std::vector<testing::WeightedPoint> oracle_pts;
    for (int i = 0; i < n; ++i) {
      const double v = value(rng), w = weight(rng);
      pts.push_back({static_cast<double>(i + 1), v, w});
      oracle_pts.push_back({v, w});
    }
    const auto fit = calibrate::isotonic_fit(pts);
    const auto oracle = testing::isotonic_grid_oracle(oracle_pts);
    double sum_raw = 0, sum_fit = 0;
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(fit.knots[i].value - oracle[i]));
      sum_raw += pts[i].weight * pts[i].value;
      sum_fit += fit.knots[i].weight * fit.knots[i].value;
    }
    worst_mean = std::max(worst_mean, std::abs(sum_raw - sum_fit));
    const auto again = calibrate::isotonic_fit(fit.knots);
    for (int i = 0; i < n; ++i) {
      worst_idem = std::max(worst_idem, std::abs(again.knots[i].value - fit.knots[i].value));
    }
  }
  o.require(worst <= 1e-3, fmt::format("oracle gap {:.3g}", worst));
  o.require(worst_idem <= 1e-12, fmt::format("idempotence gap {:.3g}", worst_idem));
  o.require(worst_mean <= 1e-12, fmt::format("weighted mean drift {:.3g}", worst_mean));
  if (o.passed) {
    o.detail = fmt::format("1000 instances, max oracle gap {:.2g}, idempotence {:.2g}, mean {:.2g}",
                           worst, worst_idem, worst_mean);
  }
  return o;
}

Outcome gls_optimality() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> var(0.05, 5.0);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> c{var(rng), var(rng), var(rng)};
    const double gls = aggregate::panel_variance(aggregate::gls_weights(c), c);
    if (gls > testing::min_panel_variance_on_simplex(c, 0.01) + 1e-12) ++violations;
  }
  o.require(violations == 0, fmt::format("{} of 200 triples beaten by a grid point", violations));
  if (o.passed) o.detail = "200 triples, GLS never beaten on the 0.01 simplex grid";
  return o;
}

Outcome stratified_sampler() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> score(1.0, 10.0);
  std::bernoulli_distribution accept(0.3);
  const std::vector<double> edges{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<std::string> vocab{"accept", "reject"};
  int feasible = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<CalibrationRecord> pool;
    const int size = 10 + trial % 300;
    for (int i = 0; i < size; ++i) {
      const bool a = accept(rng);
      pool.push_back(CalibrationRecord::make("p" + std::to_string(i), score(rng), a,
                                             a ? "accept" : "reject"));
    }
    const std::int64_t n_cal = std::uniform_int_distribution<std::int64_t>(1, size)(rng);
    const auto plan = calibrate::allocate_quotas(calibrate::cell_populations(pool, edges, vocab),
                                                 n_cal, edges, vocab);
    std::int64_t total = 0;
    for (const auto& c : plan.cells) {
      total += c.quota;
      if (plan.overflow_reallocations == 0 && !(std::abs(c.quota - plan.target(c)) < 1.0)) {
        o.require(false, fmt::format("trial {}: cell deviation {}", trial,
                                     std::abs(c.quota - plan.target(c))));
      }
    }
    if (plan.overflow_reallocations == 0) ++feasible;
    o.require(total == n_cal, fmt::format("trial {}: quotas sum to {} not {}", trial, total, n_cal));
    const auto a = calibrate::stratified_sample(pool, plan, 100 + trial);
    const auto b = calibrate::stratified_sample(pool, plan, 100 + trial);
    o.require(a == b, fmt::format("trial {}: sample differs for one seed", trial));
    o.require(static_cast<std::int64_t>(a.size()) == n_cal,
              fmt::format("trial {}: drew {} records", trial, a.size()));
  }
  if (o.passed) {
    o.detail = fmt::format("500 pools ({} without overflow), sums and determinism hold", feasible);
  }
  return o;
}

Outcome detector_fidelity() {
  Outcome o;
  const auto m = metrics::detector_metrics(ConfusionCounts::make(49, 42, 8, 1));
  const std::string row = fmt::format("{}/{}/{}/{}", report::percent(m.tpr), report::percent(m.fpr),
                                      report::percent(m.accuracy), report::percent(m.f1));
  o.require(row == "98.0%/84.0%/57.0%/69.5%", "o3 row " + row);
  const auto silent = metrics::detector_metrics(ConfusionCounts::make(0, 0, 50, 50));
  o.require(silent.f1 == 0.0 && report::percent(silent.f1) == "0.0%",
            fmt::format("F1 with tp=0 is {}", silent.f1));
  if (o.passed) o.detail = "o3 row " + row + ", F1 = 0.0% at tp = 0";
  return o;
}

Outcome bayes_fixtures() {
  Outcome o;
  const auto prior = GaussianPosterior::make(5, 4);
  const std::vector<bayes::ScoredReview> one{{7, 1}};
  const auto post = bayes::posterior_update(prior, one);
  o.require(post.mean() == 6.6 && post.variance() == 0.8,
            fmt::format("posterior ({}, {})", post.mean(), post.variance()));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> s(1, 10), v(0.2, 4);
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    std::vector<bayes::ScoredReview> reviews(2 + c % 7);
    for (auto& r : reviews) r = {s(rng), v(rng)};
    const auto ref = bayes::posterior_update(prior, reviews);
    for (int p = 0; p < 100; ++p) {
      std::shuffle(reviews.begin(), reviews.end(), rng);
      const auto got = bayes::posterior_update(prior, reviews);
      worst = std::max({worst, std::abs(got.mean() - ref.mean()),
                        std::abs(got.variance() - ref.variance())});
    }
  }
  o.require(worst <= 1e-12, fmt::format("permutation drift {:.3g}", worst));

  double worst_half = 0.0;
  for (double tau : {1.0, 5.5, 7.0, 9.25}) {
    for (double var : {0.01, 0.8, 4.0}) {
      const double p = bayes::acceptance_probability(GaussianPosterior::make(tau, var), tau);
      worst_half = std::max(worst_half, std::abs(p - 0.5));
    }
  }
  o.require(worst_half <= 1e-7, fmt::format("P(accept) at mu = tau off by {:.3g}", worst_half));
  if (o.passed) {
    o.detail = fmt::format("(6.6, 0.8) exact, permutation drift {:.2g}, |p - 0.5| {:.2g}", worst,
                           worst_half);
  }
  return o;
}

Outcome metrics_pipeline() {
  Outcome o;
  const auto cfg = Config::defaults();
  const auto panels = io::parse_panels(
      io::read_file(std::string(REVCAL_FIXTURES) + "/panels_review.jsonl"), cfg.schema);
  std::map<std::string, double> scores;
  std::vector<bool> accept;
  for (const auto& p : panels) {
    const double s = aggregate::score(
        aggregate::consensus_rubric(p, weights_for(p, cfg.weights)), cfg.functional, cfg.schema);
    scores[p.submission_id()] = s;
    accept.push_back(aggregate::decide(s, 7.0).accept);
  }
  const std::unique_ptr<bool[]> flags(new bool[accept.size()]);
  std::copy(accept.begin(), accept.end(), flags.get());
  const double acpt = metrics::acpt({flags.get(), accept.size()});
  o.require(std::abs(acpt - 2.0 / 3.0) < 1e-15, fmt::format("ACPT {}", acpt));
  const std::map<std::string, double> icr_expected{{"m1", 2.0 / 3.0}, {"m2", 0.0},
                                                   {"m3", 1.0 / 3.0}};
  for (const auto& [id, want] : icr_expected) {
    const double got = metrics::icr_per_model(panels, id);
    o.require(std::abs(got - want) < 1e-15, fmt::format("ICR-{} {}", id, got));
  }
  o.require(std::abs(metrics::icr_any(panels) - 2.0 / 3.0) < 1e-15, "ICR@M");
  o.require(metrics::conflict_rate(panels, scores, 7.0, "m1") == 1.0, "conflict m1");
  o.require(!metrics::conflict_rate(panels, scores, 7.0, "m2").has_value(), "conflict m2");
  o.require(metrics::conflict_rate(panels, scores, 7.0, "m3") == 1.0, "conflict m3");

  const auto labeled = io::parse_panels(
      io::read_file(std::string(REVCAL_FIXTURES) + "/panels_detector.jsonl"), cfg.schema);
  std::vector<char> predicted, actual;
  for (const auto& p : labeled) {
    const auto* r = p.find("o3");
    predicted.push_back(r != nullptr && r->integrity_flag);
    actual.push_back(*p.fabrication_label());
  }
  const std::unique_ptr<bool[]> pred(new bool[predicted.size()]), act(new bool[actual.size()]);
  std::copy(predicted.begin(), predicted.end(), pred.get());
  std::copy(actual.begin(), actual.end(), act.get());
  const auto counts =
      metrics::confusion({pred.get(), predicted.size()}, {act.get(), actual.size()});
  o.require(counts == ConfusionCounts::make(49, 42, 8, 1), "o3 confusion counts");
  if (o.passed) {
    o.detail = "ACPT 66.7%, ICR 66.7/0.0/33.3%, ICR@M 66.7%, conflicts 100%/n/a/100%, o3 49/42/8/1";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"DKW closed form", dkw_closed_form},
      {"margin bound dominance and panel ordering", bound_dominance},
      {"1/M variance scaling", variance_scaling},
      {"threshold-error decay", threshold_decay},
      {"PAVA oracle equivalence", pava_oracle},
      {"GLS optimality", gls_optimality},
      {"stratified sampler", stratified_sampler},
      {"detector-metric fidelity", detector_fidelity},
      {"Bayes fixtures", bayes_fixtures},
      {"metrics pipeline on synthetic fixtures", metrics_pipeline},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.passed) ++failed;
    fmt::print("criterion {:>2}: {}  {} ({}) [{:.2f}s]\n", i + 1, o.passed ? "PASS" : "FAIL",
               criteria[i].first, o.detail, secs);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
