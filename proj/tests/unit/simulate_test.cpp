// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/simulate.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "core/rng.hpp"

namespace revcal {
namespace {

simulate::CohortSpec small_spec() {
  simulate::CohortSpec s;
  s.n_papers = 400;
  return s;
}

TEST(CounterStream, DeterministicAndKeyed) {
  CounterStream a(42, 7, 1), b(42, 7, 1), c(42, 7, 2), d(43, 7, 1);
  const auto x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  EXPECT_NE(x, d.next_u64());
}

TEST(CounterStream, UniformAndBelowStayInRange) {
  CounterStream s(1, 2, 3);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(s.below(7), 7u);
  }
}

TEST(CounterStream, NormalMoments) {
  CounterStream s(5, 0, 0);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.015);
}

TEST(Cohort, DeterministicPerSeed) {
  const auto a = simulate::generate_cohort(small_spec());
  const auto b = simulate::generate_cohort(small_spec());
  ASSERT_EQ(a.papers.size(), 400u);
  for (std::size_t i = 0; i < a.papers.size(); ++i) {
    EXPECT_EQ(a.papers[i].latent, b.papers[i].latent);
    EXPECT_EQ(a.papers[i].scores, b.papers[i].scores);
  }
  auto other = small_spec();
  other.seed = 43;
  EXPECT_NE(simulate::generate_cohort(other).papers[0].latent, a.papers[0].latent);
}

TEST(Cohort, SmallerPanelIsPrefixOfLarger) {
  const auto three = simulate::generate_cohort(small_spec());
  const auto one = simulate::generate_cohort(small_spec().with_reviewers(1));
  for (std::size_t i = 0; i < one.papers.size(); ++i) {
    EXPECT_EQ(one.papers[i].latent, three.papers[i].latent);
    EXPECT_EQ(one.papers[i].scores[0], three.papers[i].scores[0]);
  }
}

TEST(Cohort, ClipModesRespectTheRange) {
  auto spec = small_spec();
  spec.latent = simulate::LatentDistribution::uniform(1.5, 9.5);
  spec.noise = NoiseProfile::identical(3, 4.0, 1, 10);
  for (auto mode : {simulate::ClipMode::kClip, simulate::ClipMode::kRejectResample}) {
    spec.clip_mode = mode;
    for (const auto& p : simulate::generate_cohort(spec).papers) {
      for (double s : p.scores) {
        EXPECT_GE(s, 1.0);
        EXPECT_LE(s, 10.0);
      }
    }
  }
}

TEST(Cohort, BoundValidationReadiness) {
  EXPECT_TRUE(simulate::CohortSpec{}.bound_validation_ready());
  simulate::CohortSpec wide;
  wide.latent = simulate::LatentDistribution::uniform(1, 10);
  EXPECT_FALSE(wide.bound_validation_ready());
}

TEST(Cohort, ValidateRejectsMalformedSpecs) {
  auto s = small_spec();
  s.n_papers = 0;
  EXPECT_THROW(s.validate(), InvalidInput);
  s = small_spec();
  s.latent = simulate::LatentDistribution::uniform(7, 4);
  EXPECT_THROW(s.validate(), InvalidInput);
}

TEST(MarginExperiment, RowsCoverAllPapers) {
  const auto cohort = simulate::generate_cohort(small_spec());
  const auto edges = simulate::default_margin_edges(cohort, 5.5, 10);
  ASSERT_EQ(edges.size(), 11u);
  const auto rows = simulate::margin_experiment(cohort, ReviewerWeights::uniform(3), 5.5, edges);
  std::int64_t total = 0;
  for (const auto& r : rows) {
    total += r.count;
    EXPECT_EQ(r.m, 3);
    EXPECT_GE(r.theoretical_bound, 0.0);
    EXPECT_LE(r.theoretical_bound, 1.0);
    if (r.count == 0) EXPECT_FALSE(r.empirical_rate.has_value());
  }
  EXPECT_EQ(total, 400);
}

TEST(VarianceExperiment, ProxyIsClosedForm) {
  const auto rows = simulate::variance_experiment(small_spec(), std::vector<std::int64_t>{1, 2, 3});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].proxy, 81.0);
  EXPECT_EQ(rows[1].proxy, 40.5);
  EXPECT_EQ(rows[2].proxy, 27.0);
  EXPECT_GT(rows[0].var_empirical, rows[2].var_empirical);
}

TEST(LogLogSlope, RecoversPowerLaw) {
  std::vector<simulate::ThresholdErrorRow> rows;
  for (std::int64_t n : {50, 100, 200, 400, 800}) {
    rows.push_back({n, 3.0 / std::sqrt(double(n)), 0.0, 0, 10});
  }
  EXPECT_NEAR(simulate::log_log_slope(rows), -0.5, 1e-12);
  EXPECT_TRUE(simulate::check_threshold_decay(rows).passed);
  rows[2].mean_abs_error *= 3;
  EXPECT_FALSE(simulate::check_threshold_decay(rows).passed);
}

TEST(Checks, BoundDominanceUsesStandardErrors) {
  simulate::MarginBinRow ok{0, 1, 0.31, 0.01, 0.3, 100, 3};
  simulate::MarginBinRow bad{0, 1, 0.4, 0.01, 0.3, 100, 3};
  EXPECT_TRUE(simulate::check_bound_dominance(std::vector{ok}).passed);
  EXPECT_FALSE(simulate::check_bound_dominance(std::vector{bad}).passed);
}

TEST(Checks, PanelOrderingIgnoresSparseBins) {
  simulate::MarginBinRow m1{0, 1, 0.2, 0.01, 0.9, 100, 1};
  simulate::MarginBinRow m3{0, 1, 0.25, 0.01, 0.9, 49, 3};
  EXPECT_TRUE(simulate::check_panel_ordering(std::vector{m1}, std::vector{m3}).passed);
  m3.count = 50;
  EXPECT_FALSE(simulate::check_panel_ordering(std::vector{m1}, std::vector{m3}).passed);
}

TEST(CalibrationPopulation, DeterministicWithBinaryStatuses) {
  simulate::PopulationSpec spec;
  spec.cohort.n_papers = 1000;
  const auto a = simulate::generate_calibration_population(spec);
  const auto b = simulate::generate_calibration_population(spec);
  ASSERT_EQ(a.size(), 1000u);
  EXPECT_EQ(a, b);
  for (const auto& r : a) EXPECT_EQ(r.status, r.human_accept ? "accept" : "reject");
}

}  // namespace
}  // namespace revcal
