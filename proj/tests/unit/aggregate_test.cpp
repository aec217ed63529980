// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/aggregate.hpp"

#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace revcal {
namespace {

RubricSchema two_criteria() { return RubricSchema::make({{1, 10}, {1, 10}}); }

ReviewPanel panel_of(const std::vector<std::vector<double>>& rubrics, const RubricSchema& schema) {
  std::vector<ReviewRecord> reviews;
  for (std::size_t i = 0; i < rubrics.size(); ++i) {
    reviews.push_back(ReviewRecord::make("m" + std::to_string(i + 1),
                                         RubricVector::make(rubrics[i], schema), false));
  }
  return ReviewPanel::make("p", std::move(reviews), schema);
}

TEST(Types, SchemaRejectsEmptyAndInvertedBounds) {
  EXPECT_THROW(RubricSchema::make({}), InvalidInput);
  EXPECT_THROW(RubricSchema::make({{5, 1}}), InvalidInput);
  EXPECT_THROW(RubricSchema::make({{1, 10}}, 1), InvalidInput);
}

TEST(Types, RubricMustFitSchema) {
  const auto s = two_criteria();
  EXPECT_THROW(RubricVector::make({5}, s), InvalidInput);
  EXPECT_THROW(RubricVector::make({5, 11}, s), InvalidInput);
  EXPECT_NO_THROW(RubricVector::make({1, 10}, s));
}

TEST(Types, PanelNeedsDistinctReviewers) {
  const auto s = RubricSchema::scalar(1, 10);
  std::vector<ReviewRecord> twice{ReviewRecord::make("a", RubricVector::make({5}, s), false),
                                  ReviewRecord::make("a", RubricVector::make({6}, s), false)};
  EXPECT_THROW(ReviewPanel::make("p", twice, s), InvalidInput);
  EXPECT_THROW(ReviewPanel::make("p", {}, s), InvalidInput);
  EXPECT_TRUE(ReviewPanel::prior_only("p").empty());
}

TEST(Types, WeightsRenormalizeOnlyWithinTolerance) {
  const auto w = ReviewerWeights::make({0.5, 0.5 + 1e-10});
  EXPECT_NEAR(w[0] + w[1], 1.0, 1e-15);
  EXPECT_THROW(ReviewerWeights::make({0.5, 0.6}), InvalidInput);
  EXPECT_THROW(ReviewerWeights::make({1.5, -0.5}), InvalidInput);
}

TEST(Consensus, WeightedSumOfRubrics) {
  const auto s = two_criteria();
  const auto c = aggregate::consensus_rubric(panel_of({{6, 7}, {8, 5}}, s),
                                             ReviewerWeights::make({0.5, 0.5}));
  EXPECT_EQ(c.values, (std::vector<double>{7, 6}));
}

TEST(Consensus, DegenerateWeightSelectsReviewer) {
  const auto s = two_criteria();
  const auto c = aggregate::consensus_rubric(panel_of({{3, 9}, {8, 1}}, s),
                                             ReviewerWeights::make({1, 0}));
  EXPECT_EQ(c.values, (std::vector<double>{3, 9}));
}

TEST(Consensus, IdenticalRubricsAreFixedPoints) {
  const auto s = two_criteria();
  const auto c = aggregate::consensus_rubric(panel_of({{4.2, 7.7}, {4.2, 7.7}, {4.2, 7.7}}, s),
                                             ReviewerWeights::make({0.2, 0.3, 0.5}));
  EXPECT_EQ(c.values, (std::vector<double>{4.2, 7.7}));
}

TEST(Consensus, WeightCountMustMatchPanel) {
  const auto s = two_criteria();
  EXPECT_THROW(aggregate::consensus_rubric(panel_of({{1, 1}}, s), ReviewerWeights::uniform(2)),
               InvalidInput);
}

TEST(Score, OverallPickAndLinear) {
  const auto s3 = RubricSchema::make({{1, 10}, {1, 10}, {1, 10}}, 2);
  EXPECT_EQ(aggregate::score({{7, 6.5, 8}}, ScoringFunctional::overall_pick(), s3), 8);
  EXPECT_NEAR(aggregate::score({{6, 7, 8}}, ScoringFunctional::linear({0.2, 0.3, 0.5}), s3), 7.3,
              1e-12);
  const auto s1 = RubricSchema::scalar(1, 10);
  EXPECT_EQ(aggregate::score({{4.25}}, ScoringFunctional::linear({1}), s1), 4.25);
}

TEST(Score, OverallPickNeedsOverallIndexOrSingleCriterion) {
  EXPECT_THROW(ScoringFunctional::overall_pick().check_compatible(two_criteria()), InvalidInput);
  EXPECT_NO_THROW(ScoringFunctional::overall_pick().check_compatible(RubricSchema::scalar(1, 10)));
  EXPECT_THROW(ScoringFunctional::linear({1, 1, 1}).check_compatible(two_criteria()), InvalidInput);
}

TEST(Decide, ThresholdIsInclusive) {
  EXPECT_TRUE(aggregate::decide(7, 7).accept);
  EXPECT_TRUE(aggregate::decide(6.667, 6.667).accept);
  EXPECT_FALSE(aggregate::decide(6.6, 6.667).accept);
  EXPECT_DOUBLE_EQ(aggregate::decide(8, 7).margin, 1.0);
}

TEST(Gls, HandExamples) {
  EXPECT_EQ(aggregate::gls_weights(std::vector<double>{4}).values(), (std::vector<double>{1.0}));
  const auto w = aggregate::gls_weights(std::vector<double>{1, 2, 2});
  EXPECT_NEAR(w[0], 0.5, 1e-15);
  EXPECT_NEAR(w[1], 0.25, 1e-15);
  EXPECT_NEAR(w[2], 0.25, 1e-15);
  const auto u = aggregate::gls_weights(std::vector<double>{1, 1, 1});
  for (double x : u.values()) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
  EXPECT_THROW(aggregate::gls_weights(std::vector<double>{1, 0}), InvalidInput);
}

TEST(PanelVariance, HandExamples) {
  EXPECT_DOUBLE_EQ(
      aggregate::panel_variance(ReviewerWeights::make({0.5, 0.5}), std::vector<double>{1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(aggregate::panel_variance(ReviewerWeights::uniform(1), std::vector<double>{2.5}),
                   2.5);
  EXPECT_NEAR(aggregate::panel_variance(ReviewerWeights::uniform(4), std::vector<double>{2, 2, 2, 2}),
              0.5, 1e-15);
}

TEST(GlsProperty, NoSimplexGridPointBeatsGls) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c_dist(0.05, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> c{c_dist(rng), c_dist(rng), c_dist(rng)};
    const double gls = aggregate::panel_variance(aggregate::gls_weights(c), c);
    EXPECT_LE(gls, testing::min_panel_variance_on_simplex(c) + 1e-12);
  }
}

TEST(GlsProperty, ClosedFormMinimum) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> c_dist(0.1, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> c(1 + trial % 6);
    double inv = 0.0;
    for (auto& x : c) inv += 1.0 / (x = c_dist(rng));
    EXPECT_NEAR(aggregate::panel_variance(aggregate::gls_weights(c), c), 1.0 / inv, 1e-12);
  }
}

}  // namespace
}  // namespace revcal
