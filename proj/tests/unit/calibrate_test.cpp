// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace revcal {
namespace {

using calibrate::Cell;
using calibrate::CurvePoint;

std::vector<CalibrationRecord> six_records() {
  const std::vector<std::pair<double, bool>> sy{{4, false}, {5, false}, {6, true},
                                                {7, false}, {8, true},  {9, true}};
  std::vector<CalibrationRecord> out;
  for (std::size_t i = 0; i < sy.size(); ++i) {
    out.push_back(CalibrationRecord::make("s" + std::to_string(i), sy[i].first, sy[i].second,
                                          sy[i].second ? "accept" : "reject"));
  }
  return out;
}

std::vector<Cell> cells_with(const std::vector<std::int64_t>& pops) {
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < pops.size(); ++i) cells.push_back(Cell{i, 0, pops[i], 0});
  return cells;
}

std::vector<std::int64_t> quotas(const calibrate::StratificationPlan& plan) {
  std::vector<std::int64_t> q;
  for (const auto& c : plan.cells) q.push_back(c.quota);
  return q;
}

TEST(BinOf, HalfOpenBinsWithClosedLastBin) {
  const std::vector<double> edges{1, 4, 7, 10};
  EXPECT_EQ(calibrate::bin_of(1, edges), 0u);
  EXPECT_EQ(calibrate::bin_of(3.999, edges), 0u);
  EXPECT_EQ(calibrate::bin_of(4, edges), 1u);
  EXPECT_EQ(calibrate::bin_of(10, edges), 2u);
  EXPECT_THROW(calibrate::bin_of(0.5, edges), InvalidInput);
  EXPECT_THROW(calibrate::bin_of(10.5, edges), InvalidInput);
}

TEST(AllocateQuotas, LargestRemainderHandExamples) {
  EXPECT_EQ(quotas(calibrate::allocate_quotas(cells_with({46, 34, 20}), 10)),
            (std::vector<std::int64_t>{5, 3, 2}));
  EXPECT_EQ(quotas(calibrate::allocate_quotas(cells_with({55, 30, 15}), 10)),
            (std::vector<std::int64_t>{6, 3, 1}));
  EXPECT_EQ(quotas(calibrate::allocate_quotas(cells_with({7, 0, 5}), 12)),
            (std::vector<std::int64_t>{7, 0, 5}));
}

TEST(AllocateQuotas, RejectsImpossibleRequests) {
  EXPECT_THROW(calibrate::allocate_quotas(cells_with({3, 4}), 8), InvalidInput);
  EXPECT_THROW(calibrate::allocate_quotas(cells_with({3, 4}), 0), InvalidInput);
  EXPECT_THROW(calibrate::allocate_quotas(cells_with({0, 0}), 1), InvalidInput);
}

TEST(CellPopulations, CountsEveryCellOfTheGrid) {
  const std::vector<double> edges{1, 5, 10};
  const std::vector<std::string> vocab{"accept", "reject"};
  std::vector<CalibrationRecord> pool{CalibrationRecord::make("a", 2, true, "accept"),
                                      CalibrationRecord::make("b", 3, false, "reject"),
                                      CalibrationRecord::make("c", 9, false, "reject"),
                                      CalibrationRecord::make("d", 10, true, "accept")};
  const auto cells = calibrate::cell_populations(pool, edges, vocab);
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[0], (Cell{0, 0, 1, 0}));
  EXPECT_EQ(cells[1], (Cell{0, 1, 1, 0}));
  EXPECT_EQ(cells[2], (Cell{1, 0, 1, 0}));
  EXPECT_EQ(cells[3], (Cell{1, 1, 1, 0}));
  pool.push_back(CalibrationRecord::make("e", 5, true, "withdrawn"));
  EXPECT_THROW(calibrate::cell_populations(pool, edges, vocab), InvalidInput);
}

std::vector<CalibrationRecord> random_pool(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> score(1.0, 10.0);
  std::bernoulli_distribution coin(0.35);
  std::vector<CalibrationRecord> pool;
  for (std::size_t i = 0; i < n; ++i) {
    const bool a = coin(rng);
    pool.push_back(CalibrationRecord::make("r" + std::to_string(i), score(rng), a,
                                           a ? "accept" : "reject"));
  }
  return pool;
}

TEST(StratifiedSample, DrawsExactlyTheQuotaPerCell) {
  std::vector<CalibrationRecord> pool;
  const std::vector<std::pair<double, int>> spec{{2.0, 46}, {5.0, 34}, {8.0, 20}};
  for (const auto& [s, n] : spec) {
    for (int i = 0; i < n; ++i) {
      pool.push_back(CalibrationRecord::make("p" + std::to_string(pool.size()), s, false, "reject"));
    }
  }
  const std::vector<double> edges{1, 4, 7, 10};
  const std::vector<std::string> vocab{"reject"};
  const auto plan =
      calibrate::allocate_quotas(calibrate::cell_populations(pool, edges, vocab), 10, edges, vocab);
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto sample = calibrate::stratified_sample(pool, plan, seed);
    std::map<double, int> per_bin;
    for (const auto& r : sample) per_bin[r.agent_score]++;
    EXPECT_EQ(per_bin[2.0], 5);
    EXPECT_EQ(per_bin[5.0], 3);
    EXPECT_EQ(per_bin[8.0], 2);
  }
}

TEST(StratifiedSample, FullQuotaReturnsWholePoolInOrder) {
  std::mt19937_64 rng(4);
  const auto pool = random_pool(rng, 40);
  const std::vector<double> edges{1, 5.5, 10};
  const std::vector<std::string> vocab{"accept", "reject"};
  const auto plan =
      calibrate::allocate_quotas(calibrate::cell_populations(pool, edges, vocab), 40, edges, vocab);
  EXPECT_EQ(calibrate::stratified_sample(pool, plan, 3), pool);
}

TEST(StratifiedProperty, QuotaInvariantsOnRandomPools) {
  std::mt19937_64 rng(21);
  const std::vector<double> edges{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<std::string> vocab{"accept", "reject"};
  for (int trial = 0; trial < 300; ++trial) {
    const auto pool = random_pool(rng, 20 + trial % 400);
    std::uniform_int_distribution<std::int64_t> n_dist(1, static_cast<std::int64_t>(pool.size()));
    const std::int64_t n_cal = n_dist(rng);
    const auto plan = calibrate::allocate_quotas(calibrate::cell_populations(pool, edges, vocab),
                                                 n_cal, edges, vocab);
    std::int64_t total = 0;
    for (const auto& c : plan.cells) {
      total += c.quota;
      EXPECT_LE(c.quota, c.population);
      EXPECT_GE(c.quota, 0);
      if (plan.overflow_reallocations == 0) EXPECT_LT(std::abs(c.quota - plan.target(c)), 1.0);
    }
    EXPECT_EQ(total, n_cal);

    const auto a = calibrate::stratified_sample(pool, plan, 1234 + trial);
    const auto b = calibrate::stratified_sample(pool, plan, 1234 + trial);
    EXPECT_EQ(a, b);
    EXPECT_EQ(static_cast<std::int64_t>(a.size()), n_cal);
  }
}

TEST(StratifiedProperty, DifferentSeedsUsuallyDiffer) {
  std::mt19937_64 rng(8);
  const auto pool = random_pool(rng, 300);
  const std::vector<double> edges{1, 10};
  const std::vector<std::string> vocab{"accept", "reject"};
  const auto plan =
      calibrate::allocate_quotas(calibrate::cell_populations(pool, edges, vocab), 30, edges, vocab);
  EXPECT_NE(calibrate::stratified_sample(pool, plan, 1), calibrate::stratified_sample(pool, plan, 2));
}

TEST(EmpiricalAcceptance, HandExamples) {
  const std::vector<double> s{7, 6, 8};
  EXPECT_NEAR(calibrate::empirical_acceptance(s, 7), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(calibrate::empirical_acceptance(s, 1), 1.0);
  EXPECT_EQ(calibrate::empirical_acceptance(s, 9), 0.0);
}

TEST(RateMatching, UniformIntegerScores) {
  std::vector<double> s;
  for (int v = 1; v <= 10; ++v) s.insert(s.end(), 20, v);
  EXPECT_EQ(calibrate::rate_matching_threshold(s, 0.3173), 8.0);
}

TEST(RateMatching, ExactMatchAndExtremes) {
  const std::vector<double> s{5, 5, 6, 6};
  EXPECT_EQ(calibrate::rate_matching_threshold(s, 0.5), 6.0);
  EXPECT_EQ(calibrate::rate_matching_threshold(s, 0.999999), 5.0);
  EXPECT_TRUE(std::isinf(calibrate::rate_matching_threshold(s, 0.01)));
}

TEST(RateMatching, TiesResolveToTheSmallestThreshold) {
  const std::vector<double> s{1, 2, 3, 4};
  EXPECT_EQ(calibrate::rate_matching_threshold(s, 0.625), 2.0);
}

TEST(RateMatching, MatchesExhaustiveScan) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> v(1, 10);
  std::uniform_real_distribution<double> a(0.01, 0.99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(5 + trial % 40);
    for (auto& x : s) x = v(rng);
    const double target = a(rng);
    double best_tau = std::numeric_limits<double>::infinity();
    double best_gap = target;
    for (int t = 10; t >= 1; --t) {
      const double rate = static_cast<double>(std::count_if(s.begin(), s.end(),
                                                            [&](double x) { return x >= t; })) /
                          s.size();
      if (std::find(s.begin(), s.end(), t) == s.end()) continue;
      if (std::abs(rate - target) <= best_gap) {
        best_gap = std::abs(rate - target);
        best_tau = t;
      }
    }
    EXPECT_EQ(calibrate::rate_matching_threshold(s, target), best_tau);
  }
}

TEST(TailPoints, SixRecordFixture) {
  const auto recs = six_records();
  const std::vector<double> t{4, 5, 6, 7, 8, 9};
  const auto pts = calibrate::tail_probability_points(recs, t);
  const std::vector<double> raw{0.5, 0.6, 0.75, 2.0 / 3.0, 1.0, 1.0};
  const std::vector<double> w{6, 5, 4, 3, 2, 1};
  ASSERT_EQ(pts.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(pts[i].t, t[i]);
    EXPECT_NEAR(pts[i].value, raw[i], 1e-15);
    EXPECT_EQ(pts[i].weight, w[i]);
  }
}

TEST(TailPoints, AllAcceptedOrAllRejected) {
  std::vector<CalibrationRecord> yes, no;
  for (int i = 1; i <= 5; ++i) {
    yes.push_back(CalibrationRecord::make("y", i, true, "a"));
    no.push_back(CalibrationRecord::make("n", i, false, "r"));
  }
  const std::vector<double> t{1, 3, 5};
  for (const auto& p : calibrate::tail_probability_points(yes, t)) EXPECT_EQ(p.value, 1.0);
  for (const auto& p : calibrate::tail_probability_points(no, t)) EXPECT_EQ(p.value, 0.0);
}

TEST(Isotonic, HandExamples) {
  const std::vector<CurvePoint> two{{1, 1, 1}, {2, 0, 1}};
  const auto f = calibrate::isotonic_fit(two);
  EXPECT_EQ(f.knots[0].value, 0.5);
  EXPECT_EQ(f.knots[1].value, 0.5);

  const std::vector<CurvePoint> mono{{1, 0.1, 2}, {2, 0.4, 1}, {3, 0.9, 5}};
  const auto g = calibrate::isotonic_fit(mono);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(g.knots[i].value, mono[i].value);

  const auto recs = six_records();
  const auto pts = calibrate::tail_probability_points(recs, calibrate::distinct_scores(recs));
  const auto h = calibrate::isotonic_fit(pts);
  const std::vector<double> want{0.5, 0.6, 5.0 / 7.0, 5.0 / 7.0, 1.0, 1.0};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(h.knots[i].value, want[i], 1e-15);
}

TEST(Isotonic, ValidatesInput) {
  EXPECT_THROW(calibrate::isotonic_fit(std::vector<CurvePoint>{{2, 0.5, 1}, {1, 0.5, 1}}),
               InvalidInput);
  EXPECT_THROW(calibrate::isotonic_fit(std::vector<CurvePoint>{{1, 0.5, 0}}), InvalidInput);
  EXPECT_THROW(calibrate::isotonic_fit(std::vector<CurvePoint>{{1, 1.5, 1}}), InvalidInput);
}

std::vector<CurvePoint> random_curve(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.1, 10.0);
  std::vector<CurvePoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({double(i), value(rng), weight(rng)});
  return pts;
}

std::vector<testing::WeightedPoint> as_weighted(const std::vector<CurvePoint>& pts) {
  std::vector<testing::WeightedPoint> out;
  for (const auto& p : pts) out.push_back({p.value, p.weight});
  return out;
}

TEST(IsotonicProperty, MatchesExactPartitionOracle) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto pts = random_curve(rng, 1 + trial % 8);
    const auto fit = calibrate::isotonic_fit(pts);
    const auto want = testing::isotonic_partition_oracle(as_weighted(pts));
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR(fit.knots[i].value, want[i], 1e-12);
  }
}

TEST(IsotonicProperty, IdempotentMonotoneAndMeanPreserving) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const auto pts = random_curve(rng, 1 + trial % 30);
    const auto once = calibrate::isotonic_fit(pts);
    const auto twice = calibrate::isotonic_fit(once.knots);
    double sw = 0, before = 0, after = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_NEAR(twice.knots[i].value, once.knots[i].value, 1e-12);
      if (i > 0) EXPECT_LE(once.knots[i - 1].value, once.knots[i].value);
      sw += pts[i].weight;
      before += pts[i].weight * pts[i].value;
      after += pts[i].weight * once.knots[i].value;
    }
    EXPECT_NEAR(before / sw, after / sw, 1e-12);
  }
}

TEST(Tau05, HandExamples) {
  const auto recs = six_records();
  EXPECT_EQ(calibrate::fit_tau_05(recs), 4.0);
  calibrate::IsotonicCurve never{{{5, 0.2, 1}, {6, 0.4, 1}, {7, 0.45, 1}}};
  EXPECT_THROW(calibrate::tau_05(never), CalibrationInfeasible);
  calibrate::IsotonicCurve boundary{{{5, 0.4, 1}, {6, 0.5, 1}, {7, 0.9, 1}}};
  EXPECT_EQ(calibrate::tau_05(boundary), 6.0);
}

TEST(Tau05Property, FlippingARejectToAcceptNeverRaisesTau) {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<int> v(1, 10);
  std::bernoulli_distribution coin(0.5);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<CalibrationRecord> recs;
    for (int i = 0; i < 30; ++i) {
      const bool a = coin(rng);
      recs.push_back(CalibrationRecord::make("r", v(rng), a, a ? "accept" : "reject"));
    }
    double before;
    try {
      before = calibrate::fit_tau_05(recs);
    } catch (const CalibrationInfeasible&) {
      continue;
    }
    for (auto& r : recs) {
      if (r.human_accept) continue;
      auto flipped = recs;
      flipped[&r - recs.data()].human_accept = true;
      EXPECT_LE(calibrate::fit_tau_05(flipped), before);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(FitThresholds, BundlesBothThresholds) {
  const auto th = calibrate::fit_thresholds(six_records(), 0.5);
  EXPECT_EQ(th.tau_rate, 7.0);
  EXPECT_EQ(th.tau_05, 4.0);
  EXPECT_EQ(th.calibration_size, 6);
}

}  // namespace
}  // namespace revcal
