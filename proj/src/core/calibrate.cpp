// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "core/rng.hpp"

namespace revcal::calibrate {

double StratificationPlan::target(const Cell& c) const {
  return static_cast<double>(c.population) * static_cast<double>(n_cal) /
         static_cast<double>(total_population);
}

std::size_t bin_of(double score, std::span<const double> bin_edges) {
  if (bin_edges.size() < 2) throw InvalidInput("bin_edges: need at least two edges");
  if (!(score >= bin_edges.front() && score <= bin_edges.back())) {
    throw InvalidInput(fmt::format("score: {} outside bin range [{}, {}]", score,
                                   bin_edges.front(), bin_edges.back()));
  }
  auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), score);
  const auto idx = static_cast<std::size_t>(it - bin_edges.begin());
  // upper_bound returns end() only for score == t_B, which joins the last bin
  return std::min(idx, bin_edges.size() - 1) - 1;
}

std::vector<Cell> cell_populations(std::span<const CalibrationRecord> pool,
                                   std::span<const double> bin_edges,
                                   std::span<const std::string> status_vocabulary) {
  if (bin_edges.size() < 2) throw InvalidInput("bin_edges: need at least two edges");
  for (std::size_t i = 1; i < bin_edges.size(); ++i) {
    if (!(bin_edges[i - 1] < bin_edges[i])) {
      throw InvalidInput("bin_edges: must be strictly increasing");
    }
  }
  if (status_vocabulary.empty()) throw InvalidInput("status_vocabulary: must be non-empty");
  const std::size_t n_bins = bin_edges.size() - 1;
  const std::size_t n_status = status_vocabulary.size();
  std::vector<Cell> cells;
  cells.reserve(n_bins * n_status);
  for (std::size_t b = 0; b < n_bins; ++b) {
    for (std::size_t c = 0; c < n_status; ++c) cells.push_back(Cell{b, c, 0, 0});
  }
  for (const auto& rec : pool) {
    const std::size_t b = bin_of(rec.agent_score, bin_edges);
    auto it = std::find(status_vocabulary.begin(), status_vocabulary.end(), rec.status);
    if (it == status_vocabulary.end()) {
      throw InvalidInput(fmt::format("status: '{}' of record '{}' is not in the vocabulary",
                                     rec.status, rec.submission_id));
    }
    const auto c = static_cast<std::size_t>(it - status_vocabulary.begin());
    ++cells[b * n_status + c].population;
  }
  return cells;
}

StratificationPlan allocate_quotas(std::vector<Cell> cells, std::int64_t n_cal,
                                   std::vector<double> bin_edges,
                                   std::vector<std::string> status_vocabulary) {
  if (cells.empty()) throw InvalidInput("cell_populations: empty pool");
  std::int64_t total = 0;
  for (const auto& c : cells) {
    if (c.population < 0) throw InvalidInput("cell_populations: negative population");
    total += c.population;
  }
  if (total == 0) throw InvalidInput("cell_populations: empty pool");
  if (n_cal < 1) throw InvalidInput("n_cal: must be at least 1");
  if (n_cal > total) {
    throw InvalidInput(
        fmt::format("n_cal: {} exceeds the pool population {}", n_cal, total));
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return std::tie(a.bin, a.status) < std::tie(b.bin, b.status);
  });

  // Exact integer arithmetic: n'_{b,c} = N_{b,c} N_cal / N_star.
  std::vector<__int128> remainder(cells.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const __int128 num = static_cast<__int128>(cells[i].population) * n_cal;
    cells[i].quota = static_cast<std::int64_t>(num / total);
    remainder[i] = num % total;
    assigned += cells[i].quota;
  }
  std::int64_t leftover = n_cal - assigned;

  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });

  StratificationPlan plan;
  for (std::size_t i : order) {
    if (leftover == 0) break;
    if (cells[i].quota < cells[i].population) {
      ++cells[i].quota;
      --leftover;
    } else {
      ++plan.overflow_reallocations;
    }
  }
  if (leftover != 0) throw InvalidInput("n_cal: allocation infeasible for this pool");

  plan.bin_edges = std::move(bin_edges);
  plan.status_vocabulary = std::move(status_vocabulary);
  plan.cells = std::move(cells);
  plan.n_cal = n_cal;
  plan.total_population = total;
  return plan;
}

std::vector<CalibrationRecord> stratified_sample(std::span<const CalibrationRecord> pool,
                                                 const StratificationPlan& plan,
                                                 std::uint64_t seed) {
  const std::size_t n_status = plan.status_vocabulary.size();
  if (plan.bin_edges.size() < 2 || n_status == 0) {
    throw InvalidInput("plan: missing bin edges or status vocabulary");
  }
  const std::size_t n_bins = plan.bin_edges.size() - 1;
  std::vector<std::vector<std::size_t>> members(n_bins * n_status);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const std::size_t b = bin_of(pool[i].agent_score, plan.bin_edges);
    auto it = std::find(plan.status_vocabulary.begin(), plan.status_vocabulary.end(),
                        pool[i].status);
    if (it == plan.status_vocabulary.end()) {
      throw InvalidInput(fmt::format("status: '{}' is not in the vocabulary", pool[i].status));
    }
    members[b * n_status + static_cast<std::size_t>(it - plan.status_vocabulary.begin())]
        .push_back(i);
  }

  std::vector<std::size_t> chosen;
  chosen.reserve(static_cast<std::size_t>(plan.n_cal));
  for (const auto& cell : plan.cells) {
    auto& idx = members.at(cell.bin * n_status + cell.status);
    if (static_cast<std::int64_t>(idx.size()) != cell.population || cell.quota > cell.population) {
      throw InvalidInput(fmt::format("plan: infeasible for this pool at cell (bin {}, status {})",
                                     cell.bin, plan.status_vocabulary[cell.status]));
    }
    // Partial Fisher-Yates: the first `quota` slots become a uniform sample.
    CounterStream rng(seed, cell.bin, cell.status);
    const auto q = static_cast<std::size_t>(cell.quota);
    for (std::size_t j = 0; j < q; ++j) {
      const std::size_t k = j + static_cast<std::size_t>(rng.below(idx.size() - j));
      std::swap(idx[j], idx[k]);
    }
    chosen.insert(chosen.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(q));
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<CalibrationRecord> out;
  out.reserve(chosen.size());
  for (std::size_t i : chosen) out.push_back(pool[i]);
  return out;
}

double empirical_acceptance(std::span<const double> scores, double tau) {
  if (scores.empty()) throw InvalidInput("scores: must be non-empty");
  const auto hits = std::count_if(scores.begin(), scores.end(), [&](double s) { return s >= tau; });
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

double rate_matching_threshold(std::span<const double> scores, double target_rate) {
  if (scores.empty()) throw InvalidInput("scores: must be non-empty");
  if (!(target_rate > 0.0 && target_rate < 1.0)) {
    throw InvalidInput("target_rate: must lie in (0, 1)");
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  double best_tau = std::numeric_limits<double>::infinity();
  double best_gap = target_rate;  // alpha_hat(+inf) = 0
  // Walk candidates from high to low so ties resolve to the smallest tau.
  std::size_t i = sorted.size();
  while (i > 0) {
    const double tau = sorted[i - 1];
    while (i > 0 && sorted[i - 1] == tau) --i;
    const double gap = std::abs((n - static_cast<double>(i)) / n - target_rate);
    if (gap <= best_gap) {
      best_gap = gap;
      best_tau = tau;
    }
  }
  return best_tau;
}

std::vector<CurvePoint> tail_probability_points(std::span<const CalibrationRecord> records,
                                                std::span<const double> candidate_thresholds) {
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.emplace_back(r.agent_score, r.human_accept);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // suffix_accepts[i] = accepts among sorted[i..]
  std::vector<std::int64_t> suffix_accepts(sorted.size() + 1, 0);
  for (std::size_t i = sorted.size(); i > 0; --i) {
    suffix_accepts[i - 1] = suffix_accepts[i] + (sorted[i - 1].second ? 1 : 0);
  }
  std::vector<CurvePoint> out;
  out.reserve(candidate_thresholds.size());
  for (double t : candidate_thresholds) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), t,
                               [](const auto& p, double v) { return p.first < v; });
    const auto start = static_cast<std::size_t>(it - sorted.begin());
    const auto tail = static_cast<std::int64_t>(sorted.size() - start);
    if (tail == 0) {
      throw InvalidInput(fmt::format("candidate_thresholds: no record scores at or above {}", t));
    }
    const auto tail_d = static_cast<double>(tail);
    out.push_back(CurvePoint{t, static_cast<double>(suffix_accepts[start]) / tail_d, tail_d});
  }
  return out;
}

IsotonicCurve isotonic_fit(std::span<const CurvePoint> points) {
  struct Block {
    double weight;
    double weighted_sum;
    std::size_t count;
    double mean() const { return weighted_sum / weight; }
  };
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (i > 0 && !(points[i - 1].t <= p.t)) {
      throw InvalidInput(fmt::format("points[{}]: input is not sorted by t", i));
    }
    if (!(p.weight > 0.0) || !std::isfinite(p.weight)) {
      throw InvalidInput(fmt::format("points[{}]: weight must be positive", i));
    }
    if (!(p.value >= 0.0 && p.value <= 1.0)) {
      throw InvalidInput(fmt::format("points[{}]: value {} outside [0, 1]", i, p.value));
    }
  }

  std::vector<Block> blocks;
  blocks.reserve(points.size());
  for (const auto& p : points) {
    blocks.push_back(Block{p.weight, p.weight * p.value, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      Block top = blocks.back();
      blocks.pop_back();
      auto& prev = blocks.back();
      prev.weight += top.weight;
      prev.weighted_sum += top.weighted_sum;
      prev.count += top.count;
    }
  }

  IsotonicCurve curve;
  curve.knots.reserve(points.size());
  std::size_t i = 0;
  for (const auto& b : blocks) {
    const double fitted = std::clamp(b.mean(), 0.0, 1.0);
    for (std::size_t j = 0; j < b.count; ++j, ++i) {
      curve.knots.push_back(CurvePoint{points[i].t, fitted, points[i].weight});
    }
  }
  return curve;
}

double tau_05(const IsotonicCurve& curve) {
  if (curve.knots.empty()) throw InvalidInput("curve: must be non-empty");
  // Pooled means are ratios of sums; allow for the last-bit rounding of an
  // exact one-half.
  constexpr double kHalf = 0.5 - 1e-12;
  for (const auto& k : curve.knots) {
    if (k.value >= kHalf) return k.t;
  }
  throw CalibrationInfeasible(
      "tau_05: fitted acceptance probability never reaches 1/2 on this calibration set");
}

std::vector<double> distinct_scores(std::span<const CalibrationRecord> records) {
  std::vector<double> s;
  s.reserve(records.size());
  for (const auto& r : records) s.push_back(r.agent_score);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

double fit_tau_05(std::span<const CalibrationRecord> records) {
  if (records.empty()) throw InvalidInput("records: no records");
  const auto candidates = distinct_scores(records);
  const auto points = tail_probability_points(records, candidates);
  return tau_05(isotonic_fit(points));
}

DecisionThresholds fit_thresholds(std::span<const CalibrationRecord> records, double target_rate,
                                  std::string score_source) {
  if (records.empty()) throw InvalidInput("records: no records");
  std::vector<double> scores;
  scores.reserve(records.size());
  for (const auto& r : records) scores.push_back(r.agent_score);
  const double tau_rate = rate_matching_threshold(scores, target_rate);
  const double tau05 = fit_tau_05(records);
  return DecisionThresholds::make(tau_rate, tau05, target_rate,
                                  static_cast<std::int64_t>(records.size()),
                                  std::move(score_source));
}

}  // namespace revcal::calibrate
