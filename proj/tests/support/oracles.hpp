// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations used only by tests. None of them
// share code with the library.

#ifndef REVCAL_TESTS_ORACLES_HPP
#define REVCAL_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace revcal::testing {

struct WeightedPoint {
  double value;
  double weight;
};

/// Least-squares non-decreasing fit by dynamic programming over a uniform
/// grid on [0, 1]. Accurate to one grid step.
inline std::vector<double> isotonic_grid_oracle(const std::vector<WeightedPoint>& pts,
                                                double step = 1e-3) {
  const int levels = static_cast<int>(std::lround(1.0 / step)) + 1;
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> best(n, std::vector<double>(levels));
  std::vector<std::vector<int>> arg(n, std::vector<int>(levels));
  for (std::size_t i = 0; i < n; ++i) {
    double run_min = std::numeric_limits<double>::infinity();
    int run_arg = 0;
    for (int g = 0; g < levels; ++g) {
      if (i > 0 && best[i - 1][g] < run_min) {
        run_min = best[i - 1][g];
        run_arg = g;
      }
      const double d = g * step - pts[i].value;
      best[i][g] = pts[i].weight * d * d + (i > 0 ? run_min : 0.0);
      arg[i][g] = run_arg;
    }
  }
  std::vector<double> fit(n);
  int g = static_cast<int>(std::min_element(best[n - 1].begin(), best[n - 1].end()) -
                           best[n - 1].begin());
  for (std::size_t i = n; i-- > 0;) {
    fit[i] = g * step;
    g = arg[i][g];
  }
  return fit;
}

/// Exact least-squares non-decreasing fit: enumerates every split of the
/// sequence into contiguous blocks, keeps those whose block means do not
/// decrease, and returns the cheapest. Exponential; use for n <= 12.
inline std::vector<double> isotonic_partition_oracle(const std::vector<WeightedPoint>& pts) {
  const std::size_t n = pts.size();
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> best;
  for (std::uint32_t cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
    std::vector<double> fit(n);
    double cost = 0.0, prev_mean = -std::numeric_limits<double>::infinity();
    bool ok = true;
    std::size_t start = 0;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const bool end_block = i == n - 1 || (cuts >> i & 1u);
      if (!end_block) continue;
      double sw = 0.0, swv = 0.0;
      for (std::size_t k = start; k <= i; ++k) {
        sw += pts[k].weight;
        swv += pts[k].weight * pts[k].value;
      }
      const double mean = swv / sw;
      if (mean < prev_mean) ok = false;
      for (std::size_t k = start; k <= i; ++k) {
        fit[k] = mean;
        cost += pts[k].weight * (pts[k].value - mean) * (pts[k].value - mean);
      }
      prev_mean = mean;
      start = i + 1;
    }
    if (ok && cost < best_cost) {
      best_cost = cost;
      best = fit;
    }
  }
  return best;
}

/// Smallest panel variance sum w_i^2 c_i over the probability simplex grid
/// with the given step, for three reviewers.
inline double min_panel_variance_on_simplex(const std::vector<double>& c, double step = 0.01) {
  const int n = static_cast<int>(std::lround(1.0 / step));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      const double w0 = i * step, w1 = j * step, w2 = (n - i - j) * step;
      best = std::min(best, w0 * w0 * c[0] + w1 * w1 * c[1] + w2 * w2 * c[2]);
    }
  }
  return best;
}

}  // namespace revcal::testing

#endif  // REVCAL_TESTS_ORACLES_HPP
