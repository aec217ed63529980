// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "core/aggregate.hpp"
#include "core/bounds.hpp"
#include "core/calibrate.hpp"
#include "core/rng.hpp"

namespace revcal::simulate {

namespace {

// Substream ids below this are reserved for reviewers (1 + m).
constexpr std::uint64_t kLatentSubstream = 0;
constexpr std::uint64_t kOutcomeSubstream = 1ULL << 32;
constexpr int kMaxResample = 10000;

}  // namespace

std::pair<double, double> LatentDistribution::support() const {
  if (kind == Kind::kUniform) return {a, b};
  return {a - 3.0 * b, a + 3.0 * b};
}

void CohortSpec::validate() const {
  if (n_papers < 1) throw InvalidInput("n_papers: must be at least 1");
  if (m_reviewers < 1) throw InvalidInput("m_reviewers: must be at least 1");
  if (static_cast<std::int64_t>(noise.per_reviewer_variance.size()) != m_reviewers) {
    throw InvalidInput(fmt::format("noise: {} variances for {} reviewers",
                                   noise.per_reviewer_variance.size(), m_reviewers));
  }
  NoiseProfile::make(noise.per_reviewer_variance, noise.lo, noise.hi);
  if (latent.kind == LatentDistribution::Kind::kUniform) {
    if (!(latent.a < latent.b)) throw InvalidInput("latent_distribution: need lo < hi");
    if (latent.a < noise.lo || latent.b > noise.hi) {
      throw InvalidInput("latent_distribution: support must lie within the score bounds");
    }
  } else {
    if (!(latent.b > 0.0)) throw InvalidInput("latent_distribution: sd must be positive");
    if (latent.a < noise.lo || latent.a > noise.hi) {
      throw InvalidInput("latent_distribution: mean must lie within the score bounds");
    }
  }
}

bool CohortSpec::bound_validation_ready() const {
  const double sd = std::sqrt(*std::max_element(noise.per_reviewer_variance.begin(),
                                                noise.per_reviewer_variance.end()));
  const auto [lo, hi] = latent.support();
  return lo >= noise.lo + 3.0 * sd && hi <= noise.hi - 3.0 * sd;
}

CohortSpec CohortSpec::with_reviewers(std::int64_t m) const {
  if (m < 1) throw InvalidInput("m_reviewers: must be at least 1");
  CohortSpec out = *this;
  out.m_reviewers = m;
  std::vector<double> v(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = noise.per_reviewer_variance[i % noise.per_reviewer_variance.size()];
  }
  out.noise = NoiseProfile::make(std::move(v), noise.lo, noise.hi);
  return out;
}

Cohort generate_cohort(const CohortSpec& spec) {
  spec.validate();
  const double lo = spec.noise.lo;
  const double hi = spec.noise.hi;
  Cohort cohort{spec, {}};
  cohort.papers.reserve(static_cast<std::size_t>(spec.n_papers));
  for (std::int64_t i = 0; i < spec.n_papers; ++i) {
    const auto paper_key = static_cast<std::uint64_t>(i);
    CounterStream latent_rng(spec.seed, paper_key, kLatentSubstream);
    double mu = 0.0;
    if (spec.latent.kind == LatentDistribution::Kind::kUniform) {
      mu = latent_rng.uniform(spec.latent.a, spec.latent.b);
    } else {
      // truncated to the score range
      int tries = 0;
      do {
        mu = spec.latent.a + spec.latent.b * latent_rng.normal();
      } while ((mu < lo || mu > hi) && ++tries < kMaxResample);
      mu = std::clamp(mu, lo, hi);
    }

    Paper p{mu, std::vector<double>(static_cast<std::size_t>(spec.m_reviewers))};
    for (std::size_t m = 0; m < p.scores.size(); ++m) {
      CounterStream noise_rng(spec.seed, paper_key, 1 + m);
      const double sd = std::sqrt(spec.noise.per_reviewer_variance[m]);
      double s = mu + sd * noise_rng.normal();
      switch (spec.clip_mode) {
        case ClipMode::kClip:
          s = std::clamp(s, lo, hi);
          break;
        case ClipMode::kRejectResample: {
          int tries = 0;
          while ((s < lo || s > hi) && ++tries < kMaxResample) s = mu + sd * noise_rng.normal();
          s = std::clamp(s, lo, hi);
          break;
        }
        case ClipMode::kNone:
          break;
      }
      p.scores[m] = s;
    }
    cohort.papers.push_back(std::move(p));
  }
  return cohort;
}

double consensus(const Paper& paper, const ReviewerWeights& weights) {
  if (weights.size() != paper.scores.size()) {
    throw InvalidInput(fmt::format("weights: {} weights for {} reviewer scores", weights.size(),
                                   paper.scores.size()));
  }
  double s = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) s += weights[m] * paper.scores[m];
  return s;
}

std::vector<double> default_margin_edges(const Cohort& cohort, double tau, std::size_t n_bins) {
  if (n_bins == 0) throw InvalidInput("n_bins: must be at least 1");
  double max_gamma = 0.0;
  for (const auto& p : cohort.papers) max_gamma = std::max(max_gamma, std::abs(p.latent - tau));
  if (max_gamma == 0.0) max_gamma = 1.0;
  std::vector<double> edges(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) {
    edges[i] = max_gamma * static_cast<double>(i) / static_cast<double>(n_bins);
  }
  edges.back() = max_gamma;
  return edges;
}

std::vector<MarginBinRow> margin_experiment(const Cohort& cohort, const ReviewerWeights& weights,
                                            double tau, std::span<const double> bin_edges) {
  if (bin_edges.size() < 2) throw InvalidInput("bin_edges: need at least two edges");
  for (std::size_t i = 1; i < bin_edges.size(); ++i) {
    if (!(bin_edges[i - 1] < bin_edges[i])) {
      throw InvalidInput("bin_edges: must be strictly increasing");
    }
  }
  if (bin_edges.front() < 0.0) throw InvalidInput("bin_edges: margins are non-negative");

  const std::size_t n_bins = bin_edges.size() - 1;
  std::vector<std::int64_t> count(n_bins, 0);
  std::vector<std::int64_t> wrong(n_bins, 0);
  for (const auto& p : cohort.papers) {
    const double gamma = std::abs(p.latent - tau);
    const std::size_t b = calibrate::bin_of(gamma, bin_edges);
    const bool latent_accept = p.latent >= tau;
    const bool observed_accept = consensus(p, weights) >= tau;
    ++count[b];
    if (latent_accept != observed_accept) ++wrong[b];
  }

  const BoundInputs inputs = bounds::scalar_bound_inputs(weights, cohort.spec.noise);
  std::vector<MarginBinRow> rows;
  rows.reserve(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    MarginBinRow row{bin_edges[b], bin_edges[b + 1], std::nullopt, std::nullopt, 1.0, count[b],
                     static_cast<std::int64_t>(weights.size())};
    const double mid = row.gamma_mid();
    row.theoretical_bound = mid > 0.0 ? bounds::margin_misclassification_bound(mid, inputs) : 1.0;
    if (count[b] > 0) {
      const double n = static_cast<double>(count[b]);
      const double rate = static_cast<double>(wrong[b]) / n;
      row.empirical_rate = rate;
      row.std_error = std::sqrt(rate * (1.0 - rate) / n);
    }
    rows.push_back(row);
  }
  return rows;
}

void PopulationSpec::validate() const {
  cohort.validate();
  if (!std::isfinite(link_slope) || !(link_slope > 0.0)) {
    throw InvalidInput("link_slope: must be positive");
  }
  if (!std::isfinite(link_center)) throw InvalidInput("link_center: must be finite");
}

std::vector<CalibrationRecord> generate_calibration_population(const PopulationSpec& spec) {
  spec.validate();
  const Cohort cohort = generate_cohort(spec.cohort);
  const auto weights = ReviewerWeights::uniform(static_cast<std::size_t>(spec.cohort.m_reviewers));
  std::vector<CalibrationRecord> out;
  out.reserve(cohort.papers.size());
  for (std::size_t i = 0; i < cohort.papers.size(); ++i) {
    const auto& p = cohort.papers[i];
    CounterStream rng(spec.cohort.seed, i, kOutcomeSubstream);
    const double prob = 1.0 / (1.0 + std::exp(-spec.link_slope * (p.latent - spec.link_center)));
    const bool accept = rng.bernoulli(prob);
    out.push_back(CalibrationRecord::make(fmt::format("syn-{}", i), consensus(p, weights), accept,
                                          accept ? "accept" : "reject"));
  }
  return out;
}

BootstrapResult threshold_bootstrap(std::span<const CalibrationRecord> population,
                                    std::span<const std::int64_t> n_cal_grid,
                                    std::int64_t replicates, std::uint64_t seed) {
  if (population.empty()) throw InvalidInput("population: must be non-empty");
  if (replicates < 1) throw InvalidInput("replicates: must be at least 1");
  const auto pop_size = static_cast<std::int64_t>(population.size());
  for (auto n : n_cal_grid) {
    if (n < 1 || n > pop_size) {
      throw InvalidInput(fmt::format("n_cal_grid: {} outside [1, {}]", n, pop_size));
    }
  }

  BootstrapResult result{calibrate::fit_tau_05(population), {}};
  std::vector<std::size_t> idx(population.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<CalibrationRecord> sample;
  std::vector<std::pair<std::size_t, std::size_t>> swaps;

  for (auto n_cal : n_cal_grid) {
    const auto n = static_cast<std::size_t>(n_cal);
    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>(replicates));
    std::int64_t failures = 0;
    for (std::int64_t r = 0; r < replicates; ++r) {
      CounterStream rng(seed, static_cast<std::uint64_t>(n_cal), static_cast<std::uint64_t>(r));
      // Partial Fisher-Yates, undone afterwards so idx stays the identity.
      swaps.clear();
      sample.clear();
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = j + static_cast<std::size_t>(rng.below(idx.size() - j));
        std::swap(idx[j], idx[k]);
        swaps.emplace_back(j, k);
        sample.push_back(population[idx[j]]);
      }
      for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) std::swap(idx[it->first], idx[it->second]);

      try {
        errors.push_back(std::abs(calibrate::fit_tau_05(sample) - result.reference_tau05));
      } catch (const CalibrationInfeasible&) {
        ++failures;
      }
    }
    ThresholdErrorRow row{n_cal, std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::quiet_NaN(), failures, replicates};
    if (!errors.empty()) {
      const double k = static_cast<double>(errors.size());
      const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / k;
      double ss = 0.0;
      for (double e : errors) ss += (e - mean) * (e - mean);
      row.mean_abs_error = mean;
      row.std_error = errors.size() > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
    }
    result.rows.push_back(row);
  }
  return result;
}

std::vector<VarianceRow> variance_experiment(const CohortSpec& base_spec,
                                             std::span<const std::int64_t> m_grid) {
  base_spec.validate();
  std::vector<VarianceRow> rows;
  const double width = base_spec.noise.range_width();
  for (auto m : m_grid) {
    const Cohort cohort = generate_cohort(base_spec.with_reviewers(m));
    const auto weights = ReviewerWeights::uniform(static_cast<std::size_t>(m));
    std::vector<double> diff;
    diff.reserve(cohort.papers.size());
    for (const auto& p : cohort.papers) diff.push_back(consensus(p, weights) - p.latent);
    const double n = static_cast<double>(diff.size());
    const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / n;
    double ss = 0.0;
    for (double d : diff) ss += (d - mean) * (d - mean);
    rows.push_back(VarianceRow{m, diff.size() > 1 ? ss / (n - 1.0) : 0.0,
                               width * width / static_cast<double>(m)});
  }
  return rows;
}

double log_log_slope(std::span<const ThresholdErrorRow> rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (std::isfinite(r.mean_abs_error) && r.mean_abs_error > 0.0) {
      pts.emplace_back(std::log(static_cast<double>(r.n_cal)), std::log(r.mean_abs_error));
    }
  }
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

CheckResult check_bound_dominance(std::span<const MarginBinRow> rows, double se_factor) {
  CheckResult res;
  for (const auto& r : rows) {
    if (!r.empirical_rate) continue;
    const double limit = r.theoretical_bound + se_factor * r.std_error.value_or(0.0);
    if (*r.empirical_rate > limit) {
      res.fail(fmt::format("M={} bin [{:.4f}, {:.4f}): empirical {:.5f} exceeds bound {:.5f} + "
                           "{}se",
                           r.m, r.gamma_lo, r.gamma_hi, *r.empirical_rate, r.theoretical_bound,
                           se_factor));
    }
  }
  return res;
}

CheckResult check_panel_ordering(std::span<const MarginBinRow> smaller_panel,
                                 std::span<const MarginBinRow> larger_panel,
                                 std::int64_t min_count) {
  CheckResult res;
  if (smaller_panel.size() != larger_panel.size()) {
    res.fail("panel curves use different bins");
    return res;
  }
  for (std::size_t b = 0; b < smaller_panel.size(); ++b) {
    const auto& lo = smaller_panel[b];
    const auto& hi = larger_panel[b];
    if (lo.gamma_lo != hi.gamma_lo || lo.gamma_hi != hi.gamma_hi) {
      res.fail("panel curves use different bins");
      return res;
    }
    if (lo.count < min_count || hi.count < min_count) continue;
    if (*hi.empirical_rate > *lo.empirical_rate) {
      res.fail(fmt::format("bin [{:.4f}, {:.4f}): M={} rate {:.5f} above M={} rate {:.5f}",
                           lo.gamma_lo, lo.gamma_hi, hi.m, *hi.empirical_rate, lo.m,
                           *lo.empirical_rate));
    }
  }
  return res;
}

CheckResult check_threshold_decay(std::span<const ThresholdErrorRow> rows, double slope_lo,
                                  double slope_hi) {
  CheckResult res;
  const double slope = log_log_slope(rows);
  if (!(slope >= slope_lo && slope <= slope_hi)) {
    res.fail(fmt::format("log-log slope {:.4f} outside [{}, {}]", slope, slope_lo, slope_hi));
  }
  int increases = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    if (!(b.mean_abs_error > a.mean_abs_error)) continue;
    ++increases;
    if (b.mean_abs_error - a.mean_abs_error > a.std_error + b.std_error) {
      res.fail(fmt::format("error rises from n_cal={} to n_cal={} beyond the std-error band",
                           a.n_cal, b.n_cal));
    }
  }
  if (increases > 1) res.fail(fmt::format("{} increases in the error curve (one allowed)", increases));
  return res;
}

CheckResult check_variance_scaling(std::span<const VarianceRow> rows, double range_width,
                                   double ratio_lo, double ratio_hi) {
  CheckResult res;
  if (rows.empty()) {
    res.fail("no variance rows");
    return res;
  }
  for (const auto& r : rows) {
    if (r.proxy != range_width * range_width / static_cast<double>(r.m)) {
      res.fail(fmt::format("proxy at M={} is not (b-a)^2/M", r.m));
    }
  }
  auto [lo_it, hi_it] = std::minmax_element(
      rows.begin(), rows.end(), [](const VarianceRow& a, const VarianceRow& b) { return a.m < b.m; });
  if (lo_it->m == hi_it->m) return res;
  const double expected = static_cast<double>(hi_it->m) / static_cast<double>(lo_it->m);
  const double ratio = lo_it->var_empirical / hi_it->var_empirical;
  if (!(ratio >= ratio_lo * expected && ratio <= ratio_hi * expected)) {
    res.fail(fmt::format("variance ratio M={}/M={} is {:.4f}, outside [{:.4f}, {:.4f}]", lo_it->m,
                         hi_it->m, ratio, ratio_lo * expected, ratio_hi * expected));
  }
  return res;
}

}  // namespace revcal::simulate
