// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/bayes.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>
#include <fmt/format.h>

namespace revcal::bayes {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput(fmt::format("alpha: must lie in (0, 1), got {}", alpha));
  }
}

double critical_value(double alpha) { return normal_quantile(1.0 - alpha / 2.0); }

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidInput(fmt::format("p: quantile argument must lie in (0, 1), got {}", p));
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

GaussianPosterior posterior_update(const GaussianPosterior& prior,
                                   std::span<const ScoredReview> reviews) {
  if (reviews.empty()) return prior;
  double precision = prior.precision();
  double weighted = prior.mean() * prior.precision();
  for (std::size_t m = 0; m < reviews.size(); ++m) {
    const auto& r = reviews[m];
    if (!(r.variance > 0.0) || !std::isfinite(r.variance)) {
      throw InvalidInput(fmt::format("reviews[{}].variance: must be positive", m));
    }
    if (!std::isfinite(r.score)) throw InvalidInput(fmt::format("reviews[{}].score: not finite", m));
    precision += 1.0 / r.variance;
    weighted += r.score / r.variance;
  }
  return GaussianPosterior::make(weighted / precision, 1.0 / precision);
}

double acceptance_probability(const GaussianPosterior& posterior, double tau) {
  if (std::isnan(tau)) throw InvalidInput("tau: must not be NaN");
  // 1 - Phi(z) == Phi(-z), evaluated without cancellation in the upper tail
  return normal_cdf((posterior.mean() - tau) / posterior.sd());
}

bool credible_robust(const GaussianPosterior& posterior, double tau, double alpha) {
  check_alpha(alpha);
  return std::abs(tau - posterior.mean()) >= critical_value(alpha) * posterior.sd();
}

bool solicit_worthwhile(const GaussianPosterior& posterior, double tau, double alpha,
                        double sigma_new_sq) {
  check_alpha(alpha);
  if (!(sigma_new_sq > 0.0) || !std::isfinite(sigma_new_sq)) {
    throw InvalidInput("sigma_new_sq: must be positive");
  }
  if (credible_robust(posterior, tau, alpha)) return false;
  const double next_sd = std::sqrt(1.0 / (posterior.precision() + 1.0 / sigma_new_sq));
  return std::abs(tau - posterior.mean()) >= critical_value(alpha) * next_sd;
}

}  // namespace revcal::bayes
