// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef REVCAL_CORE_BAYES_HPP
#define REVCAL_CORE_BAYES_HPP

#include <span>

#include "core/types.hpp"

namespace revcal::bayes {

struct ScoredReview {
  double score;
  double variance;  // sigma_m^2 > 0
};

/// Standard normal CDF.
double normal_cdf(double x);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

/// Conjugate update of a Gaussian belief about latent quality with
/// independent Gaussian reviews. Precisions add; the mean is the
/// precision-weighted average of the prior mean and the scores.
GaussianPosterior posterior_update(const GaussianPosterior& prior,
                                   std::span<const ScoredReview> reviews);

/// P(mu >= tau | reviews) = 1 - Phi((tau - mu_n) / tau_n).
double acceptance_probability(const GaussianPosterior& posterior, double tau);

/// True when the 1 - alpha credible interval lies entirely on one side of
/// tau: |tau - mu_n| >= z_{1 - alpha/2} tau_n.
bool credible_robust(const GaussianPosterior& posterior, double tau, double alpha);

/// True when the decision is currently ambiguous but one more review with
/// variance sigma_new_sq would shrink the interval enough to clear tau.
bool solicit_worthwhile(const GaussianPosterior& posterior, double tau, double alpha,
                        double sigma_new_sq);

}  // namespace revcal::bayes

#endif  // REVCAL_CORE_BAYES_HPP
