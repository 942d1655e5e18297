// Scalar estimators and decision quantities for subsampled MH:
// the weighted subsample log-likelihood, the full and subsampled
// log-likelihood differences, the per-datum accept threshold, analytic
// variances, CLT-based required subsample sizes, and the concentration-bound
// baseline.
//
// Conventions (held everywhere): the log-likelihood is the MEAN of per-point
// log-densities, and all thresholds live on that 1/n scale.

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

#include "mlo/data.hpp"
#include "mlo/models.hpp"
#include "mlo/proposal.hpp"
#include "mlo/stats.hpp"
#include "mlo/weights.hpp"

namespace mlo {

// Log-prior is -inf at the proposed point; callers treat this as auto-reject.
struct PriorZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CLT-based subsample size rule: coverage 1 - delta, normal critical value
// z_crit = Phi^{-1}(1 - delta/2), hard cap r_max.
struct SizeRule {
  double delta = 0.05;
  double z_crit = 1.9599639845400545;
  std::size_t r_max = 1;
};

SizeRule make_size_rule(double delta, std::size_t r_max);

// Inverse-probability-weighted subsample estimate of the mean log-likelihood:
//   (1/r) sum_k log p(x*_k | theta) / (n eta*_k).
// Unbiased for full_loglik when idx is drawn according to weights.
double subsampled_loglik(const Model& model, const DataMatrix& data,
                         const IndexSample& idx, const SubsampleWeights& weights,
                         std::span<const double> theta);

// Full-data difference Lambda_n(theta, theta') = l_n(theta') - l_n(theta).
double lambda_full(const Model& model, const DataMatrix& data,
                   std::span<const double> theta,
                   std::span<const double> theta_prime);

// Subsampled difference Lambda*(theta, theta'); both evaluations use the SAME
// index sample.
double lambda_star(const Model& model, const DataMatrix& data,
                   const IndexSample& idx, const SubsampleWeights& weights,
                   std::span<const double> theta,
                   std::span<const double> theta_prime);

// Accept threshold psi(u, theta, theta') =
//   (1/n) [log u + log p(theta) + log q(theta'|theta)
//          - log p(theta') - log q(theta|theta')],
// computed entirely in log space.  Requires 0 < u <= 1.  Throws PriorZero
// when the log-prior at theta' is -inf.
double psi_threshold(double u, const Model& model, const ProposalSpec& proposal,
                     std::span<const double> theta,
                     std::span<const double> theta_prime, std::size_t n);

// Subsampling variance of the r=1 estimator of l_n(theta):
//   (1/n^2) sum_i log^2 p(x_i|theta) / eta_i  -  l_n^2(theta).
// Divide by r for the size-r estimator.
double estimator_variance(const Model& model, const DataMatrix& data,
                          const SubsampleWeights& weights,
                          std::span<const double> theta);

// (1/n^2) sum_i [log p(x_i|theta) - log p(x_i|theta')]^2 / eta_i.
// This is the uncentered variance factor shared by lambda_star_variance and
// the required-size formulas; under MLO weights it factors into the product
//   (1/n) sum_i d_i^2 / |log p(x_i|theta_hat)|  x  (1/n) sum_j |log p(x_j|theta_hat)|.
double lambda_variance_factor(const Model& model, const DataMatrix& data,
                              const SubsampleWeights& weights,
                              std::span<const double> theta,
                              std::span<const double> theta_prime);

// Variance of Lambda* under MLO weights built at theta_hat, for subsample
// size r: lambda_variance_factor / r.  (The exact variance subtracts
// Lambda_n^2 / r; this keeps the uncentered form used by the size rules.)
double lambda_star_variance(const Model& model, const DataMatrix& data,
                            const SubsampleWeights& weights_mlo,
                            std::span<const double> theta,
                            std::span<const double> theta_prime, std::size_t r);

// Full-data required subsample size (z_crit / c_r)^2 * variance factor, with
// the factor evaluated at MLO weights built at theta_hat.  The _real variant
// returns the raw value; the count variant takes ceil and clamps to
// [1, rule.r_max].
double required_size_full_real(const Model& model, const DataMatrix& data,
                               std::span<const double> theta,
                               std::span<const double> theta_prime,
                               std::span<const double> theta_hat, double c_r,
                               const SizeRule& rule);
std::size_t required_size_full(const Model& model, const DataMatrix& data,
                               std::span<const double> theta,
                               std::span<const double> theta_prime,
                               std::span<const double> theta_hat, double c_r,
                               const SizeRule& rule);

// Subsample estimate of the required size:
//   (z_crit / c_r)^2 (1/(r n^2)) sum_k d_k^2 / eta*_k^2.
// Unbiased for the full-data value (before ceil) when weights are the MLO
// weights.
double required_size_estimate_real(const Model& model, const DataMatrix& data,
                                   const IndexSample& idx,
                                   const SubsampleWeights& weights,
                                   std::span<const double> theta,
                                   std::span<const double> theta_prime,
                                   double c_r, const SizeRule& rule);
std::size_t required_size_estimate(const Model& model, const DataMatrix& data,
                                   const IndexSample& idx,
                                   const SubsampleWeights& weights,
                                   std::span<const double> theta,
                                   std::span<const double> theta_prime,
                                   double c_r, const SizeRule& rule);

// Target subsample size for one adaptive iteration: c_r = |lambda - psi| / 2,
// then the CLT estimate clamped to [1, rule.r_max].  A zero c_r (estimate
// exactly on the threshold) saturates to rule.r_max.
std::size_t adaptive_target_size(double lambda_star, double psi,
                                 const Model& model, const DataMatrix& data,
                                 const IndexSample& idx,
                                 const SubsampleWeights& weights,
                                 std::span<const double> theta,
                                 std::span<const double> theta_prime,
                                 const SizeRule& rule);

// Concentration-inequality error bound for uniform subsampling of size r
// (diagnostic baseline; full-data max scan):
//   c_r = max_i |log p(x_i|theta') - log p(x_i|theta)|
//         * sqrt(2 (1 - (r-1)/n) log(2/delta_r) / r).
// Keeps the without-replacement factor (1 - f*_r) of the cited rule verbatim.
double concentration_bound(const Model& model, const DataMatrix& data,
                           std::span<const double> theta,
                           std::span<const double> theta_prime, std::size_t r,
                           double delta_r);

// Pooled-mean merge of a weighted block estimate with an existing one:
//   new_block_sum_weighted / new_total + old_mean * old_size / new_total.
// Algebraically equal to recomputing the estimate over the union of blocks.
double merge_block_estimates(double old_mean, std::size_t old_size,
                             double new_block_sum_weighted,
                             std::size_t new_total);

}  // namespace mlo
