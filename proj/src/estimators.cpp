#include "mlo/estimators.hpp"

#include <cmath>
#include <limits>

#include "mlo/parallel.hpp"

namespace mlo {

SizeRule make_size_rule(double delta, std::size_t r_max) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("SizeRule: delta must be in (0,1)");
  if (r_max == 0) throw std::invalid_argument("SizeRule: r_max must be >= 1");
  SizeRule rule;
  rule.delta = delta;
  rule.z_crit = normal_quantile(1.0 - delta / 2.0);
  rule.r_max = r_max;
  return rule;
}

double subsampled_loglik(const Model& model, const DataMatrix& data,
                         const IndexSample& idx, const SubsampleWeights& weights,
                         std::span<const double> theta) {
  const double n = static_cast<double>(data.size());
  double sum = 0.0;
  for (std::size_t i : idx)
    sum += model.log_density(data.row(i), theta) / (n * weights.eta[i]);
  return sum / static_cast<double>(idx.size());
}

double lambda_full(const Model& model, const DataMatrix& data,
                   std::span<const double> theta,
                   std::span<const double> theta_prime) {
  return full_loglik(model, data, theta_prime) - full_loglik(model, data, theta);
}

double lambda_star(const Model& model, const DataMatrix& data,
                   const IndexSample& idx, const SubsampleWeights& weights,
                   std::span<const double> theta,
                   std::span<const double> theta_prime) {
  return subsampled_loglik(model, data, idx, weights, theta_prime) -
         subsampled_loglik(model, data, idx, weights, theta);
}

double psi_threshold(double u, const Model& model, const ProposalSpec& proposal,
                     std::span<const double> theta,
                     std::span<const double> theta_prime, std::size_t n) {
  if (!(u > 0.0 && u <= 1.0))
    throw std::invalid_argument("psi_threshold: u must be in (0,1]");
  const double lp_prime = model.log_prior(theta_prime);
  if (lp_prime == -std::numeric_limits<double>::infinity())
    throw PriorZero("psi_threshold: log-prior is -inf at theta'");
  const double lp = model.log_prior(theta);
  const double lq_fwd = proposal.log_q(theta_prime, theta);
  const double lq_bwd = proposal.log_q(theta, theta_prime);
  return (std::log(u) + lp + lq_fwd - lp_prime - lq_bwd) /
         static_cast<double>(n);
}

double estimator_variance(const Model& model, const DataMatrix& data,
                          const SubsampleWeights& weights,
                          std::span<const double> theta) {
  const std::size_t n = data.size();
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  const double second_moment = par::block_sum(n, [&](std::size_t i) {
    const double ld = model.log_density(data.row(i), theta);
    return ld * ld / weights.eta[i];
  });
  const double mean = full_loglik(model, data, theta);
  return second_moment / nn - mean * mean;
}

double lambda_variance_factor(const Model& model, const DataMatrix& data,
                              const SubsampleWeights& weights,
                              std::span<const double> theta,
                              std::span<const double> theta_prime) {
  const std::size_t n = data.size();
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  const double sum = par::block_sum(n, [&](std::size_t i) {
    const Observation x = data.row(i);
    const double d = model.log_density(x, theta) - model.log_density(x, theta_prime);
    return d * d / weights.eta[i];
  });
  return sum / nn;
}

double lambda_star_variance(const Model& model, const DataMatrix& data,
                            const SubsampleWeights& weights_mlo,
                            std::span<const double> theta,
                            std::span<const double> theta_prime, std::size_t r) {
  if (r == 0) throw std::invalid_argument("lambda_star_variance: r must be >= 1");
  return lambda_variance_factor(model, data, weights_mlo, theta, theta_prime) /
         static_cast<double>(r);
}

namespace {

std::size_t clamp_size(double real, const SizeRule& rule) {
  // NaN (0/0) and inf both saturate at the cap.
  if (!(real < static_cast<double>(rule.r_max)))
    return rule.r_max;
  if (real <= 1.0) return 1;
  return static_cast<std::size_t>(std::ceil(real));
}

}  // namespace

double required_size_full_real(const Model& model, const DataMatrix& data,
                               std::span<const double> theta,
                               std::span<const double> theta_prime,
                               std::span<const double> theta_hat, double c_r,
                               const SizeRule& rule) {
  if (!(c_r > 0.0))
    throw std::invalid_argument("required_size_full: c_r must be > 0");
  const SubsampleWeights weights = mlo_weights(model, data, theta_hat);
  const double z_over_c = rule.z_crit / c_r;
  return z_over_c * z_over_c *
         lambda_variance_factor(model, data, weights, theta, theta_prime);
}

std::size_t required_size_full(const Model& model, const DataMatrix& data,
                               std::span<const double> theta,
                               std::span<const double> theta_prime,
                               std::span<const double> theta_hat, double c_r,
                               const SizeRule& rule) {
  return clamp_size(
      required_size_full_real(model, data, theta, theta_prime, theta_hat, c_r, rule),
      rule);
}

double required_size_estimate_real(const Model& model, const DataMatrix& data,
                                   const IndexSample& idx,
                                   const SubsampleWeights& weights,
                                   std::span<const double> theta,
                                   std::span<const double> theta_prime,
                                   double c_r, const SizeRule& rule) {
  if (!(c_r > 0.0))
    throw std::invalid_argument("required_size_estimate: c_r must be > 0");
  const double n = static_cast<double>(data.size());
  double sum = 0.0;
  for (std::size_t i : idx) {
    const Observation x = data.row(i);
    const double d = model.log_density(x, theta) - model.log_density(x, theta_prime);
    sum += d * d / (weights.eta[i] * weights.eta[i]);
  }
  const double z_over_c = rule.z_crit / c_r;
  return z_over_c * z_over_c * sum /
         (static_cast<double>(idx.size()) * n * n);
}

std::size_t required_size_estimate(const Model& model, const DataMatrix& data,
                                   const IndexSample& idx,
                                   const SubsampleWeights& weights,
                                   std::span<const double> theta,
                                   std::span<const double> theta_prime,
                                   double c_r, const SizeRule& rule) {
  return clamp_size(required_size_estimate_real(model, data, idx, weights, theta,
                                                theta_prime, c_r, rule),
                    rule);
}

std::size_t adaptive_target_size(double lambda_star, double psi,
                                 const Model& model, const DataMatrix& data,
                                 const IndexSample& idx,
                                 const SubsampleWeights& weights,
                                 std::span<const double> theta,
                                 std::span<const double> theta_prime,
                                 const SizeRule& rule) {
  const double c_r = std::fabs(lambda_star - psi) / 2.0;
  if (c_r == 0.0) return rule.r_max;
  return required_size_estimate(model, data, idx, weights, theta, theta_prime,
                                c_r, rule);
}

double concentration_bound(const Model& model, const DataMatrix& data,
                           std::span<const double> theta,
                           std::span<const double> theta_prime, std::size_t r,
                           double delta_r) {
  const std::size_t n = data.size();
  if (r < 1 || r > n)
    throw std::invalid_argument("concentration_bound: need 1 <= r <= n");
  if (!(delta_r > 0.0 && delta_r < 1.0))
    throw std::invalid_argument("concentration_bound: delta_r must be in (0,1)");
  const double big_c = par::block_max(n, [&](std::size_t i) {
    const Observation x = data.row(i);
    return std::fabs(model.log_density(x, theta_prime) -
                     model.log_density(x, theta));
  });
  const double f_r = (static_cast<double>(r) - 1.0) / static_cast<double>(n);
  return big_c * std::sqrt(2.0 * (1.0 - f_r) * std::log(2.0 / delta_r) /
                           static_cast<double>(r));
}

double merge_block_estimates(double old_mean, std::size_t old_size,
                             double new_block_sum_weighted,
                             std::size_t new_total) {
  if (new_total <= old_size)
    throw std::invalid_argument("merge_block_estimates: new_total must exceed old_size");
  const double total = static_cast<double>(new_total);
  return new_block_sum_weighted / total +
         old_mean * (static_cast<double>(old_size) / total);
}

}  // namespace mlo
