// Model zoo: the pluggable target interface and the three concrete targets
// (Gaussian mean, Gaussian precision, logistic regression).
//
// A Model bundles the per-point log-density, the log-prior, the MLE procedure
// and the parameter dimension.  Instances are immutable after construction
// and safe to share across threads; every member is a pure function of its
// arguments.

#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>

#include "mlo/data.hpp"

namespace mlo {

struct MleDidNotConverge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t param_dim() const = 0;
  virtual std::string name() const = 0;

  // log p(x | theta) for one observation.
  virtual double log_density(Observation x, std::span<const double> theta) const = 0;

  // log p(theta), including any reparameterization Jacobian.
  virtual double log_prior(std::span<const double> theta) const = 0;

  // Maximum likelihood estimate; satisfies ||grad of mean log-lik||_inf ~ 0.
  virtual ParamVector mle(const DataMatrix& data) const = 0;

  // Analytic gradient of the mean log-likelihood (1/n) sum_i log p(x_i|theta).
  // Drives the MLE solvers and the finite-difference checks in the tests.
  virtual ParamVector loglik_grad(const DataMatrix& data,
                                  std::span<const double> theta) const = 0;

  // Maps an internal chain coordinate to the reporting scale.  Identity for
  // all models except the precision model, which samples rho = log(tau) and
  // reports tau.
  virtual double report_transform(double value, std::size_t dim) const {
    (void)dim;
    return value;
  }
};

// N(mu, 1) likelihood with a N(prior_mean, prior_sd^2) prior on mu.
// The unit observation variance is fixed.
std::unique_ptr<Model> gaussian_mean_model(double prior_mean, double prior_sd);

// N(0, tau) likelihood where tau is the precision, with a
// Gamma(shape, rate) prior on tau.  The chain coordinate is rho = log(tau);
// the prior carries the Jacobian term, so a symmetric random walk in rho is
// valid.  Reporting transforms back to the tau scale.
std::unique_ptr<Model> gaussian_precision_model(double gamma_shape, double gamma_rate);

// Logistic regression with independent N(0, prior_sd^2) priors on all
// coefficients, intercept included.  An observation row holds num_covariates
// covariate values followed by the 0/1 label.  With with_intercept the
// intercept coefficient comes first in theta and multiplies an implicit 1.
std::unique_ptr<Model> logistic_model(std::size_t num_covariates, double prior_sd,
                                      bool with_intercept);

// Mean (not sum) of per-point log-densities: (1/n) sum_i log p(x_i|theta).
// OpenMP reduction through an order-independent accumulator, so the value is
// bit-identical under row permutation and for any thread count.
double full_loglik(const Model& model, const DataMatrix& data,
                   std::span<const double> theta);

// Serial reference for the same quantity; bit-identical to full_loglik.
double full_loglik_serial(const Model& model, const DataMatrix& data,
                          std::span<const double> theta);

// log(1 + exp(t)) without overflow for any finite t.
inline double log1p_exp(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

}  // namespace mlo
