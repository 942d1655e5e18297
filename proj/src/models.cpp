#include "mlo/models.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mlo/parallel.hpp"

namespace mlo {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727417803297364056;

double gaussian_logpdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -kHalfLog2Pi - std::log(sd) - 0.5 * z * z;
}

class GaussianMeanModel final : public Model {
 public:
  GaussianMeanModel(double prior_mean, double prior_sd)
      : prior_mean_(prior_mean), prior_sd_(prior_sd) {
    if (prior_sd <= 0.0) throw std::invalid_argument("prior_sd must be > 0");
  }

  std::size_t param_dim() const override { return 1; }
  std::string name() const override { return "gaussian_mean"; }

  double log_density(Observation x, std::span<const double> theta) const override {
    const double d = x[0] - theta[0];
    return -kHalfLog2Pi - 0.5 * d * d;
  }

  double log_prior(std::span<const double> theta) const override {
    return gaussian_logpdf(theta[0], prior_mean_, prior_sd_);
  }

  ParamVector mle(const DataMatrix& data) const override {
    const std::size_t n = data.size();
    const double sum =
        par::block_sum(n, [&](std::size_t i) { return data.row(i)[0]; });
    return {sum / static_cast<double>(n)};
  }

  ParamVector loglik_grad(const DataMatrix& data,
                          std::span<const double> theta) const override {
    const std::size_t n = data.size();
    const double sum =
        par::block_sum(n, [&](std::size_t i) { return data.row(i)[0]; });
    return {sum / static_cast<double>(n) - theta[0]};
  }

 private:
  double prior_mean_;
  double prior_sd_;
};

// Chain coordinate rho = log(tau).  The prior is the Gamma(shape, rate)
// density at tau = exp(rho) plus the Jacobian term rho.
class GaussianPrecisionModel final : public Model {
 public:
  GaussianPrecisionModel(double shape, double rate) : shape_(shape), rate_(rate) {
    if (shape <= 0.0 || rate <= 0.0)
      throw std::invalid_argument("gamma hyperparameters must be > 0");
  }

  std::size_t param_dim() const override { return 1; }
  std::string name() const override { return "gaussian_precision"; }

  double log_density(Observation x, std::span<const double> theta) const override {
    const double rho = theta[0];
    return 0.5 * rho - 0.5 * std::exp(rho) * x[0] * x[0] - kHalfLog2Pi;
  }

  double log_prior(std::span<const double> theta) const override {
    const double rho = theta[0];
    return shape_ * std::log(rate_) - std::lgamma(shape_) + shape_ * rho -
           rate_ * std::exp(rho);
  }

  ParamVector mle(const DataMatrix& data) const override {
    const std::size_t n = data.size();
    const double ss = par::block_sum(n, [&](std::size_t i) {
      const double v = data.row(i)[0];
      return v * v;
    });
    if (ss <= 0.0)
      throw std::invalid_argument("precision MLE undefined: sum of squares is 0");
    return {std::log(static_cast<double>(n) / ss)};
  }

  ParamVector loglik_grad(const DataMatrix& data,
                          std::span<const double> theta) const override {
    const std::size_t n = data.size();
    const double ss = par::block_sum(n, [&](std::size_t i) {
      const double v = data.row(i)[0];
      return v * v;
    });
    return {0.5 - 0.5 * std::exp(theta[0]) * ss / static_cast<double>(n)};
  }

  double report_transform(double value, std::size_t) const override {
    return std::exp(value);
  }

 private:
  double shape_;
  double rate_;
};

class LogisticModel final : public Model {
 public:
  LogisticModel(std::size_t num_covariates, double prior_sd, bool with_intercept)
      : ncov_(num_covariates), prior_sd_(prior_sd), intercept_(with_intercept) {
    if (prior_sd <= 0.0) throw std::invalid_argument("prior_sd must be > 0");
    if (num_covariates == 0)
      throw std::invalid_argument("logistic model needs >= 1 covariate");
  }

  std::size_t param_dim() const override { return ncov_ + (intercept_ ? 1 : 0); }
  std::string name() const override { return "logistic"; }

  double linear_predictor(Observation x, std::span<const double> theta) const {
    const std::size_t off = intercept_ ? 1 : 0;
    double lin = intercept_ ? theta[0] : 0.0;
    for (std::size_t j = 0; j < ncov_; ++j) lin += x[j] * theta[j + off];
    return lin;
  }

  double log_density(Observation x, std::span<const double> theta) const override {
    const double lin = linear_predictor(x, theta);
    const double y = x[ncov_];
    return y * lin - log1p_exp(lin);
  }

  double log_prior(std::span<const double> theta) const override {
    double lp = 0.0;
    for (double t : theta) lp += gaussian_logpdf(t, 0.0, prior_sd_);
    return lp;
  }

  ParamVector loglik_grad(const DataMatrix& data,
                          std::span<const double> theta) const override {
    const std::size_t p = param_dim();
    const std::size_t n = data.size();
    ParamVector g(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const Observation x = data.row(i);
      const double lin = linear_predictor(x, theta);
      const double resid = x[ncov_] - sigmoid(lin);
      std::size_t off = 0;
      if (intercept_) g[off++] += resid;
      for (std::size_t j = 0; j < ncov_; ++j) g[off + j] += resid * x[j];
    }
    for (double& v : g) v /= static_cast<double>(n);
    return g;
  }

  // Newton-Raphson on the mean log-likelihood: start at 0, ridge 1e-8 on the
  // Hessian, stop at ||grad||_inf < 1e-8, at most 100 iterations.
  ParamVector mle(const DataMatrix& data) const override {
    const std::size_t p = param_dim();
    const std::size_t n = data.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    Eigen::VectorXd grad(static_cast<Eigen::Index>(p));
    Eigen::MatrixXd hess(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    Eigen::VectorXd xrow(static_cast<Eigen::Index>(p));

    for (int iter = 0; iter < 100; ++iter) {
      grad.setZero();
      hess.setZero();
      for (std::size_t i = 0; i < n; ++i) {
        const Observation x = data.row(i);
        std::size_t off = 0;
        if (intercept_) xrow[static_cast<Eigen::Index>(off++)] = 1.0;
        for (std::size_t j = 0; j < ncov_; ++j)
          xrow[static_cast<Eigen::Index>(off + j)] = x[j];
        const double lin = theta.dot(xrow);
        const double mu = sigmoid(lin);
        grad += (x[ncov_] - mu) * xrow;
        hess.selfadjointView<Eigen::Lower>().rankUpdate(xrow, mu * (1.0 - mu));
      }
      grad *= inv_n;
      hess *= inv_n;
      hess.triangularView<Eigen::Upper>() = hess.transpose();
      if (grad.lpNorm<Eigen::Infinity>() < 1e-8) {
        ParamVector out(p);
        for (std::size_t j = 0; j < p; ++j)
          out[j] = theta[static_cast<Eigen::Index>(j)];
        return out;
      }
      hess.diagonal().array() += 1e-8;
      theta += hess.ldlt().solve(grad);
    }
    throw MleDidNotConverge(
        "logistic MLE: Newton-Raphson did not converge in 100 iterations "
        "(separable data or bad scaling?)");
  }

 private:
  static double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
  }

  std::size_t ncov_;
  double prior_sd_;
  bool intercept_;
};

}  // namespace

std::unique_ptr<Model> gaussian_mean_model(double prior_mean, double prior_sd) {
  return std::make_unique<GaussianMeanModel>(prior_mean, prior_sd);
}

std::unique_ptr<Model> gaussian_precision_model(double gamma_shape, double gamma_rate) {
  return std::make_unique<GaussianPrecisionModel>(gamma_shape, gamma_rate);
}

std::unique_ptr<Model> logistic_model(std::size_t num_covariates, double prior_sd,
                                      bool with_intercept) {
  return std::make_unique<LogisticModel>(num_covariates, prior_sd, with_intercept);
}

double full_loglik(const Model& model, const DataMatrix& data,
                   std::span<const double> theta) {
  const std::size_t n = data.size();
  return par::fixed_sum(n, [&](std::size_t i) {
           return model.log_density(data.row(i), theta);
         }) /
         static_cast<double>(n);
}

double full_loglik_serial(const Model& model, const DataMatrix& data,
                          std::span<const double> theta) {
  const std::size_t n = data.size();
  return par::fixed_sum_serial(n, [&](std::size_t i) {
           return model.log_density(data.row(i), theta);
         }) /
         static_cast<double>(n);
}

}  // namespace mlo
