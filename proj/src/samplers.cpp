#include "mlo/samplers.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace mlo {

namespace {

struct ChainStreams {
  Rng proposal;
  Rng accept;
  Rng subsample;

  explicit ChainStreams(std::uint64_t seed)
      : proposal(derive_seed(seed, 1)),
        accept(derive_seed(seed, 2)),
        subsample(derive_seed(seed, 3)) {}
};

ParamVector initial_state(const Model& model, const DataMatrix& data,
                          const ChainConfig& cfg) {
  if (cfg.init_theta.empty()) return model.mle(data);
  if (cfg.init_theta.size() != model.param_dim())
    throw std::invalid_argument("ChainConfig: init_theta dimension mismatch");
  return cfg.init_theta;
}

// Shared driver.  The policy computes Lambda (full or subsampled) for one
// iteration and reports the subsample size it used; notify_accept lets the
// full-data policy keep its cached log-likelihood in sync.
template <class Policy>
ChainRun run_chain(const Model& model, const DataMatrix& data,
                   const ProposalSpec& proposal, const ChainConfig& cfg,
                   Policy policy) {
  if (cfg.num_iters == 0)
    throw std::invalid_argument("ChainConfig: num_iters must be >= 1");
  if (proposal.scale.size() != model.param_dim())
    throw std::invalid_argument("ProposalSpec: dimension mismatch");
  const std::size_t n = data.size();
  const std::size_t p = model.param_dim();

  ChainStreams streams(cfg.seed);
  ParamVector theta = initial_state(model, data, cfg);
  policy.reset(theta);

  ChainRun run;
  run.param_dim = p;
  run.draws = Matrix(cfg.num_iters, p);
  run.accepted.assign(cfg.num_iters, 0);
  run.subsample_sizes.assign(cfg.num_iters, 0);

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < cfg.num_iters; ++k) {
    ParamVector theta_prime = proposal.sample(theta, streams.proposal);
    const double u = streams.accept.uniform();

    bool accept = false;
    std::size_t size_used = 0;
    if (model.log_prior(theta_prime) > kNegInf) {
      const double psi = psi_threshold(u, model, proposal, theta, theta_prime, n);
      const auto [lambda, size] = policy(theta, theta_prime, psi, streams.subsample);
      size_used = size;
      accept = lambda > psi;
    }
    // else: zero prior mass at theta', auto-reject without subsampling.

    if (accept) {
      theta = std::move(theta_prime);
      policy.notify_accept();
    }
    for (std::size_t j = 0; j < p; ++j) run.draws.at(k, j) = theta[j];
    run.accepted[k] = accept ? 1 : 0;
    run.subsample_sizes[k] = size_used;
  }
  return run;
}

class FullDataPolicy {
 public:
  FullDataPolicy(const Model& model, const DataMatrix& data)
      : model_(model), data_(data) {}

  void reset(const ParamVector& theta) {
    current_loglik_ = full_loglik(model_, data_, theta);
  }

  std::pair<double, std::size_t> operator()(const ParamVector& /*theta*/,
                                            const ParamVector& theta_prime,
                                            double /*psi*/, Rng& /*sub_rng*/) {
    candidate_loglik_ = full_loglik(model_, data_, theta_prime);
    return {candidate_loglik_ - current_loglik_, data_.size()};
  }

  void notify_accept() { current_loglik_ = candidate_loglik_; }

 private:
  const Model& model_;
  const DataMatrix& data_;
  double current_loglik_ = 0.0;
  double candidate_loglik_ = 0.0;
};

class FixedSubsamplePolicy {
 public:
  FixedSubsamplePolicy(const Model& model, const DataMatrix& data,
                       const SubsampleWeights& weights, std::size_t r)
      : model_(model), data_(data), weights_(weights), r_(r) {
    if (r == 0) throw std::invalid_argument("subsample_r must be >= 1");
  }

  void reset(const ParamVector&) {}

  std::pair<double, std::size_t> operator()(const ParamVector& theta,
                                            const ParamVector& theta_prime,
                                            double /*psi*/, Rng& sub_rng) {
    const IndexSample idx = draw_subsample(weights_, r_, sub_rng);
    return {lambda_star(model_, data_, idx, weights_, theta, theta_prime), r_};
  }

  void notify_accept() {}

 private:
  const Model& model_;
  const DataMatrix& data_;
  const SubsampleWeights& weights_;
  std::size_t r_;
};

class AdaptiveSubsamplePolicy {
 public:
  AdaptiveSubsamplePolicy(const Model& model, const DataMatrix& data,
                          const SubsampleWeights& weights, std::size_t r_init,
                          const SizeRule& rule)
      : model_(model), data_(data), weights_(weights), r_init_(r_init), rule_(rule) {
    if (r_init == 0) throw std::invalid_argument("subsample_r must be >= 1");
    if (r_init > rule.r_max)
      throw std::invalid_argument("initial subsample size exceeds r_max");
  }

  void reset(const ParamVector&) {}

  std::pair<double, std::size_t> operator()(const ParamVector& theta,
                                            const ParamVector& theta_prime,
                                            double psi, Rng& sub_rng) {
    const double n = static_cast<double>(data_.size());
    const IndexSample pilot = draw_subsample(weights_, r_init_, sub_rng);

    double l_theta = subsampled_loglik(model_, data_, pilot, weights_, theta);
    double l_prime = subsampled_loglik(model_, data_, pilot, weights_, theta_prime);
    double lambda = l_prime - l_theta;

    const std::size_t target = adaptive_target_size(
        lambda, psi, model_, data_, pilot, weights_, theta, theta_prime, rule_);
    if (target <= r_init_) return {lambda, r_init_};

    const IndexSample extra = draw_subsample(weights_, target - r_init_, sub_rng);
    double new_sum_theta = 0.0;
    double new_sum_prime = 0.0;
    for (std::size_t i : extra) {
      const Observation x = data_.row(i);
      const double inv_w = 1.0 / (n * weights_.eta[i]);
      new_sum_theta += model_.log_density(x, theta) * inv_w;
      new_sum_prime += model_.log_density(x, theta_prime) * inv_w;
    }
    l_theta = merge_block_estimates(l_theta, r_init_, new_sum_theta, target);
    l_prime = merge_block_estimates(l_prime, r_init_, new_sum_prime, target);
    lambda = l_prime - l_theta;
    return {lambda, target};
  }

  void notify_accept() {}

 private:
  const Model& model_;
  const DataMatrix& data_;
  const SubsampleWeights& weights_;
  std::size_t r_init_;
  SizeRule rule_;
};

}  // namespace

ChainRun standard_mh(const Model& model, const DataMatrix& data,
                     const ProposalSpec& proposal, const ChainConfig& cfg) {
  return run_chain(model, data, proposal, cfg, FullDataPolicy(model, data));
}

ChainRun mlo_subsampled_mh(const Model& model, const DataMatrix& data,
                           const ProposalSpec& proposal,
                           const SubsampleWeights& weights,
                           const ChainConfig& cfg) {
  if (weights.size() != data.size())
    throw std::invalid_argument("SubsampleWeights: size mismatch with data");
  return run_chain(model, data, proposal, cfg,
                   FixedSubsamplePolicy(model, data, weights, cfg.subsample_r));
}

ChainRun uniform_subsampled_mh(const Model& model, const DataMatrix& data,
                               const ProposalSpec& proposal,
                               const ChainConfig& cfg) {
  const SubsampleWeights weights = uniform_weights(data.size());
  return run_chain(model, data, proposal, cfg,
                   FixedSubsamplePolicy(model, data, weights, cfg.subsample_r));
}

ChainRun adaptive_mlo_mh(const Model& model, const DataMatrix& data,
                         const ProposalSpec& proposal,
                         const SubsampleWeights& weights,
                         const ChainConfig& cfg) {
  if (weights.size() != data.size())
    throw std::invalid_argument("SubsampleWeights: size mismatch with data");
  return run_chain(model, data, proposal, cfg,
                   AdaptiveSubsamplePolicy(model, data, weights, cfg.subsample_r,
                                           cfg.size_rule));
}

}  // namespace mlo
