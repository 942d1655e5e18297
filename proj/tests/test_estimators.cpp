#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "mlo/estimators.hpp"
#include "mlo/models.hpp"
#include "mlo/proposal.hpp"
#include "mlo/rng.hpp"
#include "mlo/weights.hpp"
#include "oracles.hpp"

using oracle::scalar_data;
using oracle::StubModel;

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;

struct Fixture {
  std::unique_ptr<mlo::Model> model;
  mlo::DataMatrix data{1};
  mlo::ParamVector theta;
  mlo::ParamVector theta_prime;
  mlo::ParamVector theta_hat;
};

// one small dataset per model for the enumeration grids
std::vector<Fixture> enumeration_fixtures() {
  std::vector<Fixture> out;
  {
    Fixture f;
    f.model = mlo::gaussian_mean_model(0.0, 3.0);
    f.data = scalar_data({0.3, -1.2, 2.1, 0.7});
    f.theta = {0.4};
    f.theta_prime = {0.9};
    f.theta_hat = f.model->mle(f.data);
    out.push_back(std::move(f));
  }
  {
    Fixture f;
    f.model = mlo::gaussian_precision_model(0.01, 0.01);
    f.data = scalar_data({0.8, -0.5, 1.6, -1.1});
    f.theta = {-0.2};
    f.theta_prime = {0.3};
    f.theta_hat = f.model->mle(f.data);
    out.push_back(std::move(f));
  }
  {
    Fixture f;
    f.model = mlo::logistic_model(1, std::sqrt(10.0), false);
    f.data = mlo::DataMatrix::from_rows(
        {{0.5, 1.0}, {-1.3, 0.0}, {2.0, 1.0}, {-0.4, 1.0}});
    f.theta = {0.6};
    f.theta_prime = {1.1};
    f.theta_hat = f.model->mle(f.data);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

TEST_CASE("subsampled_loglik: uniform weights reduce to the plain mean") {
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const auto data = scalar_data({1.0, 2.0, 3.0, 4.0});
  const auto w = mlo::uniform_weights(4);
  const mlo::IndexSample idx{0, 2, 2, 3};
  const mlo::ParamVector theta{1.5};
  double plain = 0.0;
  for (std::size_t i : idx) plain += model->log_density(data.row(i), theta);
  plain /= static_cast<double>(idx.size());
  CHECK(mlo::subsampled_loglik(*model, data, idx, w, theta) ==
        doctest::Approx(plain).epsilon(1e-14));
}

TEST_CASE("subsampled_loglik: n = 1 is exact for any r") {
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const auto data = scalar_data({0.7});
  const auto w = mlo::uniform_weights(1);
  const mlo::ParamVector theta{-0.3};
  const double full = mlo::full_loglik(*model, data, theta);
  for (std::size_t r : {1u, 2u, 5u}) {
    const mlo::IndexSample idx(r, 0);
    CHECK(mlo::subsampled_loglik(*model, data, idx, w, theta) ==
          doctest::Approx(full).epsilon(1e-15));
  }
}

TEST_CASE("enumeration: subsample estimator is exactly unbiased (n<=4, r<=3)") {
  for (const auto& f : enumeration_fixtures()) {
    const auto weights = mlo::mlo_weights(*f.model, f.data, f.theta_hat);
    const double full = mlo::full_loglik(*f.model, f.data, f.theta);
    const std::size_t n = f.data.size();
    for (std::size_t r = 1; r <= 3; ++r) {
      double expectation = 0.0;
      oracle::for_each_tuple(n, r, weights.eta,
                             [&](const mlo::IndexSample& idx, double prob) {
                               expectation += prob * mlo::subsampled_loglik(
                                                         *f.model, f.data, idx,
                                                         weights, f.theta);
                             });
      CHECK(std::fabs(expectation - full) < 1e-12);
    }
  }
}

TEST_CASE("enumeration: analytic variance matches (n<=4, r<=3)") {
  for (const auto& f : enumeration_fixtures()) {
    const auto weights = mlo::mlo_weights(*f.model, f.data, f.theta_hat);
    const double var1 = mlo::estimator_variance(*f.model, f.data, weights, f.theta);
    const std::size_t n = f.data.size();
    for (std::size_t r = 1; r <= 3; ++r) {
      double m1 = 0.0, m2 = 0.0;
      oracle::for_each_tuple(n, r, weights.eta,
                             [&](const mlo::IndexSample& idx, double prob) {
                               const double v = mlo::subsampled_loglik(
                                   *f.model, f.data, idx, weights, f.theta);
                               m1 += prob * v;
                               m2 += prob * v * v;
                             });
      const double enumerated = m2 - m1 * m1;
      CHECK(std::fabs(enumerated - var1 / static_cast<double>(r)) < 1e-12);
    }
  }
}

TEST_CASE("lambda_full: identity, antisymmetry, hand value") {
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const auto data = scalar_data({1.0, 2.0, 3.0});
  const mlo::ParamVector a{2.0}, b{2.5};
  CHECK(mlo::lambda_full(*model, data, a, a) == 0.0);
  CHECK(mlo::lambda_full(*model, data, a, b) ==
        doctest::Approx(-mlo::lambda_full(*model, data, b, a)).epsilon(1e-15));
  // hand-computed: mean over {1,2,3} of [ -(x-2.5)^2/2 + (x-2)^2/2 ]
  double expected = 0.0;
  for (double x : {1.0, 2.0, 3.0})
    expected += (-(x - 2.5) * (x - 2.5) + (x - 2.0) * (x - 2.0)) / 2.0;
  expected /= 3.0;
  CHECK(mlo::lambda_full(*model, data, a, b) ==
        doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("lambda_star: exact zero at theta'=theta, unbiased by enumeration") {
  for (const auto& f : enumeration_fixtures()) {
    const auto weights = mlo::mlo_weights(*f.model, f.data, f.theta_hat);
    mlo::Rng rng(4);
    const auto idx = mlo::draw_subsample(weights, 3, rng);
    CHECK(mlo::lambda_star(*f.model, f.data, idx, weights, f.theta, f.theta) == 0.0);

    const double full = mlo::lambda_full(*f.model, f.data, f.theta, f.theta_prime);
    double expectation = 0.0;
    oracle::for_each_tuple(f.data.size(), 2, weights.eta,
                           [&](const mlo::IndexSample& t, double prob) {
                             expectation += prob * mlo::lambda_star(
                                                       *f.model, f.data, t, weights,
                                                       f.theta, f.theta_prime);
                           });
    CHECK(std::fabs(expectation - full) < 1e-12);
  }
}

TEST_CASE("lambda_star with uniform weights is a difference of plain means") {
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const auto data = scalar_data({1.0, 2.0, 3.0, 4.0, 5.0});
  const auto w = mlo::uniform_weights(5);
  const mlo::IndexSample idx{0, 0, 3, 4};
  const mlo::ParamVector a{2.2}, b{2.8};
  double pa = 0.0, pb = 0.0;
  for (std::size_t i : idx) {
    pa += model->log_density(data.row(i), a);
    pb += model->log_density(data.row(i), b);
  }
  CHECK(mlo::lambda_star(*model, data, idx, w, a, b) ==
        doctest::Approx((pb - pa) / 4.0).epsilon(1e-14));
}

TEST_CASE("psi_threshold: symmetric proposal and prior cancellations") {
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const mlo::ProposalSpec proposal(1, 1.0);
  const mlo::ParamVector a{0.7}, b{-0.7};  // symmetric prior: p(a) = p(b)
  CHECK(mlo::psi_threshold(1.0, *model, proposal, a, b, 50) ==
        doctest::Approx(0.0).epsilon(1e-15));

  // flat prior: psi = log(u)/n
  const StubModel flat(1, [](mlo::Observation, std::span<const double>) {
    return 0.0;
  });
  CHECK(mlo::psi_threshold(0.5, flat, proposal, a, b, 100) ==
        doctest::Approx(std::log(0.5) / 100.0).epsilon(1e-15));

  // q terms cancel for any symmetric proposal
  const mlo::ParamVector c{0.3};
  const double psi = mlo::psi_threshold(0.25, *model, proposal, a, c, 10);
  const double manual =
      (std::log(0.25) + model->log_prior(a) - model->log_prior(c)) / 10.0;
  CHECK(psi == doctest::Approx(manual).epsilon(1e-14));
}

TEST_CASE("psi_threshold: preconditions and PriorZero") {
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const mlo::ProposalSpec proposal(1, 1.0);
  const mlo::ParamVector a{0.0}, b{1.0};
  CHECK_THROWS_AS(mlo::psi_threshold(0.0, *model, proposal, a, b, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(mlo::psi_threshold(1.5, *model, proposal, a, b, 10),
                  std::invalid_argument);

  const StubModel bounded(
      1, [](mlo::Observation, std::span<const double>) { return 0.0; },
      [](std::span<const double> t) {
        return t[0] > 0.5 ? -std::numeric_limits<double>::infinity() : 0.0;
      });
  CHECK_THROWS_AS(mlo::psi_threshold(0.5, bounded, proposal, a, b, 10),
                  mlo::PriorZero);
}

TEST_CASE("estimator_variance: degenerate cases") {
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const auto one = scalar_data({1.7});
  const auto w1 = mlo::uniform_weights(1);
  CHECK(std::fabs(mlo::estimator_variance(*model, one, w1, mlo::ParamVector{0.4})) <
        1e-15);

  const auto same = scalar_data({1.1, 1.1, 1.1});
  const auto w3 = mlo::uniform_weights(3);
  CHECK(std::fabs(mlo::estimator_variance(*model, same, w3, mlo::ParamVector{0.0})) <
        1e-14);
}

TEST_CASE("lambda_star_variance: zero at identity, exact 1/r scaling") {
  const auto& f = enumeration_fixtures()[0];
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const auto data = scalar_data({0.3, -1.2, 2.1, 0.7});
  const auto theta_hat = model->mle(data);
  const auto w = mlo::mlo_weights(*model, data, theta_hat);
  const mlo::ParamVector a{0.4}, b{0.9};
  CHECK(mlo::lambda_star_variance(*model, data, w, a, a, 10) == 0.0);
  const double v10 = mlo::lambda_star_variance(*model, data, w, a, b, 10);
  const double v50 = mlo::lambda_star_variance(*model, data, w, a, b, 50);
  CHECK(v10 == doctest::Approx(5.0 * v50).epsilon(1e-15));
  CHECK(v10 > 0.0);
  (void)f;
}

TEST_CASE("lambda_star_variance: matches enumerated variance plus centering") {
  // paper form is the uncentered factor: exact variance + Lambda_n^2, each /r
  for (const auto& f : enumeration_fixtures()) {
    const auto weights = mlo::mlo_weights(*f.model, f.data, f.theta_hat);
    const double lam = mlo::lambda_full(*f.model, f.data, f.theta, f.theta_prime);
    for (std::size_t r : {std::size_t{1}, std::size_t{2}}) {
      double m1 = 0.0, m2 = 0.0;
      oracle::for_each_tuple(f.data.size(), r, weights.eta,
                             [&](const mlo::IndexSample& t, double prob) {
                               const double v = mlo::lambda_star(
                                   *f.model, f.data, t, weights, f.theta,
                                   f.theta_prime);
                               m1 += prob * v;
                               m2 += prob * v * v;
                             });
      const double exact_var = m2 - m1 * m1;
      const double claimed =
          mlo::lambda_star_variance(*f.model, f.data, weights, f.theta,
                                    f.theta_prime, r);
      CHECK(std::fabs(claimed - (exact_var + lam * lam / static_cast<double>(r))) <
            1e-12);
    }
  }
}

TEST_CASE("required_size_full: floor, scaling, consistency") {
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const auto data = scalar_data({0.3, -1.2, 2.1, 0.7, 1.4});
  const auto theta_hat = model->mle(data);
  const mlo::ParamVector a{0.2}, b{0.8};
  const auto rule = mlo::make_size_rule(0.05, 100000);

  CHECK(mlo::required_size_full(*model, data, a, a, theta_hat, 0.1, rule) == 1);

  const double r1 = mlo::required_size_full_real(*model, data, a, b, theta_hat,
                                                 0.01, rule);
  const double r2 = mlo::required_size_full_real(*model, data, a, b, theta_hat,
                                                 0.02, rule);
  CHECK(r1 == 4.0 * r2);  // exact: power-of-two scaling

  // consistency with lambda_star_variance: r^a = (z/c)^2 * factor
  const auto weights = mlo::mlo_weights(*model, data, theta_hat);
  const std::size_t r = 7;
  const double via_variance =
      (rule.z_crit / 0.01) * (rule.z_crit / 0.01) *
      mlo::lambda_star_variance(*model, data, weights, a, b, r) *
      static_cast<double>(r);
  CHECK(r1 == doctest::Approx(via_variance).epsilon(1e-14));
}

TEST_CASE("required_size_full: monotone in c_r and z_crit") {
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const auto data = scalar_data({0.5, -0.9, 1.8});
  const auto theta_hat = model->mle(data);
  const mlo::ParamVector a{0.1}, b{1.0};
  const auto rule = mlo::make_size_rule(0.05, 1u << 30);

  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (double c : {0.001, 0.002, 0.005, 0.02, 0.1, 1.0}) {
    const std::size_t r = mlo::required_size_full(*model, data, a, b, theta_hat,
                                                  c, rule);
    CHECK(r <= prev);
    prev = r;
  }

  double prev_real = 0.0;
  for (double delta : {0.2, 0.1, 0.05, 0.01}) {  // z_crit increases
    const auto rr = mlo::make_size_rule(delta, 1u << 30);
    const double v = mlo::required_size_full_real(*model, data, a, b, theta_hat,
                                                  0.01, rr);
    CHECK(v >= prev_real);
    prev_real = v;
  }
}

TEST_CASE("required_size_estimate: enumeration unbiasedness under MLO weights") {
  for (const auto& f : enumeration_fixtures()) {
    const auto weights = mlo::mlo_weights(*f.model, f.data, f.theta_hat);
    const auto rule = mlo::make_size_rule(0.05, 1u << 30);
    const double c = 0.05;
    const double full_real = mlo::required_size_full_real(
        *f.model, f.data, f.theta, f.theta_prime, f.theta_hat, c, rule);
    for (std::size_t r = 1; r <= 3; ++r) {
      double expectation = 0.0;
      oracle::for_each_tuple(
          f.data.size(), r, weights.eta,
          [&](const mlo::IndexSample& t, double prob) {
            expectation += prob * mlo::required_size_estimate_real(
                                      *f.model, f.data, t, weights, f.theta,
                                      f.theta_prime, c, rule);
          });
      CHECK(std::fabs(expectation - full_real) < 1e-12 * (1.0 + full_real));
    }
  }
}

TEST_CASE("required_size_estimate: trivial cases and clamping") {
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const auto data = scalar_data({0.3, -1.2, 2.1});
  const auto theta_hat = model->mle(data);
  const auto weights = mlo::mlo_weights(*model, data, theta_hat);
  const mlo::ParamVector a{0.4}, b{2.9};
  const mlo::IndexSample idx{0, 1, 2};
  const auto rule = mlo::make_size_rule(0.05, 50);

  CHECK(mlo::required_size_estimate(*model, data, idx, weights, a, a, 0.5, rule) ==
        1);
  // a tiny c_r saturates at the cap
  CHECK(mlo::required_size_estimate(*model, data, idx, weights, a, b, 1e-12,
                                    rule) == 50);
  CHECK_THROWS_AS(
      mlo::required_size_estimate(*model, data, idx, weights, a, b, 0.0, rule),
      std::invalid_argument);
}

TEST_CASE("adaptive_target_size: saturates to r_max when estimate hits psi") {
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const auto data = scalar_data({0.3, -1.2, 2.1});
  const auto weights = mlo::mlo_weights(*model, data, model->mle(data));
  const mlo::IndexSample idx{0, 1};
  const mlo::ParamVector a{0.4}, b{0.6};
  const auto rule = mlo::make_size_rule(0.05, 777);
  CHECK(mlo::adaptive_target_size(0.25, 0.25, *model, data, idx, weights, a, b,
                                  rule) == 777);
  // away from the threshold it follows the CLT estimate
  const std::size_t t =
      mlo::adaptive_target_size(0.25, 0.20, *model, data, idx, weights, a, b, rule);
  const double c = std::fabs(0.25 - 0.20) / 2.0;
  CHECK(t == mlo::required_size_estimate(*model, data, idx, weights, a, b, c, rule));
}

TEST_CASE("concentration_bound: identity, domain, hand case") {
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const auto data = scalar_data({0.4, -0.8, 1.9, 2.4});
  const mlo::ParamVector a{0.5}, b{1.2};
  CHECK(mlo::concentration_bound(*model, data, a, a, 2, 0.1) == 0.0);
  CHECK_THROWS_AS(mlo::concentration_bound(*model, data, a, b, 5, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(mlo::concentration_bound(*model, data, a, b, 2, 0.0),
                  std::invalid_argument);

  // max-scan oracle computed with explicit loops
  double big_c = 0.0;
  for (double x : {0.4, -0.8, 1.9, 2.4}) {
    const double d = std::fabs((-(x - 1.2) * (x - 1.2) + (x - 0.5) * (x - 0.5)) / 2.0);
    big_c = std::max(big_c, d);
  }
  const std::size_t r = 2;
  const double f_r = (2.0 - 1.0) / 4.0;
  const double expected = big_c * std::sqrt(2.0 * (1.0 - f_r) * std::log(2.0 / 0.1) / 2.0);
  CHECK(mlo::concentration_bound(*model, data, a, b, r, 0.1) ==
        doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("accept-test equivalence: ratio form and log form agree") {
  // alpha > u  <=>  Lambda_n > psi over random configurations
  mlo::Rng rng(606);
  const auto model = mlo::gaussian_mean_model(0.0, 3.0);
  const mlo::ProposalSpec proposal(1, 1.0);
  int accepts = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(20);
    std::vector<double> xs(n);
    for (double& x : xs) x = rng.normal() * 1.2 + 0.3;
    const auto data = scalar_data(xs);
    const mlo::ParamVector theta{rng.normal()};
    const mlo::ParamVector theta_prime{theta[0] + rng.normal()};
    const double u = rng.uniform();

    // ratio form, computed without logs wherever the scale allows
    double loglik_ratio = 0.0;
    for (double x : xs)
      loglik_ratio += (-(x - theta_prime[0]) * (x - theta_prime[0]) +
                       (x - theta[0]) * (x - theta[0])) /
                      2.0;
    const double alpha = std::exp(loglik_ratio) *
                         std::exp(model->log_prior(theta_prime)) /
                         std::exp(model->log_prior(theta));
    const bool ratio_decision = alpha > u;

    const double lam = mlo::lambda_full(*model, data, theta, theta_prime);
    const double psi = mlo::psi_threshold(u, *model, proposal, theta, theta_prime, n);
    const bool log_decision = lam > psi;
    CHECK(ratio_decision == log_decision);
    accepts += log_decision;
  }
  CHECK(accepts > 50);  // both branches exercised
  CHECK(accepts < 950);
}

TEST_CASE("merge_block_estimates") {
  CHECK(mlo::merge_block_estimates(2.0, 1, 4.0, 2) == doctest::Approx(3.0));
  CHECK_THROWS_AS(mlo::merge_block_estimates(1.0, 3, 1.0, 3), std::invalid_argument);

  // recomputation oracle on random blocks
  mlo::Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t old_size = 1 + rng.below(20);
    const std::size_t extra = 1 + rng.below(20);
    std::vector<double> terms(old_size + extra);
    for (double& t : terms) t = rng.normal() * 2.0;
    double old_sum = 0.0;
    for (std::size_t i = 0; i < old_size; ++i) old_sum += terms[i];
    const double old_mean = old_sum / static_cast<double>(old_size);
    double new_block = 0.0;
    for (std::size_t i = old_size; i < terms.size(); ++i) new_block += terms[i];
    double direct = 0.0;
    for (double t : terms) direct += t;
    direct /= static_cast<double>(terms.size());
    CHECK(mlo::merge_block_estimates(old_mean, old_size, new_block, terms.size()) ==
          doctest::Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("make_size_rule validates and computes the critical value") {
  const auto rule = mlo::make_size_rule(0.05, 10);
  CHECK(rule.z_crit == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(rule.r_max == 10);
  CHECK_THROWS_AS(mlo::make_size_rule(0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(mlo::make_size_rule(1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(mlo::make_size_rule(0.05, 0), std::invalid_argument);
}
