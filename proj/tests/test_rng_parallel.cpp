#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <omp.h>

#include <vector>

#include "mlo/parallel.hpp"
#include "mlo/rng.hpp"
#include "mlo/stats.hpp"

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  mlo::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal() * 3.0 - 0.7;
  return v;
}

}  // namespace

TEST_CASE("block_sum matches serial reference bitwise for any thread count") {
  const int max_threads = omp_get_max_threads();
  for (std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t{2048},
                        std::size_t{2049}, std::size_t{10000}}) {
    const auto v = random_values(n, 99 + n);
    auto term = [&](std::size_t i) { return v[i]; };
    const double ref = mlo::par::block_sum_serial(n, term);
    for (int t : {1, 2, 3, 7}) {
      omp_set_num_threads(t);
      CHECK(mlo::par::block_sum(n, term) == ref);
      CHECK(mlo::par::fixed_sum(n, term) == mlo::par::fixed_sum_serial(n, term));
    }
  }
  omp_set_num_threads(max_threads);
}

TEST_CASE("block_max matches serial reference") {
  const auto v = random_values(5000, 7);
  auto term = [&](std::size_t i) { return v[i]; };
  const double ref = mlo::par::block_max_serial(5000, term);
  double direct = v[0];
  for (double x : v) direct = std::max(direct, x);
  CHECK(ref == direct);
  for (int t : {1, 3}) {
    omp_set_num_threads(t);
    CHECK(mlo::par::block_max(5000, term) == ref);
  }
  omp_set_num_threads(omp_get_max_threads());
}

TEST_CASE("fixed_sum is invariant under permutation of terms") {
  auto v = random_values(4097, 1234);
  auto term = [&](std::size_t i) { return v[i]; };
  const double before = mlo::par::fixed_sum(v.size(), term);
  // deterministic shuffle
  mlo::Rng rng(5);
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.below(i)]);
  CHECK(mlo::par::fixed_sum(v.size(), term) == before);
  // and it is accurate
  long double exact = 0.0L;
  for (double x : v) exact += static_cast<long double>(x);
  CHECK(std::fabs(static_cast<double>(exact) -
                  mlo::par::fixed_sum(v.size(), term)) < 1e-9);
}

TEST_CASE("fixed_sum falls back cleanly on non-finite terms") {
  std::vector<double> v = {1.0, -std::numeric_limits<double>::infinity(), 2.0};
  auto term = [&](std::size_t i) { return v[i]; };
  CHECK(mlo::par::fixed_sum(3, term) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("Rng uniform stays in the open unit interval and is reproducible") {
  mlo::Rng a(42), b(42);
  for (int i = 0; i < 10000; ++i) {
    const double u = a.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform());
  }
  mlo::Rng c(43);
  CHECK(c.uniform() != mlo::Rng(44).uniform());
}

TEST_CASE("Rng normal moments are sane") {
  mlo::Rng rng(7);
  const int n = 200000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    ss += z * z;
  }
  const double mean = s / n;
  const double var = ss / n - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("Rng below is within range and roughly uniform") {
  mlo::Rng rng(11);
  const std::uint64_t n = 5;
  std::vector<int> counts(n, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto k = rng.below(n);
    REQUIRE(k < n);
    ++counts[k];
  }
  const double p = 1.0 / static_cast<double>(n);
  const double se = std::sqrt(p * (1 - p) * draws);
  for (int c : counts) CHECK(std::fabs(c - draws * p) < 4.0 * se);
}

TEST_CASE("derive_seed separates streams") {
  CHECK(mlo::derive_seed(1, 2, 3) != mlo::derive_seed(1, 3, 2));
  CHECK(mlo::derive_seed(1, 2) != mlo::derive_seed(2, 2));
  CHECK(mlo::derive_seed(0, 0) != mlo::derive_seed(0, 1));
  CHECK(mlo::derive_seed(5, 7, 9) == mlo::derive_seed(5, 7, 9));
}

TEST_CASE("normal quantile and cdf agree") {
  CHECK(mlo::normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(mlo::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  for (double p : {0.001, 0.025, 0.2, 0.5, 0.8, 0.9999}) {
    CHECK(mlo::normal_cdf(mlo::normal_quantile(p)) ==
          doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(mlo::normal_quantile(0.0), std::invalid_argument);
}
