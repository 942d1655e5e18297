#include "mlo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mlo {

Matrix burn_thin(const ChainRun& run, std::size_t burn, std::size_t thin) {
  const std::size_t n = run.num_iters();
  if (burn >= n) throw EmptyChain("burn_thin: burn >= chain length");
  if (thin == 0) throw std::invalid_argument("burn_thin: thin must be >= 1");

  std::vector<std::size_t> keep;
  for (std::size_t it = burn + thin; it <= n; it += thin) keep.push_back(it - 1);
  if (keep.empty()) throw EmptyChain("burn_thin: nothing left after thinning");

  Matrix out(keep.size(), run.param_dim);
  for (std::size_t r = 0; r < keep.size(); ++r)
    for (std::size_t c = 0; c < run.param_dim; ++c)
      out.at(r, c) = run.draws.at(keep[r], c);
  return out;
}

std::pair<double, double> hpd_interval(std::vector<double> samples, double alpha) {
  if (samples.size() < 2)
    throw std::invalid_argument("hpd_interval: need >= 2 samples");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("hpd_interval: alpha must be in (0,1)");
  std::sort(samples.begin(), samples.end());
  const std::size_t m = samples.size();
  const std::size_t window = std::min<std::size_t>(
      m, static_cast<std::size_t>(
             std::ceil((1.0 - alpha) * static_cast<double>(m))));
  const std::size_t w = std::max<std::size_t>(window, 2);

  std::size_t best = 0;
  double best_width = samples[w - 1] - samples[0];
  for (std::size_t i = 1; i + w <= m; ++i) {
    const double width = samples[i + w - 1] - samples[i];
    if (width < best_width) {  // strict: leftmost shortest window wins
      best_width = width;
      best = i;
    }
  }
  return {samples[best], samples[best + w - 1]};
}

PosteriorSummary posterior_summary(const Matrix& samples, double alpha) {
  const std::size_t m = samples.rows;
  const std::size_t p = samples.cols;
  if (m < 2) throw std::invalid_argument("posterior_summary: need >= 2 samples");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("posterior_summary: alpha must be in (0,1)");

  PosteriorSummary s;
  s.alpha = alpha;
  s.mean.resize(p);
  s.sd.resize(p);
  s.hpd_lo.resize(p);
  s.hpd_hi.resize(p);

  std::vector<double> col(m);
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t r = 0; r < m; ++r) col[r] = samples.at(r, c);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    s.mean[c] = mean;
    s.sd[c] = std::sqrt(ss / static_cast<double>(m - 1));
    const auto [lo, hi] = hpd_interval(col, alpha);
    s.hpd_lo[c] = lo;
    s.hpd_hi[c] = hi;
  }
  return s;
}

ReplicationReport replication_metrics(const Matrix& estimates,
                                      std::span<const double> truth) {
  const std::size_t B = estimates.rows;
  const std::size_t p = estimates.cols;
  if (B < 2) throw std::invalid_argument("replication_metrics: need B >= 2");
  if (truth.size() != p)
    throw std::invalid_argument("replication_metrics: truth dimension mismatch");

  ReplicationReport rep;
  rep.B = B;
  rep.bias.resize(p);
  rep.sd.resize(p);
  rep.mse.resize(p);

  for (std::size_t c = 0; c < p; ++c) {
    double mean = 0.0;
    for (std::size_t b = 0; b < B; ++b) mean += estimates.at(b, c);
    mean /= static_cast<double>(B);
    double ss = 0.0;
    double se = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      const double v = estimates.at(b, c);
      ss += (v - mean) * (v - mean);
      se += (v - truth[c]) * (v - truth[c]);
    }
    rep.bias[c] = mean - truth[c];
    rep.sd[c] = std::sqrt(ss / static_cast<double>(B - 1));
    rep.mse[c] = se / static_cast<double>(B);
  }
  return rep;
}

double effective_sample_size(std::span<const double> series) {
  const std::size_t m = series.size();
  if (m < 4) return static_cast<double>(m);

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(m);

  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < m; ++i)
      s += (series[i] - mean) * (series[i + lag] - mean);
    return s / static_cast<double>(m);
  };

  const double c0 = autocov(0);
  if (c0 <= 0.0) return static_cast<double>(m);  // constant series

  // Sum paired autocovariances while positive and monotone nonincreasing.
  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; 2 * t + 1 < m; ++t) {
    double pair = autocov(2 * t) + autocov(2 * t + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair / c0;
  }
  tau = std::max(tau, 1.0);
  return std::clamp(static_cast<double>(m) / tau, 1.0, static_cast<double>(m));
}

Matrix transform_draws(const Model& model, const Matrix& draws) {
  Matrix out(draws.rows, draws.cols);
  for (std::size_t r = 0; r < draws.rows; ++r)
    for (std::size_t c = 0; c < draws.cols; ++c)
      out.at(r, c) = model.report_transform(draws.at(r, c), c);
  return out;
}

}  // namespace mlo
