#include "mlo/weights.hpp"

#include <cmath>

#include "mlo/parallel.hpp"

namespace mlo {

AliasTable::AliasTable(const std::vector<double>& eta) {
  const std::size_t n = eta.size();
  if (n == 0) throw std::invalid_argument("AliasTable: empty eta");
  for (double v : eta)
    if (!std::isfinite(v) || v < 0.0)
      throw NonFiniteWeight("AliasTable: weights must be finite and >= 0");

  prob_.assign(n, 0.0);
  alias_.assign(n, 0);

  // Vose's method on probabilities scaled by n.
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) scaled[i] = eta[i] * static_cast<double>(n);

  std::vector<std::size_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    (scaled[i] < 1.0 ? small : large).push_back(i);

  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    large.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::size_t i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (std::size_t i : small) {  // leftovers from rounding; probability ~1
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

std::vector<double> AliasTable::cell_probabilities() const {
  const std::size_t n = prob_.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> p(n, 0.0);
  for (std::size_t cell = 0; cell < n; ++cell) {
    p[cell] += inv_n * prob_[cell];
    p[alias_[cell]] += inv_n * (1.0 - prob_[cell]);
  }
  return p;
}

SubsampleWeights weights_from_eta(std::vector<double> eta) {
  double total = 0.0;
  for (double v : eta) {
    if (!std::isfinite(v) || v < 0.0)
      throw NonFiniteWeight("weights_from_eta: entries must be finite and >= 0");
    total += v;
  }
  if (total <= 0.0) throw NonFiniteWeight("weights_from_eta: all-zero vector");
  for (double& v : eta) v /= total;
  SubsampleWeights w;
  w.table = AliasTable(eta);
  w.eta = std::move(eta);
  return w;
}

SubsampleWeights mlo_weights(const Model& model, const DataMatrix& data,
                             std::span<const double> theta_hat) {
  const std::size_t n = data.size();
  std::vector<double> score(n);
  bool all_finite = true;
#pragma omp parallel for schedule(static) reduction(&& : all_finite)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const double ld =
        model.log_density(data.row(static_cast<std::size_t>(i)), theta_hat);
    all_finite = all_finite && std::isfinite(ld);
    score[static_cast<std::size_t>(i)] = std::fabs(ld);
  }
  if (!all_finite)
    throw NonFiniteWeight("mlo_weights: non-finite log-density at theta_hat");

  const double total = par::block_sum(n, [&](std::size_t i) { return score[i]; });
  if (total == 0.0)
    throw AllZeroScores("mlo_weights: every |log p(x_i|theta_hat)| is zero");

  const double floor = 1e-12 * (total / static_cast<double>(n));
  bool floored = false;
  double floored_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (score[i] < floor) {
      score[i] = floor;
      floored = true;
    }
    floored_total += score[i];
  }
  for (double& v : score) v /= floored_total;

  SubsampleWeights w;
  w.table = AliasTable(score);
  w.eta = std::move(score);
  w.floor_applied = floored;
  return w;
}

SubsampleWeights uniform_weights(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_weights: n must be >= 1");
  std::vector<double> eta(n, 1.0 / static_cast<double>(n));
  SubsampleWeights w;
  w.table = AliasTable(eta);
  w.eta = std::move(eta);
  return w;
}

IndexSample draw_subsample(const SubsampleWeights& weights, std::size_t r,
                           Rng& rng) {
  if (r == 0) throw std::invalid_argument("draw_subsample: r must be >= 1");
  IndexSample idx(r);
  for (std::size_t k = 0; k < r; ++k) idx[k] = weights.table.draw(rng);
  return idx;
}

}  // namespace mlo
