// Subsampling probabilities and O(1) categorical draws.
//
// The variance-minimizing probabilities are eta_i proportional to
// |log p(x_i | theta_hat)|, computed once per dataset at the MLE and reused
// across all MH iterations.  Draws go through a Walker/Vose alias table:
// O(n) build, O(1) per draw, two uniforms consumed per draw.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mlo/data.hpp"
#include "mlo/models.hpp"
#include "mlo/rng.hpp"

namespace mlo {

struct NonFiniteWeight : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every |log p(x_i|theta_hat)| is exactly zero: no usable signal, callers
// should fall back to uniform weights.
struct AllZeroScores : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class AliasTable {
 public:
  AliasTable() = default;
  // eta entries must be >= 0 and sum to ~1.
  explicit AliasTable(const std::vector<double>& eta);

  std::size_t size() const { return prob_.size(); }

  // Index i with probability eta_i.  Consumes one raw word and one uniform.
  std::size_t draw(Rng& rng) const {
    const std::size_t cell = static_cast<std::size_t>(rng.below(prob_.size()));
    return rng.uniform() < prob_[cell] ? cell : alias_[cell];
  }

  // Reconstructs the per-cell probabilities implied by the table.  Equals the
  // input eta up to floating-point construction error; used by tests.
  std::vector<double> cell_probabilities() const;

 private:
  std::vector<double> prob_;        // acceptance threshold within a cell
  std::vector<std::size_t> alias_;  // fallback index of a cell
};

struct SubsampleWeights {
  std::vector<double> eta;  // probabilities, strictly positive, sum to 1
  AliasTable table;
  bool floor_applied = false;

  std::size_t size() const { return eta.size(); }
};

using IndexSample = std::vector<std::size_t>;

// Most likely optimal weights: eta_i proportional to |log p(x_i|theta_hat)|.
// Exact-zero scores are floored at 1e-12 times the mean score so that every
// eta_i stays positive and 1/(n eta_i) stays defined; a point with a true
// zero score contributes nothing to the mean log-likelihood, so the floor
// does not bias the estimator.  Throws AllZeroScores when no score is
// positive.
SubsampleWeights mlo_weights(const Model& model, const DataMatrix& data,
                             std::span<const double> theta_hat);

// eta_i = 1/n, the baseline arm.
SubsampleWeights uniform_weights(std::size_t n);

// Weights from an explicit probability vector (normalized copy).
SubsampleWeights weights_from_eta(std::vector<double> eta);

// r i.i.d. categorical draws with replacement; reproducible given the Rng
// state.
IndexSample draw_subsample(const SubsampleWeights& weights, std::size_t r,
                           Rng& rng);

}  // namespace mlo
