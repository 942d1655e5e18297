// Chain drivers: full-data Metropolis-Hastings, fixed-size subsampled MH
// (most likely optimal or uniform weights), and the adaptive-size variant.
//
// All four drivers share one accept test: draw theta' ~ q(.|theta) and
// u ~ U(0,1), then accept iff Lambda > psi(u, theta, theta'), where Lambda is
// either the full-data mean log-likelihood difference or its subsample
// estimate.  Per iteration the draw order is fixed: proposal coordinates,
// then u, then subsample indices.
//
// Reproducibility: a chain owns three independent RNG streams derived from
// its seed (proposal, accept, subsample).  The subsample stream is separate
// so that subsampled and full-data runs see identical proposal/u sequences
// from the same seed.  A ChainRun is a pure function of
// (model, data, proposal, weights, config).

#pragma once

#include <cstdint>
#include <vector>

#include "mlo/data.hpp"
#include "mlo/estimators.hpp"
#include "mlo/models.hpp"
#include "mlo/proposal.hpp"
#include "mlo/weights.hpp"

namespace mlo {

struct ChainConfig {
  std::size_t num_iters = 1000;
  // Initial state; empty means start at the MLE.
  ParamVector init_theta;
  std::uint64_t seed = 0;
  // Fixed subsample size for the subsampled drivers; initial (pilot) size for
  // the adaptive driver.
  std::size_t subsample_r = 100;
  // Adaptive driver only: coverage level and size cap.
  SizeRule size_rule = {0.05, 1.9599639845400545, 5000};
};

struct ChainRun {
  std::size_t param_dim = 0;
  Matrix draws;                              // num_iters x param_dim
  std::vector<std::uint8_t> accepted;        // 1 = proposal accepted
  std::vector<std::size_t> subsample_sizes;  // final size used per iteration

  std::size_t num_iters() const { return accepted.size(); }
};

// Full-data MH.  Records subsample_sizes[k] = n.
ChainRun standard_mh(const Model& model, const DataMatrix& data,
                     const ProposalSpec& proposal, const ChainConfig& cfg);

// Fixed-size subsampled MH with caller-supplied weights (normally MLO weights
// built once at the MLE).  One fresh index sample per iteration, reused for
// both the theta and theta' evaluations.
ChainRun mlo_subsampled_mh(const Model& model, const DataMatrix& data,
                           const ProposalSpec& proposal,
                           const SubsampleWeights& weights,
                           const ChainConfig& cfg);

// Fixed-size subsampled MH with uniform weights; the baseline arm.
ChainRun uniform_subsampled_mh(const Model& model, const DataMatrix& data,
                               const ProposalSpec& proposal,
                               const ChainConfig& cfg);

// Adaptive-size subsampled MH: pilot sample of cfg.subsample_r indices,
// c_r = |Lambda* - psi| / 2, target size from the CLT rule capped at
// cfg.size_rule.r_max (saturating to the cap when c_r = 0), augmentation
// drawn from the same weights and merged by the pooled-mean update.
ChainRun adaptive_mlo_mh(const Model& model, const DataMatrix& data,
                         const ProposalSpec& proposal,
                         const SubsampleWeights& weights,
                         const ChainConfig& cfg);

}  // namespace mlo
