// Chain post-processing: burn-in/thinning, posterior summaries with
// highest-posterior-density intervals, replication-level bias/SD/MSE, and a
// small effective-sample-size estimate for the stationarity smoke checks.

#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "mlo/data.hpp"
#include "mlo/models.hpp"
#include "mlo/samplers.hpp"

namespace mlo {

struct EmptyChain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PosteriorSummary {
  ParamVector mean;
  ParamVector sd;
  ParamVector hpd_lo;
  ParamVector hpd_hi;
  double alpha = 0.05;
};

struct ReplicationReport {
  ParamVector bias;  // mean of estimates minus truth
  ParamVector sd;    // sample SD of estimates (1/(B-1) normalization)
  ParamVector mse;   // (1/B) sum of squared errors against truth
  std::size_t B = 0;
};

// Keeps draws at 1-based iterations burn+thin, burn+2*thin, ...
// burn=0, thin=1 is the identity.  Throws EmptyChain if nothing remains.
Matrix burn_thin(const ChainRun& run, std::size_t burn, std::size_t thin);

// Column means/SDs and per-coordinate HPD intervals at level 1-alpha.
// HPD: among all contiguous windows of ceil((1-alpha)*m) sorted samples, the
// shortest; ties break to the leftmost window.
PosteriorSummary posterior_summary(const Matrix& samples, double alpha);

// HPD interval of one coordinate (sorts a copy of the samples).
std::pair<double, double> hpd_interval(std::vector<double> samples, double alpha);

// Empirical bias, SD, and MSE of B repeated estimates against the truth.
ReplicationReport replication_metrics(const Matrix& estimates,
                                      std::span<const double> truth);

// Effective sample size via autocovariance pairing (Geyer's initial monotone
// positive sequence).  Clamped to [1, m].
double effective_sample_size(std::span<const double> series);

// Applies the model's report transform (for example exp for the precision
// model) element-wise to a draws matrix.
Matrix transform_draws(const Model& model, const Matrix& draws);

}  // namespace mlo
