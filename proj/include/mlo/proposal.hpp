// Random-walk Gaussian proposal with an evaluable, symmetric log-density.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "mlo/data.hpp"
#include "mlo/rng.hpp"

namespace mlo {

struct ProposalSpec {
  // Per-coordinate step standard deviation.  A zero entry degenerates that
  // coordinate to a point mass (useful as the scale->0 limit in tests); its
  // log-q contribution is skipped, which is exact for symmetric uses since
  // the forward and backward terms cancel.
  std::vector<double> scale;

  ProposalSpec(std::size_t dim, double step = 1.0)
      : scale(dim, step) {
    validate();
  }
  explicit ProposalSpec(std::vector<double> per_coord_scale)
      : scale(std::move(per_coord_scale)) {
    validate();
  }

  // theta' = theta + scale .* z, z iid standard normal.  Consumes dim normal
  // draws in coordinate order.
  ParamVector sample(std::span<const double> theta, Rng& rng) const {
    ParamVector out(theta.begin(), theta.end());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += scale[j] * rng.normal();
    return out;
  }

  // log q(to | from); symmetric in its arguments.
  double log_q(std::span<const double> to, std::span<const double> from) const {
    constexpr double kHalfLog2Pi = 0.9189385332046727417803297364056;
    double lq = 0.0;
    for (std::size_t j = 0; j < scale.size(); ++j) {
      if (scale[j] == 0.0) continue;
      const double z = (to[j] - from[j]) / scale[j];
      lq += -kHalfLog2Pi - std::log(scale[j]) - 0.5 * z * z;
    }
    return lq;
  }

 private:
  void validate() const {
    if (scale.empty()) throw std::invalid_argument("ProposalSpec: empty scale");
    for (double s : scale)
      if (!(s >= 0.0) || !std::isfinite(s))
        throw std::invalid_argument("ProposalSpec: scale must be finite and >= 0");
  }
};

}  // namespace mlo
