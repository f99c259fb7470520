#pragma once

#include <Eigen/Dense>

#include "bvarml/rng.hpp"

namespace bvarml {

// Seven-component Gaussian mixture approximation of the log chi-squared(1)
// distribution used by the auxiliary mixture sampler (component means carry
// a -1.2704 offset).
struct KscMixture {
  static constexpr int kComponents = 7;
  static const double weight[kComponents];
  static const double mean[kComponents];  // before the -1.2704 offset
  static const double var[kComponents];
  static constexpr double kOffset = -1.2704;
};

// One auxiliary-mixture update of a log-volatility path given the residual
// series eps (h enters the model as Var(eps_t) = exp(h_t)). Linearizes
// log(eps^2 + c), samples mixture indicators, then draws h jointly from the
// tridiagonal-precision Gaussian conditional.
Eigen::VectorXd ksc_sample_logvol(RngStream& rng, const Eigen::VectorXd& eps, const Eigen::VectorXd& h_current,
                                  double mu, double phi, double sigma2, double offset_c = 1e-4);

}  // namespace bvarml
