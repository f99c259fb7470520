#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "bvarml/ce_fit.hpp"
#include "bvarml/chain.hpp"
#include "bvarml/ml.hpp"

namespace bvarml {

// Gaussian tuning density truncated to the (1-alpha) Mahalanobis ellipsoid,
// used by the modified-harmonic-mean estimator.
struct TruncatedGaussianTuning {
  Eigen::VectorXd mean;
  Eigen::MatrixXd Q;           // covariance of the posterior draws
  double chi2_cut = 0.0;       // (1-alpha) quantile of chi2_m
  double log_trunc_mass = 0.0; // log(1 - alpha)

  int dim() const { return static_cast<int>(mean.size()); }
  bool contains(const Eigen::VectorXd& x) const;
  double log_pdf(const Eigen::VectorXd& x) const;  // -inf outside the region
};

TruncatedGaussianTuning build_truncated_gaussian(const Eigen::MatrixXd& draws, double alpha = 0.05);

// Modified harmonic mean over posterior draws of psi, with the conditional
// Monte Carlo integrand g(y|psi) supplied by the caller:
//   estimate = -log( (1/R) sum f(psi_r) / (p(psi_r) g(y|psi_r)) ).
// Draws with f = 0 (outside the tuning support) contribute zero terms.
MLEstimate gd_log_ml(const std::vector<Eigen::VectorXd>& psi_draws,
                     const std::function<double(const Eigen::VectorXd&)>& log_f,
                     const std::function<double(const Eigen::VectorXd&)>& log_g,
                     const std::function<double(const Eigen::VectorXd&)>& log_prior, int threads = 1);

// GD estimator for the CSV model with the coefficient block integrated out
// analytically: psi = (h, phi) plus kappa when it is estimated. The gd1
// variant uses a single truncated Gaussian over all of psi; gd2 replaces the
// h block with a fitted AR(1) Gaussian family.
MLEstimate csv_gd_log_ml(const ChainOutput& chain, const VARData& data, const PriorBundle& priors, bool use_h_family,
                         double alpha = 0.05, int threads = 1);

// Importance-sampling estimate of an observed-data log likelihood where the
// log-volatility paths are integrated out numerically against fitted AR(1)
// families and everything else is held at the supplied parameter point.
struct ObservedLoglik {
  double value = 0.0;
  double ess = 0.0;
  bool low_ess = false;  // flagged when ESS < 10
};

// FSV observed-data log likelihood at a parameter point: factors integrated
// analytically (block-diagonal S_y), log-volatility by importance sampling.
ObservedLoglik fsv_observed_loglik(const VARData& data, const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& L,
                                   const Eigen::VectorXd& mu, const Eigen::VectorXd& phi,
                                   const Eigen::VectorXd& sigma2, const std::vector<Ar1GaussianFamily>& h_family,
                                   long long R, RngStream& rng);

// Deviance information criterion based on the observed-data likelihood.
struct DicResult {
  double dic = 0.0;
  double mean_deviance = 0.0;       // D-bar
  double pd = 0.0;                  // effective number of parameters
  double deviance_at_point = 0.0;   // D(theta-tilde), theta-tilde = posterior mean
};

// Generic DIC: draws are flattened parameter vectors, loglik evaluates the
// observed-data log likelihood. Evaluator failures (exceptions / NaN) above a
// 1% budget abort.
DicResult compute_dic(const std::vector<Eigen::VectorXd>& draws,
                      const std::function<double(const Eigen::VectorXd&)>& loglik, int threads = 1);

// Observed-data DIC for a fitted chain (h and, for FSV, f integrated out; the
// importance families for h are fitted from the chain's own draws).
DicResult dic_for_chain(const ChainOutput& chain, const VARData& data, long long R_h, RngStream& rng,
                        int max_draws = 0);

}  // namespace bvarml
