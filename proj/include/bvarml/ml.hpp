#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "bvarml/ce_fit.hpp"
#include "bvarml/chain.hpp"
#include "bvarml/minnesota.hpp"
#include "bvarml/rng.hpp"
#include "bvarml/states.hpp"
#include "bvarml/var_data.hpp"

namespace bvarml {

struct MLEstimate {
  double log_ml = 0.0;
  double nse = 0.0;  // numerical standard error of the log estimate
  long long R = 0;   // importance-sample size
  double ess = 0.0;  // effective sample size
};

// log p(Y | h, kappa) for the CSV model with the natural conjugate prior:
// the VAR coefficients and error covariance are integrated out analytically.
double csv_integrated_likelihood(const VARData& data, const Eigen::VectorXd& h, double kappa,
                                 const ConjugatePrior& prior);

// log p(h | mu, phi) with the innovation variance integrated against its
// IG(nu, S) prior.
double log_ph_given_phi(const Eigen::VectorXd& h, double mu, double phi, double nu, double S);

// log p(Y | B0, h, kappa1, kappa2) for the SV model: all reduced-form
// coefficients integrated out against their Minnesota priors.
double sv_integrated_likelihood(const VARData& data, const Eigen::MatrixXd& B0, const Eigen::MatrixXd& h,
                                double kappa1, double kappa2, const EquationPrior& prior);

// log p(y | L, h, kappa1, kappa2) for the FSV model: coefficients and latent
// factors integrated out; the observation covariance is block diagonal over t
// with blocks D_t + L G_t L'.
double fsv_integrated_likelihood(const VARData& data, const Eigen::MatrixXd& L, const Eigen::MatrixXd& h,
                                 double kappa1, double kappa2, const EquationPrior& prior);

// Exact log marginal likelihood of the homoskedastic VAR under the natural
// conjugate prior with a fixed shrinkage strength (h identically zero).
double homoskedastic_var_log_ml(const VARData& data, const ConjugatePrior& prior, double kappa);

// Generic importance-sampling evidence estimator: draw_log_weight must return
// one log importance weight per call. Draws split across worker streams with
// a deterministic reduction for a fixed worker count. Throws when every
// weight vanishes.
MLEstimate is_estimate(RngStream& rng, long long R, const std::function<double(RngStream&)>& draw_log_weight,
                       int threads = 1);

// Importance-sampling marginal likelihood for the named model: samples the
// fitted family, weights by integrated likelihood x structural priors over
// family density.
MLEstimate is_log_ml(ModelTag model, const VARData& data, const PriorBundle& priors, const ISFamily& family,
                     long long R, RngStream& rng, int threads = 1);

}  // namespace bvarml
