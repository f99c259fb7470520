#pragma once

#include <Eigen/Dense>

#include "bvarml/minnesota.hpp"
#include "bvarml/rng.hpp"

namespace bvarml {

// Independence-chain MH update of the AR coefficient of a log-volatility
// series, proposal N(phat, K^{-1}) truncated to (-1, 1); the residual factor
// g(phi) = (1-phi^2)^{1/2} exp(-(1-phi^2)(h_1-mu)^2 / (2 s2)) enters the
// acceptance ratio. Returns the new value and reports acceptance.
double sample_ar1_phi(RngStream& rng, const Eigen::VectorXd& h, double mu, double sigma2, double phi0, double V_phi,
                      double phi_current, bool* accepted = nullptr);

// Conjugate normal update of the AR(1) level.
double sample_ar1_mu(RngStream& rng, const Eigen::VectorXd& h, double phi, double sigma2, double mu0, double V_mu);

// Inverse-gamma update of the AR(1) innovation variance.
double sample_ar1_sigma2(RngStream& rng, const Eigen::VectorXd& h, double mu, double phi, double nu, double S);

// Posterior scale of the sigma2 full conditional:
// S + [(1-phi^2)(h_1-mu)^2 + sum_{t>=2} (h_t - mu - phi(h_{t-1}-mu))^2] / 2.
double ar1_sigma2_scale(const Eigen::VectorXd& h, double mu, double phi, double S);

}  // namespace bvarml
