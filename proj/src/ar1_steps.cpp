#include "bvarml/ar1_steps.hpp"

#include <cmath>

#include "bvarml/draws.hpp"

namespace bvarml {

namespace {

double log_g_phi(double phi, double h1_dev2, double sigma2) {
  return 0.5 * std::log1p(-phi * phi) - 0.5 * (1.0 - phi * phi) * h1_dev2 / sigma2;
}

}  // namespace

double sample_ar1_phi(RngStream& rng, const Eigen::VectorXd& h, double mu, double sigma2, double phi0, double V_phi,
                      double phi_current, bool* accepted) {
  const int T = static_cast<int>(h.size());
  double sxx = 0.0, sxy = 0.0;
  for (int t = 1; t < T; ++t) {
    const double x = h(t - 1) - mu;
    sxx += x * x;
    sxy += x * (h(t) - mu);
  }
  const double K = 1.0 / V_phi + sxx / sigma2;
  const double phat = (phi0 / V_phi + sxy / sigma2) / K;
  const double proposal = draw_truncated_normal(rng, phat, 1.0 / K, -1.0, 1.0);
  const double h1_dev2 = (h(0) - mu) * (h(0) - mu);
  const double log_ratio = log_g_phi(proposal, h1_dev2, sigma2) - log_g_phi(phi_current, h1_dev2, sigma2);
  const bool accept = std::log(rng.uniform()) <= log_ratio;
  if (accepted) *accepted = accept;
  return accept ? proposal : phi_current;
}

double sample_ar1_mu(RngStream& rng, const Eigen::VectorXd& h, double phi, double sigma2, double mu0, double V_mu) {
  const int T = static_cast<int>(h.size());
  const double K = 1.0 / V_mu + ((1.0 - phi * phi) + (T - 1) * (1.0 - phi) * (1.0 - phi)) / sigma2;
  double lin = (1.0 - phi * phi) * h(0);
  for (int t = 1; t < T; ++t) lin += (1.0 - phi) * (h(t) - phi * h(t - 1));
  const double mhat = (mu0 / V_mu + lin / sigma2) / K;
  return rng.normal(mhat, 1.0 / K);
}

double ar1_sigma2_scale(const Eigen::VectorXd& h, double mu, double phi, double S) {
  const int T = static_cast<int>(h.size());
  double quad = (1.0 - phi * phi) * (h(0) - mu) * (h(0) - mu);
  for (int t = 1; t < T; ++t) {
    const double e = h(t) - mu - phi * (h(t - 1) - mu);
    quad += e * e;
  }
  return S + 0.5 * quad;
}

double sample_ar1_sigma2(RngStream& rng, const Eigen::VectorXd& h, double mu, double phi, double nu, double S) {
  const int T = static_cast<int>(h.size());
  return rng.inverse_gamma(nu + 0.5 * T, ar1_sigma2_scale(h, mu, phi, S));
}

}  // namespace bvarml
