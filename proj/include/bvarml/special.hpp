#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bvarml {

// log Gamma_n(x) = n(n-1)/4 * log(pi) + sum_{j=1}^n lgamma(x + (1-j)/2).
// Requires x > (n-1)/2 (pole otherwise).
double ln_multivariate_gamma(int n, double x);

double digamma(double x);
double trigamma(double x);

// log Phi(x) for the standard normal, stable in the far left tail.
double log_norm_cdf(double x);
// log(1 - Phi(x)).
double log_norm_sf(double x);

double log_normal_pdf(double x, double mean, double var);
// Gamma(shape, rate) density.
double log_gamma_pdf(double x, double shape, double rate);
// Inverse-gamma(shape, scale) density.
double log_inverse_gamma_pdf(double x, double shape, double scale);
// N(mean, var) truncated to (lo, hi); normalizing constant included.
double log_truncated_normal_pdf(double x, double mean, double var, double lo, double hi);

// Multivariate normal with dense covariance / precision.
double log_mvn_pdf_cov(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);
double log_mvn_pdf_prec(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& prec);

// Inverse-Wishart(nu, S) density at SPD Sigma.
double log_inverse_wishart_pdf(const Eigen::MatrixXd& sigma, double nu, const Eigen::MatrixXd& S);
// Matrix normal: vec(A) ~ N(vec(M), Sigma kron Kinv) with K the row precision.
double log_matrix_normal_pdf_prec(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M, const Eigen::MatrixXd& Sigma,
                                  const Eigen::MatrixXd& K);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
// (1 - alpha) quantile of the chi-squared distribution with dof degrees of freedom.
double chi2_quantile(double alpha, double dof);

// log(sum_i exp(v_i)) guarded against overflow; -inf for empty input.
double log_sum_exp(const std::vector<double>& v);

// log-determinant of an SPD matrix via Cholesky; throws on failure.
double log_det_spd(const Eigen::MatrixXd& m);

}  // namespace bvarml
