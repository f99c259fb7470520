#pragma once

#include <Eigen/Dense>

#include "bvarml/rng.hpp"

namespace bvarml {

// Generalized inverse Gaussian, density proportional to
//   x^{p-1} exp(-(a x + b / x) / 2),  x > 0.
// Valid regions: a>0,b>=0 with p>0; a>=0,b>0 with p<0; a>0,b>0 any p.
// Rejection sampler on the log scale (the transformed density is log-concave),
// with gamma / inverse-gamma shortcuts at the b=0 / a=0 boundaries.
double draw_gig(RngStream& rng, double p, double a, double b);

// Inverse-Wishart(nu, S) with nu > n-1 and S SPD, via the Bartlett factorization.
Eigen::MatrixXd draw_inverse_wishart(RngStream& rng, double nu, const Eigen::MatrixXd& S);

// N(m, v) restricted to (lo, hi). Exact rejection mix: plain normal,
// uniform band, or translated-exponential tails depending on the region.
// Throws std::underflow_error when the interval mass is below ~1e-300.
double draw_truncated_normal(RngStream& rng, double m, double v, double lo, double hi);

// vec(A) ~ N(vec(M), Sigma kron K^{-1}); K is the k x k row precision,
// Sigma the n x n column covariance.
Eigen::MatrixXd draw_matrix_normal_prec(RngStream& rng, const Eigen::MatrixXd& M, const Eigen::MatrixXd& Sigma,
                                        const Eigen::LLT<Eigen::MatrixXd>& K_llt);

// x ~ N(K^{-1} c, K^{-1}) for a dense SPD precision K (pre-factorized).
Eigen::VectorXd draw_mvn_precision(RngStream& rng, const Eigen::VectorXd& c, const Eigen::LLT<Eigen::MatrixXd>& K_llt);

}  // namespace bvarml
