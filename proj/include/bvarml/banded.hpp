#pragma once

#include <Eigen/Dense>

#include "bvarml/rng.hpp"

namespace bvarml {

// Symmetric positive-definite precision matrix in lower-band storage:
// band(d, t) holds K(t + d, t) for d = 0..bandwidth. Row 0 is the diagonal.
class BandedPrecision {
 public:
  BandedPrecision(int dim, int bandwidth);

  int dim() const { return dim_; }
  int bandwidth() const { return bw_; }

  double& at(int row, int col);
  double at(int row, int col) const;

  double& band(int d, int t) { return storage_(d, t); }
  double band(int d, int t) const { return storage_(d, t); }

  void add_diagonal(const Eigen::VectorXd& d);

  double quad_form(const Eigen::VectorXd& x) const;  // x' K x

  Eigen::MatrixXd dense() const;

  // In-band Cholesky K = L L'; throws std::runtime_error if not SPD.
  // Cost is O(dim * bandwidth^2).
  class Cholesky {
   public:
    explicit Cholesky(const BandedPrecision& k);

    double log_det() const;  // of K
    Eigen::VectorXd solve_lower(const Eigen::VectorXd& b) const;   // L x = b
    Eigen::VectorXd solve_upper(const Eigen::VectorXd& b) const;   // L' x = b
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;         // K x = b
    // Draw from N(K^{-1} c, K^{-1}).
    Eigen::VectorXd sample(RngStream& rng, const Eigen::VectorXd& c) const;

   private:
    Eigen::MatrixXd l_;  // band storage of L
    int dim_, bw_;
  };

  Cholesky cholesky() const { return Cholesky(*this); }

 private:
  int dim_, bw_;
  Eigen::MatrixXd storage_;  // (bw+1) x dim
};

// Precision of a stationary AR(1) path: x_1 ~ N(mu, s2/(1-phi^2)),
// x_t = mu + phi (x_{t-1} - mu) + N(0, s2). Bandwidth 1. The linear term
// of the Gaussian (K * mean) is returned in c if non-null.
BandedPrecision ar1_precision(int T, double phi, double s2);
Eigen::VectorXd ar1_precision_times_mean(const BandedPrecision& K, double mu);

// Draw from N(K^{-1} c, K^{-1}) via the banded Cholesky of K.
Eigen::VectorXd draw_gaussian_precision(RngStream& rng, const Eigen::VectorXd& c, const BandedPrecision& K);

// Log joint density of a stationary AR(1) path (sigma2 given, not marginalized).
double log_ar1_path_pdf(const Eigen::VectorXd& h, double mu, double phi, double s2);

}  // namespace bvarml
