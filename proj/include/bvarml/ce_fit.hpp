#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bvarml/rng.hpp"
#include "bvarml/states.hpp"

namespace bvarml {

// Gaussian importance family for a log-volatility path, parameterized as an
// AR(1) with time-varying intercepts and variances:
//   h_1 ~ N(a_1, b_1),  h_t = a_t + rho h_{t-1} + N(0, b_t).
// The implied joint is N(H^{-1} a, (H' B^{-1} H)^{-1}) with |H| = 1.
struct Ar1GaussianFamily {
  double rho = 0.0;
  Eigen::VectorXd a;
  Eigen::VectorXd b;

  int T() const { return static_cast<int>(a.size()); }
  Eigen::VectorXd sample(RngStream& rng) const;
  double log_pdf(const Eigen::VectorXd& h) const;
  Eigen::VectorXd mean() const;  // H^{-1} a
  int parameter_count() const { return 2 * T() + 1; }
};

struct GammaBlock {
  double shape = 1.0;
  double rate = 1.0;

  double sample(RngStream& rng) const { return rng.gamma(shape, rate); }
  double log_pdf(double x) const;
};

struct NormalBlock {
  double mean = 0.0;
  double prec = 1.0;

  double sample(RngStream& rng) const { return rng.normal(mean, 1.0 / prec); }
  double log_pdf(double x) const;
};

// Full or diagonal Gaussian over a short coefficient row.
struct MvNormalBlock {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  bool diagonal = false;

  int dim() const { return static_cast<int>(mean.size()); }
  Eigen::VectorXd sample(RngStream& rng) const;
  double log_pdf(const Eigen::VectorXd& x) const;
  int parameter_count() const;
};

// Block-separable importance family fitted to posterior draws. Block layout
// per model: CSV uses one h block, one phi block and one kappa block; SV uses
// n h blocks, beta rows 2..n, n mu and phi blocks and three kappa blocks; FSV
// uses n+r h blocks, the loading rows, n+r mu and phi blocks and two kappa
// blocks. Kappa blocks are absent when the shrinkage strengths were fixed.
struct ISFamily {
  ModelTag model = ModelTag::csv;
  std::vector<Ar1GaussianFamily> h_blocks;
  std::vector<MvNormalBlock> row_blocks;
  std::vector<NormalBlock> mu_blocks;
  std::vector<NormalBlock> phi_blocks;
  std::vector<GammaBlock> kappa_blocks;

  int parameter_count() const;
  std::string to_json() const;
  static ISFamily from_json(const std::string& text);
};

// Maximum-likelihood fit of the AR(1) Gaussian family: a and b are available
// in closed form given rho; rho maximizes the concentrated likelihood by
// golden-section search over [-0.999, 0.999] (three bracketing restarts).
// With literal_residual = true, b_t is the second moment of (h_t - a_t)
// rather than of the transformed residual.
Ar1GaussianFamily fit_ar1_family(const Eigen::MatrixXd& draws, bool literal_residual = false);

// Gamma ML fit by Newton iteration on the digamma first-order condition.
GammaBlock fit_gamma_ml(const Eigen::VectorXd& draws);

// Gaussian ML fit (population-divisor variance).
NormalBlock fit_normal(const Eigen::VectorXd& draws);

// Full-covariance fit for dim <= max_full_dim, diagonal otherwise.
MvNormalBlock fit_mv_normal(const Eigen::MatrixXd& draws, int max_full_dim = 10);

ISFamily build_is_family(ModelTag model, const ChainOutput& chain, bool include_kappa = true);

}  // namespace bvarml
