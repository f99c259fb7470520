#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace bvarml {

enum class ModelTag { var, csv, sv, fsv };

ModelTag model_tag_from_string(const std::string& s);
std::string to_string(ModelTag tag);

// Common-stochastic-volatility VAR state: one volatility factor scales a
// constant covariance. The log-volatility mean is fixed at zero.
struct CsvState {
  Eigen::MatrixXd A;      // k x n
  Eigen::MatrixXd Sigma;  // n x n SPD
  Eigen::VectorXd h;      // length T
  double phi = 0.0;       // |phi| < 1
  double sigma2 = 0.0;    // > 0
  double kappa = 0.0;     // > 0

  void validate() const;
};

// Cholesky-stochastic-volatility VAR state. alpha column i holds the i-th
// equation's intercept and lag coefficients; beta[i] holds the free elements
// of row i of the unit-lower-triangular impact matrix (beta[0] is empty).
struct SvState {
  Eigen::MatrixXd alpha;              // k x n
  std::vector<Eigen::VectorXd> beta;  // beta[i] has length i
  Eigen::MatrixXd h;                  // n x T
  Eigen::VectorXd mu, phi, sigma2;    // length n
  double kappa1 = 0.0, kappa2 = 0.0, kappa3 = 0.0;

  Eigen::MatrixXd impact_matrix() const;  // B0, unit lower triangular
  void validate() const;
};

// Factor-stochastic-volatility VAR state. loadings[i] holds the free elements
// of row i of the unit-diagonal lower-triangular n x r loading matrix
// (length min(i, r) for 0-based row i).
struct FsvState {
  Eigen::MatrixXd alpha;                  // k x n
  std::vector<Eigen::VectorXd> loadings;  // row i: length min(i, r)
  Eigen::MatrixXd f;                      // r x T latent factors
  Eigen::MatrixXd h;                      // (n + r) x T
  Eigen::VectorXd mu, phi, sigma2;        // length n + r
  double kappa1 = 0.0, kappa2 = 0.0;

  int factor_count() const { return static_cast<int>(f.rows()); }
  Eigen::MatrixXd loading_matrix() const;  // L, n x r
  void validate() const;
};

using ModelState = std::variant<CsvState, SvState, FsvState>;

// Sampler run lengths and bookkeeping.
struct RunConfig {
  int burn_in = 1000;
  int kept = 20000;
  int thin = 1;
  std::uint64_t seed = 1;
  ModelTag model = ModelTag::csv;
  int p = 4;
  int r = 1;  // FSV only

  void validate(int n) const;
};

// Posterior simulation output: kept states plus acceptance bookkeeping.
struct ChainOutput {
  ModelTag model = ModelTag::csv;
  std::variant<std::vector<CsvState>, std::vector<SvState>, std::vector<FsvState>> draws;
  std::map<std::string, double> acceptance_rates;
  RunConfig config;
  double seconds = 0.0;

  std::size_t size() const;
  const std::vector<CsvState>& csv_draws() const { return std::get<std::vector<CsvState>>(draws); }
  const std::vector<SvState>& sv_draws() const { return std::get<std::vector<SvState>>(draws); }
  const std::vector<FsvState>& fsv_draws() const { return std::get<std::vector<FsvState>>(draws); }
};

}  // namespace bvarml
