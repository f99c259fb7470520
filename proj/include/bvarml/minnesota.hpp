#pragma once

#include <Eigen/Dense>

namespace bvarml {

enum class PriorMode { asymmetric, symmetric, subjective };

PriorMode prior_mode_from_string(const std::string& s);
std::string to_string(PriorMode mode);

struct GammaHyper {
  double shape = 1.0;
  double rate = 25.0;
};

// Priors for one log-volatility AR(1) block (and the scalar CSV block, where
// the mean is fixed at zero).
struct VolPrior {
  double mu0 = 0.0;
  double V_mu = 10.0;
  double phi0 = 0.97;
  double V_phi = 0.01;
  double nu = 5.0;   // sigma2 ~ IG(nu, S)
  double S = 0.4;    // prior mean S/(nu-1) = 0.1
};

// Lag-l coefficient of variable r gets variance kappa / (l^2 s2_r); the
// intercept gets intercept_var (unscaled). Length 1 + n p.
Eigen::VectorXd conjugate_V_A(double kappa, const Eigen::VectorXd& s2, int p, int n, double intercept_var = 100.0);

// Per-equation prior variances for equation i (0-based): own lags kappa1/l^2,
// other lags kappa2 s2_i/(l^2 s2_j), intercept intercept_var * s2_i.
Eigen::VectorXd equation_V_alpha(int i, double kappa1, double kappa2, const Eigen::VectorXd& s2, int p,
                                 double intercept_var = 100.0);

// Impact-row prior variances for equation i (0-based): entry j is
// kappa3 s2_i / s2_j, j = 0..i-1. Row 0 is empty.
Eigen::VectorXd impact_V_beta(int i, double kappa3, const Eigen::VectorXd& s2);

// Natural conjugate prior on (A, Sigma | kappa) for the CSV / homoskedastic VAR.
struct ConjugatePrior {
  Eigen::MatrixXd A0;  // k x n prior mean, zero by default
  Eigen::VectorXd s2;  // AR(4) residual variances, length n
  int p = 1;
  double intercept_var = 100.0;
  double nu0 = 0.0;
  Eigen::MatrixXd S0;
  GammaHyper kappa_hyper{1.0, 25.0};
  bool estimate_kappa = true;
  double kappa_fixed = 0.04;

  // nu0 = n + 3 and S0 = diag(s2) * (nu0 - n - 1), so the prior mean of Sigma
  // is diag(s2).
  static ConjugatePrior defaults(const Eigen::VectorXd& s2, int p);

  int n() const { return static_cast<int>(s2.size()); }
  int k() const { return 1 + n() * p; }
  Eigen::VectorXd V_A(double kappa) const { return conjugate_V_A(kappa, s2, p, n(), intercept_var); }
  // Constants C_i with V_A(kappa)_i = kappa * C_i for i >= 1 (lag entries).
  Eigen::VectorXd lag_constants() const;
};

// Per-equation Minnesota prior for the SV / FSV models.
struct EquationPrior {
  Eigen::VectorXd s2;
  int p = 1;
  PriorMode mode = PriorMode::asymmetric;
  double intercept_var = 100.0;
  double loading_var = 1.0;  // FSV loading prior covariance is the identity
  GammaHyper k1_hyper{1.0, 25.0};
  GammaHyper k2_hyper{1.0, 625.0};
  GammaHyper k3_hyper{1.0, 1.0};
  bool estimate_kappas = true;
  double kappa1_fixed = 0.04;
  double kappa2_fixed = 0.0016;
  double kappa3_fixed = 1.0;
  VolPrior vol;

  static EquationPrior defaults(const Eigen::VectorXd& s2, int p);

  int n() const { return static_cast<int>(s2.size()); }
  int k() const { return 1 + n() * p; }
  Eigen::VectorXd V_alpha(int i, double kappa1, double kappa2) const {
    return equation_V_alpha(i, kappa1, kappa2, s2, p, intercept_var);
  }
  Eigen::VectorXd V_beta(int i, double kappa3) const { return impact_V_beta(i, kappa3, s2); }
};

enum class KappaGroup { own, other, impact, conjugate };

struct GigParams {
  double p = 0.0;
  double a = 0.0;
  double b = 0.0;
};

// GIG full-conditional parameters for a shrinkage hyperparameter whose group
// has coefficient deviations `resid` (coef minus prior mean) and prior-variance
// constants `C` (variance = kappa * C entrywise):
//   p = c1 - m/2, a = 2 c2, b = sum resid_i^2 / C_i.
GigParams kappa_gig_params(const Eigen::VectorXd& resid, const Eigen::VectorXd& C, const GammaHyper& hyper);

// Conjugate-prior variant: b = sum_{i >= 2} Q_ii / C_i with
// Q = (A - A0) Sigma^{-1} (A - A0)' and m = (k - 1) n.
GigParams kappa_gig_params_conjugate(const Eigen::MatrixXd& A, const Eigen::MatrixXd& A0, const Eigen::MatrixXd& Sigma,
                                     const Eigen::VectorXd& lag_constants, const GammaHyper& hyper);

// Group extraction from the stacked coefficient matrix (k x n, column = equation).
// Returns (resid, C) aligned on the group's index set.
struct KappaGroupData {
  Eigen::VectorXd resid;
  Eigen::VectorXd C;
};
KappaGroupData collect_kappa_group(KappaGroup group, const Eigen::MatrixXd& alpha, const Eigen::VectorXd& s2, int p);
KappaGroupData collect_impact_group(const std::vector<Eigen::VectorXd>& beta, const Eigen::VectorXd& s2);

}  // namespace bvarml
