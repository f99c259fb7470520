#pragma once

#include <Eigen/Dense>

#include "bvarml/chain.hpp"
#include "bvarml/panel.hpp"
#include "bvarml/rng.hpp"
#include "bvarml/states.hpp"

namespace bvarml {

// Data-generating-process settings for the Monte Carlo studies. Defaults
// match the simulation design: intercepts U(-10,10), first-lag diagonal
// U(-0.2,0.4) and off-diagonal U(-0.2,0.2), higher-lag entries N(0, 0.05^2),
// Sigma ~ IW(n+5, 0.7 I + 0.3 11'), phi = 0.98, sigma2 = 0.1, mu = -1
// (0 for factor volatilities), r = 3 factors.
struct DgpConfig {
  ModelTag model = ModelTag::csv;
  int n = 10;
  int T = 400;
  int p = 2;
  int r = 3;
  double phi = 0.98;
  double sigma2 = 0.1;
  double mu = -1.0;
  double mu_factor = 0.0;
  double noise_scale = 1.0;  // 10 rescales Sigma (CSV/VAR) or lifts mu to 1.3 (SV/FSV)
  double stability_limit = 0.999;
  int max_redraws = 50;
};

struct DgpDraw {
  Panel panel;
  ModelState truth;
  int coefficient_redraws = 0;
};

DgpDraw simulate_dgp(RngStream& rng, const DgpConfig& config);

// Spectral radius of the VAR companion matrix built from the k x n stacked
// coefficients (intercept row first, lag-1 block next).
double companion_spectral_radius(const Eigen::MatrixXd& A, int n, int p);

// Simulate T observations recursively from a fully specified state, given the
// p rows of initial values (most recent last). The latent paths inside the
// state (h, f) are used as-is.
Eigen::MatrixXd simulate_given_state(RngStream& rng, const CsvState& state, const Eigen::MatrixXd& init, int T,
                                     bool heteroskedastic = true);
Eigen::MatrixXd simulate_given_state(RngStream& rng, const SvState& state, const Eigen::MatrixXd& init, int T);
Eigen::MatrixXd simulate_given_state(RngStream& rng, const FsvState& state, const Eigen::MatrixXd& init, int T);

// Draw a complete model state (parameters and latent paths) from the priors;
// used by the simulator-calibration checks.
CsvState draw_csv_state_from_prior(RngStream& rng, const CsvPrior& prior, int T);
SvState draw_sv_state_from_prior(RngStream& rng, const EquationPrior& prior, int n, int T);
FsvState draw_fsv_state_from_prior(RngStream& rng, const EquationPrior& prior, int n, int r, int T);

}  // namespace bvarml
