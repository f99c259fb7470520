#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "bvarml/minnesota.hpp"
#include "bvarml/rng.hpp"
#include "bvarml/states.hpp"
#include "bvarml/var_data.hpp"

namespace bvarml {

struct CsvPrior {
  ConjugatePrior conj;
  VolPrior vol;  // the CSV log-volatility mean is fixed at zero
};

// Joint normal-inverse-Wishart draw of (A, Sigma | Y, h, kappa).
void csv_sample_A_Sigma(RngStream& rng, const VARData& data, const Eigen::VectorXd& h, double kappa,
                        const ConjugatePrior& prior, Eigen::MatrixXd* A, Eigen::MatrixXd* Sigma);

// Acceptance-rejection MH draw of the common log-volatility path, proposal
// N(hhat, K_h^{-1}) from a damped Newton search of the conditional mode.
// Returns true when the proposal was accepted (h is updated in place).
bool csv_sample_h(RngStream& rng, const VARData& data, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma,
                  double phi, double sigma2, Eigen::VectorXd* h);

// Independence move built from the auxiliary-mixture representation of the
// orthogonalized squared innovations (n pseudo-observations per period),
// MH-corrected against the exact conditional: the proposal is a two-step
// Gibbs pass under the mixture model, so the acceptance ratio only involves
// the exact-vs-mixture likelihood ratio and stays near one. Used to refresh
// the path when the Laplace proposal underestimates the conditional spread.
bool csv_refresh_h_aux(RngStream& rng, const VARData& data, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma,
                       double phi, double sigma2, Eigen::VectorXd* h);

// GIG draw of the conjugate-prior shrinkage strength.
double csv_sample_kappa(RngStream& rng, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma,
                        const ConjugatePrior& prior);

// Full Gibbs sweep driver for the CSV model; with sample_vol = false it
// degenerates to the homoskedastic VAR (h pinned at zero).
class CsvSampler {
 public:
  CsvSampler(const VARData& data, CsvPrior prior, bool sample_vol = true)
      : data_(data), prior_(std::move(prior)), sample_vol_(sample_vol) {}

  CsvState init_state() const;
  void sweep(RngStream& rng, CsvState& state, std::map<std::string, double>* tallies) const;

  const VARData& data() const { return data_; }
  const CsvPrior& prior() const { return prior_; }

 private:
  VARData data_;
  CsvPrior prior_;
  bool sample_vol_;
};

}  // namespace bvarml
