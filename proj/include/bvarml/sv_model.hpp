#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "bvarml/minnesota.hpp"
#include "bvarml/rng.hpp"
#include "bvarml/states.hpp"
#include "bvarml/var_data.hpp"

namespace bvarml {

// Exact equation-by-equation update of the reduced-form coefficients: each
// alpha_i is drawn from its full conditional, which pools the information from
// all equations l >= i through the impact matrix column. Updates in order 1..n.
void sv_sample_alpha(RngStream& rng, const VARData& data, const EquationPrior& prior, SvState& state);

// Row-by-row conjugate update of the free impact-matrix elements given the
// reduced-form residuals eps = Y - X A (row i regresses eps_i on -eps_{1..i-1}).
void sv_sample_beta(RngStream& rng, const Eigen::MatrixXd& eps, const EquationPrior& prior, SvState& state);

// GIG updates of (kappa1, kappa2, kappa3); honors the prior mode.
void sv_sample_kappas(RngStream& rng, const EquationPrior& prior, SvState& state);

class SvSampler {
 public:
  SvSampler(const VARData& data, EquationPrior prior) : data_(data), prior_(std::move(prior)) {}

  SvState init_state() const;
  void sweep(RngStream& rng, SvState& state, std::map<std::string, double>* tallies) const;

  const VARData& data() const { return data_; }
  const EquationPrior& prior() const { return prior_; }

 private:
  VARData data_;
  EquationPrior prior_;
};

}  // namespace bvarml
