#pragma once

#include "bvarml/csv_model.hpp"
#include "bvarml/fsv_model.hpp"
#include "bvarml/sv_model.hpp"

namespace bvarml {

// Priors for every supported model, built from the same AR(4) residual scales.
struct PriorBundle {
  CsvPrior csv;
  EquationPrior eq;

  static PriorBundle defaults(const Eigen::VectorXd& s2, int p);
  // Monte Carlo configuration: all shrinkage strengths held fixed at
  // kappa = kappa1 = kappa2 = 0.2^2 (and kappa3 = 1, loading variance 1).
  static PriorBundle fixed_shrinkage(const Eigen::VectorXd& s2, int p, double kappa = 0.04);
};

// Runs the model's Gibbs sweep sequence and records kept states, acceptance
// rates and timing. Step failures abort with the sweep index attached.
ChainOutput run_chain(ModelTag model, const VARData& data, const PriorBundle& priors, const RunConfig& config);

}  // namespace bvarml
