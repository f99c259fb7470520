#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "bvarml/minnesota.hpp"
#include "bvarml/rng.hpp"
#include "bvarml/states.hpp"
#include "bvarml/var_data.hpp"

namespace bvarml {

// Latent factor draw; the precision is block-diagonal across t, so each
// period is an independent r x r solve.
void fsv_sample_factors(RngStream& rng, const Eigen::MatrixXd& eps, const Eigen::MatrixXd& L, const Eigen::MatrixXd& h,
                        Eigen::MatrixXd* f);

// Joint conjugate draw of (alpha_i, l_i) equation by equation; given the
// factors the VAR separates into n unrelated heteroskedastic regressions.
void fsv_sample_theta(RngStream& rng, const VARData& data, const EquationPrior& prior, FsvState& state);

void fsv_sample_kappas(RngStream& rng, const EquationPrior& prior, FsvState& state);

class FsvSampler {
 public:
  FsvSampler(const VARData& data, EquationPrior prior, int r) : data_(data), prior_(std::move(prior)), r_(r) {}

  FsvState init_state() const;
  void sweep(RngStream& rng, FsvState& state, std::map<std::string, double>* tallies) const;

  const VARData& data() const { return data_; }
  const EquationPrior& prior() const { return prior_; }
  int factor_count() const { return r_; }

 private:
  VARData data_;
  EquationPrior prior_;
  int r_;
};

}  // namespace bvarml
