#include "bvarml/sv_model.hpp"

#include <cmath>
#include <stdexcept>

#include "bvarml/ar1_steps.hpp"
#include "bvarml/draws.hpp"
#include "bvarml/ksc.hpp"

namespace bvarml {

void sv_sample_alpha(RngStream& rng, const VARData& data, const EquationPrior& prior, SvState& state) {
  const int n = data.n, k = data.k(), T = data.T;
  const Eigen::MatrixXd B0 = state.impact_matrix();

  // Per-equation weighted Gram matrices M_l = X' D_l^{-1} X; fixed over the
  // equation loop since they do not depend on alpha.
  std::vector<Eigen::MatrixXd> M(n);
  std::vector<Eigen::ArrayXd> wexp(n);
  for (int l = 0; l < n; ++l) {
    wexp[l] = (-state.h.row(l).transpose().array()).exp();
    M[l] = data.X.transpose() * (wexp[l].matrix().asDiagonal() * data.X);
  }

  Eigen::MatrixXd resid = data.Y - data.X * state.alpha;  // T x n

  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd v_alpha = prior.V_alpha(i, state.kappa1, state.kappa2);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    // R_i equals resid with column i replaced by y_i (the i-th column of
    // A_{i=0} is zero).
    for (int l = i; l < n; ++l) {
      const double bli = B0(l, i);
      if (bli == 0.0) continue;
      K += (bli * bli) * M[l];
      Eigen::VectorXd z_l = Eigen::VectorXd::Zero(T);
      for (int j = 0; j <= l; ++j) {
        const double blj = B0(l, j);
        if (blj == 0.0) continue;
        if (j == i)
          z_l += blj * data.Y.col(i);
        else
          z_l += blj * resid.col(j);
      }
      rhs += bli * (data.X.transpose() * (wexp[l] * z_l.array()).matrix());
    }
    K.diagonal() += v_alpha.cwiseInverse();
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) throw std::runtime_error("sv_sample_alpha: K_alpha not positive definite");
    state.alpha.col(i) = draw_mvn_precision(rng, rhs, llt);
    resid.col(i) = data.Y.col(i) - data.X * state.alpha.col(i);
  }
}

void sv_sample_beta(RngStream& rng, const Eigen::MatrixXd& eps, const EquationPrior& prior, SvState& state) {
  const int n = static_cast<int>(eps.cols());
  for (int i = 1; i < n; ++i) {
    const Eigen::VectorXd v_beta = prior.V_beta(i, state.kappa3);
    const Eigen::ArrayXd w = (-state.h.row(i).transpose().array()).exp();
    const Eigen::MatrixXd G = -eps.leftCols(i);
    Eigen::MatrixXd K = G.transpose() * (w.matrix().asDiagonal() * G);
    K.diagonal() += v_beta.cwiseInverse();
    const Eigen::VectorXd rhs = G.transpose() * (w * eps.col(i).array()).matrix();
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) throw std::runtime_error("sv_sample_beta: K_beta not positive definite");
    state.beta[i] = draw_mvn_precision(rng, rhs, llt);
  }
}

void sv_sample_kappas(RngStream& rng, const EquationPrior& prior, SvState& state) {
  const KappaGroupData own = collect_kappa_group(KappaGroup::own, state.alpha, prior.s2, prior.p);
  const KappaGroupData other = collect_kappa_group(KappaGroup::other, state.alpha, prior.s2, prior.p);
  switch (prior.mode) {
    case PriorMode::asymmetric: {
      const GigParams g1 = kappa_gig_params(own.resid, own.C, prior.k1_hyper);
      const GigParams g2 = kappa_gig_params(other.resid, other.C, prior.k2_hyper);
      state.kappa1 = draw_gig(rng, g1.p, g1.a, g1.b);
      state.kappa2 = draw_gig(rng, g2.p, g2.a, g2.b);
      break;
    }
    case PriorMode::symmetric: {
      Eigen::VectorXd resid(own.resid.size() + other.resid.size());
      Eigen::VectorXd C(resid.size());
      resid << own.resid, other.resid;
      C << own.C, other.C;
      const GigParams g = kappa_gig_params(resid, C, prior.k1_hyper);
      state.kappa1 = state.kappa2 = draw_gig(rng, g.p, g.a, g.b);
      break;
    }
    case PriorMode::subjective:
      state.kappa1 = prior.kappa1_fixed;
      state.kappa2 = prior.kappa2_fixed;
      break;
  }
  const KappaGroupData impact = collect_impact_group(state.beta, prior.s2);
  const GigParams g3 = kappa_gig_params(impact.resid, impact.C, prior.k3_hyper);
  state.kappa3 = draw_gig(rng, g3.p, g3.a, g3.b);
}

SvState SvSampler::init_state() const {
  const int n = data_.n, T = data_.T;
  SvState s;
  s.alpha = Eigen::MatrixXd::Zero(data_.k(), n);
  s.beta.resize(n);
  for (int i = 0; i < n; ++i) s.beta[i] = Eigen::VectorXd::Zero(i);
  s.h = Eigen::MatrixXd::Zero(n, T);
  for (int i = 0; i < n; ++i) s.h.row(i).setConstant(std::log(prior_.s2(i)));
  s.mu = s.h.col(0);
  s.phi = Eigen::VectorXd::Constant(n, 0.95);
  s.sigma2 = Eigen::VectorXd::Constant(n, 0.05);
  if (prior_.estimate_kappas && prior_.mode != PriorMode::subjective) {
    s.kappa1 = prior_.k1_hyper.shape / prior_.k1_hyper.rate;
    s.kappa2 = prior_.mode == PriorMode::symmetric ? s.kappa1 : prior_.k2_hyper.shape / prior_.k2_hyper.rate;
  } else {
    s.kappa1 = prior_.kappa1_fixed;
    s.kappa2 = prior_.kappa2_fixed;
  }
  s.kappa3 = prior_.estimate_kappas ? prior_.k3_hyper.shape / prior_.k3_hyper.rate : prior_.kappa3_fixed;
  return s;
}

void SvSampler::sweep(RngStream& rng, SvState& state, std::map<std::string, double>* tallies) const {
  const int n = data_.n;
  sv_sample_alpha(rng, data_, prior_, state);
  const Eigen::MatrixXd eps = data_.Y - data_.X * state.alpha;
  sv_sample_beta(rng, eps, prior_, state);

  const Eigen::MatrixXd eps_orth = eps * state.impact_matrix().transpose();
  for (int i = 0; i < n; ++i) {
    state.h.row(i) = ksc_sample_logvol(rng, eps_orth.col(i), state.h.row(i).transpose(), state.mu(i), state.phi(i),
                                       state.sigma2(i))
                         .transpose();
  }
  for (int i = 0; i < n; ++i)
    state.mu(i) = sample_ar1_mu(rng, state.h.row(i).transpose(), state.phi(i), state.sigma2(i), prior_.vol.mu0,
                                prior_.vol.V_mu);
  for (int i = 0; i < n; ++i) {
    bool ok = false;
    state.phi(i) = sample_ar1_phi(rng, state.h.row(i).transpose(), state.mu(i), state.sigma2(i), prior_.vol.phi0,
                                  prior_.vol.V_phi, state.phi(i), &ok);
    if (tallies) (*tallies)["phi_" + std::to_string(i + 1)] += ok ? 1.0 : 0.0;
  }
  for (int i = 0; i < n; ++i)
    state.sigma2(i) =
        sample_ar1_sigma2(rng, state.h.row(i).transpose(), state.mu(i), state.phi(i), prior_.vol.nu, prior_.vol.S);
  if (prior_.estimate_kappas) sv_sample_kappas(rng, prior_, state);
}

}  // namespace bvarml
