#include "bvarml/fsv_model.hpp"

#include <cmath>
#include <stdexcept>

#include "bvarml/ar1_steps.hpp"
#include "bvarml/draws.hpp"
#include "bvarml/ksc.hpp"

namespace bvarml {

void fsv_sample_factors(RngStream& rng, const Eigen::MatrixXd& eps, const Eigen::MatrixXd& L, const Eigen::MatrixXd& h,
                        Eigen::MatrixXd* f) {
  const int T = static_cast<int>(eps.rows());
  const int n = static_cast<int>(L.rows());
  const int r = static_cast<int>(L.cols());
  f->resize(r, T);
  for (int t = 0; t < T; ++t) {
    const Eigen::ArrayXd dinv = (-h.col(t).head(n).array()).exp();
    const Eigen::ArrayXd ginv = (-h.col(t).tail(r).array()).exp();
    const Eigen::MatrixXd Lw = dinv.matrix().asDiagonal() * L;
    Eigen::MatrixXd K = L.transpose() * Lw;
    K.diagonal() += ginv.matrix();
    const Eigen::VectorXd rhs = Lw.transpose() * eps.row(t).transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) throw std::runtime_error("fsv_sample_factors: K_f not positive definite");
    f->col(t) = draw_mvn_precision(rng, rhs, llt);
  }
}

void fsv_sample_theta(RngStream& rng, const VARData& data, const EquationPrior& prior, FsvState& state) {
  const int n = data.n, k = data.k(), T = data.T, r = state.factor_count();
  for (int i = 0; i < n; ++i) {
    const int nl = std::min(i, r);
    const Eigen::VectorXd v_alpha = prior.V_alpha(i, state.kappa1, state.kappa2);
    Eigen::MatrixXd Z(T, k + nl);
    Z.leftCols(k) = data.X;
    if (nl > 0) Z.rightCols(nl) = state.f.topRows(nl).transpose();
    Eigen::VectorXd y = data.Y.col(i);
    if (i < r) y -= state.f.row(i).transpose();

    const Eigen::ArrayXd w = (-state.h.row(i).transpose().array()).exp();
    Eigen::MatrixXd K = Z.transpose() * (w.matrix().asDiagonal() * Z);
    for (int j = 0; j < k; ++j) K(j, j) += 1.0 / v_alpha(j);
    for (int j = 0; j < nl; ++j) K(k + j, k + j) += 1.0 / prior.loading_var;
    const Eigen::VectorXd rhs = Z.transpose() * (w * y.array()).matrix();
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) throw std::runtime_error("fsv_sample_theta: K_theta not positive definite");
    const Eigen::VectorXd theta = draw_mvn_precision(rng, rhs, llt);
    state.alpha.col(i) = theta.head(k);
    state.loadings[i] = theta.tail(nl);
  }
}

void fsv_sample_kappas(RngStream& rng, const EquationPrior& prior, FsvState& state) {
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
}

FsvState FsvSampler::init_state() const {
  const int n = data_.n, T = data_.T;
  FsvState s;
  s.alpha = Eigen::MatrixXd::Zero(data_.k(), n);
  s.loadings.resize(n);
  for (int i = 0; i < n; ++i) s.loadings[i] = Eigen::VectorXd::Zero(std::min(i, r_));
  s.f = Eigen::MatrixXd::Zero(r_, T);
  s.h = Eigen::MatrixXd::Zero(n + r_, T);
  for (int i = 0; i < n; ++i) s.h.row(i).setConstant(std::log(prior_.s2(i)));
  s.mu = Eigen::VectorXd::Zero(n + r_);
  s.mu.head(n) = s.h.col(0).head(n);
  s.phi = Eigen::VectorXd::Constant(n + r_, 0.95);
  s.sigma2 = Eigen::VectorXd::Constant(n + r_, 0.05);
  if (prior_.estimate_kappas && prior_.mode != PriorMode::subjective) {
    s.kappa1 = prior_.k1_hyper.shape / prior_.k1_hyper.rate;
    s.kappa2 = prior_.mode == PriorMode::symmetric ? s.kappa1 : prior_.k2_hyper.shape / prior_.k2_hyper.rate;
  } else {
    s.kappa1 = prior_.kappa1_fixed;
    s.kappa2 = prior_.kappa2_fixed;
  }
  return s;
}

void FsvSampler::sweep(RngStream& rng, FsvState& state, std::map<std::string, double>* tallies) const {
  const int n = data_.n, r = r_;
  Eigen::MatrixXd eps = data_.Y - data_.X * state.alpha;
  const Eigen::MatrixXd L = state.loading_matrix();
  fsv_sample_factors(rng, eps, L, state.h, &state.f);
  fsv_sample_theta(rng, data_, prior_, state);

  eps = data_.Y - data_.X * state.alpha;
  const Eigen::MatrixXd U = eps - state.f.transpose() * state.loading_matrix().transpose();
  for (int i = 0; i < n + r; ++i) {
    const Eigen::VectorXd series = i < n ? Eigen::VectorXd(U.col(i)) : Eigen::VectorXd(state.f.row(i - n).transpose());
    state.h.row(i) =
        ksc_sample_logvol(rng, series, state.h.row(i).transpose(), state.mu(i), state.phi(i), state.sigma2(i))
            .transpose();
  }
  for (int i = 0; i < n + r; ++i)
    state.sigma2(i) =
        sample_ar1_sigma2(rng, state.h.row(i).transpose(), state.mu(i), state.phi(i), prior_.vol.nu, prior_.vol.S);
  for (int i = 0; i < n + r; ++i)
    state.mu(i) = sample_ar1_mu(rng, state.h.row(i).transpose(), state.phi(i), state.sigma2(i), prior_.vol.mu0,
                                prior_.vol.V_mu);
  for (int i = 0; i < n + r; ++i) {
    bool ok = false;
    state.phi(i) = sample_ar1_phi(rng, state.h.row(i).transpose(), state.mu(i), state.sigma2(i), prior_.vol.phi0,
                                  prior_.vol.V_phi, state.phi(i), &ok);
    if (tallies) (*tallies)["phi_" + std::to_string(i + 1)] += ok ? 1.0 : 0.0;
  }
  if (prior_.estimate_kappas) fsv_sample_kappas(rng, prior_, state);
}

}  // namespace bvarml
