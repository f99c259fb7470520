#include "bvarml/csv_model.hpp"

#include <cmath>
#include <stdexcept>

#include "bvarml/ar1_steps.hpp"
#include "bvarml/banded.hpp"
#include "bvarml/draws.hpp"

namespace bvarml {

void csv_sample_A_Sigma(RngStream& rng, const VARData& data, const Eigen::VectorXd& h, double kappa,
                        const ConjugatePrior& prior, Eigen::MatrixXd* A, Eigen::MatrixXd* Sigma) {
  const Eigen::ArrayXd w = (-0.5 * h.array()).exp();
  const Eigen::MatrixXd Xw = data.X.array().colwise() * w;
  const Eigen::MatrixXd Yw = data.Y.array().colwise() * w;
  const Eigen::VectorXd v = prior.V_A(kappa);

  Eigen::MatrixXd K_A = Xw.transpose() * Xw;
  K_A.diagonal() += v.cwiseInverse();
  Eigen::LLT<Eigen::MatrixXd> K_llt(K_A);
  if (K_llt.info() != Eigen::Success) throw std::runtime_error("csv_sample_A_Sigma: K_A not positive definite");

  const Eigen::MatrixXd rhs = v.cwiseInverse().asDiagonal() * prior.A0 + Xw.transpose() * Yw;
  const Eigen::MatrixXd Ahat = K_llt.solve(rhs);
  // residual form of the posterior scale; algebraically equal to
  // S0 + A0'V^{-1}A0 + Y'D^{-1}Y - Ahat'K Ahat but free of cancellation
  const Eigen::MatrixXd resid = Yw - Xw * Ahat;
  const Eigen::MatrixXd dev = Ahat - prior.A0;
  Eigen::MatrixXd Shat =
      prior.S0 + resid.transpose() * resid + dev.transpose() * (v.cwiseInverse().asDiagonal() * dev);
  Shat = 0.5 * (Shat + Shat.transpose());

  *Sigma = draw_inverse_wishart(rng, prior.nu0 + data.T, Shat);
  *A = draw_matrix_normal_prec(rng, Ahat, *Sigma, K_llt);
}

namespace {

// Log conditional target of h up to a constant:
// AR(1) prior (zero mean) plus sum_t [-n/2 h_t - e^{-h_t} w_t / 2].
double csv_h_log_target(const Eigen::VectorXd& h, const BandedPrecision& prior_prec, const Eigen::VectorXd& w,
                        int n) {
  double v = -0.5 * prior_prec.quad_form(h);
  v += (-0.5 * n * h.array() - 0.5 * (-h.array()).exp() * w.array()).sum();
  return v;
}

}  // namespace

bool csv_sample_h(RngStream& rng, const VARData& data, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma,
                  double phi, double sigma2, Eigen::VectorXd* h) {
  const int T = data.T, n = data.n;
  const Eigen::MatrixXd eps = data.Y - data.X * A;
  Eigen::LLT<Eigen::MatrixXd> sig_llt(Sigma);
  if (sig_llt.info() != Eigen::Success) throw std::runtime_error("csv_sample_h: Sigma not positive definite");
  // w_t = eps_t' Sigma^{-1} eps_t
  const Eigen::MatrixXd Z = sig_llt.matrixL().solve(eps.transpose());
  const Eigen::VectorXd w = Z.colwise().squaredNorm();

  const BandedPrecision prior_prec = ar1_precision(T, phi, sigma2);

  // Damped Newton search for the conditional mode, started at the current path.
  Eigen::VectorXd hhat = *h;
  double target = csv_h_log_target(hhat, prior_prec, w, n);
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd ew = (-hhat.array()).exp() * w.array();
    Eigen::VectorXd grad(T);
    for (int t = 0; t < T; ++t) {
      double prior_term = prior_prec.band(0, t) * hhat(t);
      if (t > 0) prior_term += prior_prec.band(1, t - 1) * hhat(t - 1);
      if (t + 1 < T) prior_term += prior_prec.band(1, t) * hhat(t + 1);
      grad(t) = -prior_term - 0.5 * n + 0.5 * ew(t);
    }
    if (grad.cwiseAbs().maxCoeff() < 1e-5) break;
    BandedPrecision neg_hess = prior_prec;
    neg_hess.add_diagonal(0.5 * ew);
    const Eigen::VectorXd step = neg_hess.cholesky().solve(grad);
    double scale = 1.0;
    for (int halving = 0; halving < 30; ++halving) {
      const Eigen::VectorXd trial = hhat + scale * step;
      const double trial_target = csv_h_log_target(trial, prior_prec, w, n);
      if (trial_target >= target - 1e-12) {
        hhat = trial;
        target = trial_target;
        break;
      }
      scale *= 0.5;
      if (halving == 29) throw std::runtime_error("csv_sample_h: Newton step failed to improve the target");
    }
  }
  BandedPrecision K_h = prior_prec;
  K_h.add_diagonal(0.5 * ((-hhat.array()).exp() * w.array()).matrix());
  const auto chol = K_h.cholesky();

  const double target_at_mode = csv_h_log_target(hhat, prior_prec, w, n);
  auto log_ratio = [&](const Eigen::VectorXd& x) {
    // log f(x) - log(c q(x)) with the envelope matched at the mode.
    const Eigen::VectorXd d = x - hhat;
    return csv_h_log_target(x, prior_prec, w, n) - target_at_mode + 0.5 * K_h.quad_form(d);
  };

  // Acceptance-rejection step. The try cap is state-independent, so falling
  // back to a plain independence-MH move keeps the kernel exact while
  // avoiding stalls when the envelope fits the target poorly.
  Eigen::VectorXd proposal;
  double lw_prop = 0.0;
  bool ar_accepted = false;
  for (int tries = 0; tries < 100; ++tries) {
    proposal = hhat + chol.sample(rng, Eigen::VectorXd::Zero(T));  // N(hhat, K^{-1})
    lw_prop = log_ratio(proposal);
    if (std::log(rng.uniform()) <= std::min(0.0, lw_prop)) {
      ar_accepted = true;
      break;
    }
  }
  const double lw_cur = log_ratio(*h);
  double log_alpha;
  if (ar_accepted) {
    // MH correction for the envelope violations.
    log_alpha = 0.0;
    if (lw_cur > 0.0) log_alpha = lw_prop >= 0.0 ? lw_prop - lw_cur : -lw_cur;
  } else {
    proposal = hhat + chol.sample(rng, Eigen::VectorXd::Zero(T));
    lw_prop = log_ratio(proposal);
    log_alpha = lw_prop - lw_cur;
  }
  if (std::log(rng.uniform()) <= std::min(0.0, log_alpha)) {
    *h = proposal;
    return true;
  }
  return false;
}

bool csv_refresh_h_aux(RngStream& rng, const VARData& data, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma,
                       double phi, double sigma2, Eigen::VectorXd* h) {
  const int T = data.T, n = data.n;
  constexpr double offset_c = 1e-4;
  const Eigen::MatrixXd eps = data.Y - data.X * A;
  Eigen::LLT<Eigen::MatrixXd> sig_llt(Sigma);
  if (sig_llt.info() != Eigen::Success) throw std::runtime_error("csv_refresh_h_aux: Sigma not positive definite");
  const Eigen::MatrixXd Z = sig_llt.matrixL().solve(eps.transpose());  // n x T
  Eigen::MatrixXd ystar(n, T);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < T; ++t) ystar(i, t) = std::log(Z(i, t) * Z(i, t) + offset_c);
  const Eigen::VectorXd w = Z.colwise().squaredNorm();

  // exact-vs-mixture log likelihood of the transformed data given a path
  auto log_exact = [&](const Eigen::VectorXd& path) {
    return (-0.5 * n * path.array() - 0.5 * (-path.array()).exp() * w.array()).sum();
  };
  auto log_mixture = [&](const Eigen::VectorXd& path) {
    double total = 0.0;
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < n; ++i) {
        double dens = 0.0;
        for (int j = 0; j < KscMixture::kComponents; ++j) {
          const double d = ystar(i, t) - path(t) - KscMixture::mean[j] - KscMixture::kOffset;
          dens += KscMixture::weight[j] / std::sqrt(2.0 * M_PI * KscMixture::var[j]) *
                  std::exp(-0.5 * d * d / KscMixture::var[j]);
        }
        total += std::log(dens);
      }
    return total;
  };

  // two-step Gibbs pass under the mixture model: indicators given the current
  // path, then a joint path draw
  Eigen::VectorXd obs_prec = Eigen::VectorXd::Zero(T), lin = Eigen::VectorXd::Zero(T);
  double mix_w[KscMixture::kComponents];
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < KscMixture::kComponents; ++j) {
        const double d = ystar(i, t) - (*h)(t) - KscMixture::mean[j] - KscMixture::kOffset;
        mix_w[j] = KscMixture::weight[j] / std::sqrt(KscMixture::var[j]) * std::exp(-0.5 * d * d / KscMixture::var[j]);
      }
      const int s = rng.categorical(mix_w, KscMixture::kComponents);
      obs_prec(t) += 1.0 / KscMixture::var[s];
      lin(t) += (ystar(i, t) - KscMixture::mean[s] - KscMixture::kOffset) / KscMixture::var[s];
    }
  BandedPrecision K = ar1_precision(T, phi, sigma2);
  K.add_diagonal(obs_prec);
  const Eigen::VectorXd proposal = draw_gaussian_precision(rng, lin, K);

  const double log_alpha =
      (log_exact(proposal) - log_mixture(proposal)) - (log_exact(*h) - log_mixture(*h));
  if (std::log(rng.uniform()) <= std::min(0.0, log_alpha)) {
    *h = proposal;
    return true;
  }
  return false;
}

double csv_sample_kappa(RngStream& rng, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma,
                        const ConjugatePrior& prior) {
  const GigParams g = kappa_gig_params_conjugate(A, prior.A0, Sigma, prior.lag_constants(), prior.kappa_hyper);
  return draw_gig(rng, g.p, g.a, g.b);
}

CsvState CsvSampler::init_state() const {
  CsvState s;
  s.A = Eigen::MatrixXd::Zero(data_.k(), data_.n);
  s.Sigma = prior_.conj.s2.asDiagonal();
  s.h = Eigen::VectorXd::Zero(data_.T);
  s.phi = 0.95;
  s.sigma2 = 0.05;
  s.kappa = prior_.conj.estimate_kappa ? prior_.conj.kappa_hyper.shape / prior_.conj.kappa_hyper.rate
                                       : prior_.conj.kappa_fixed;
  return s;
}

void CsvSampler::sweep(RngStream& rng, CsvState& state, std::map<std::string, double>* tallies) const {
  csv_sample_A_Sigma(rng, data_, state.h, state.kappa, prior_.conj, &state.A, &state.Sigma);
  if (sample_vol_) {
    bool h_ok = csv_sample_h(rng, data_, state.A, state.Sigma, state.phi, state.sigma2, &state.h);
    if (!h_ok) {
      // rescue move for paths the Laplace proposal cannot reach back from
      h_ok = csv_refresh_h_aux(rng, data_, state.A, state.Sigma, state.phi, state.sigma2, &state.h);
    }
    bool phi_ok = false;
    state.phi = sample_ar1_phi(rng, state.h, 0.0, state.sigma2, prior_.vol.phi0, prior_.vol.V_phi, state.phi, &phi_ok);
    state.sigma2 = sample_ar1_sigma2(rng, state.h, 0.0, state.phi, prior_.vol.nu, prior_.vol.S);
    if (tallies) {
      (*tallies)["h"] += h_ok ? 1.0 : 0.0;
      (*tallies)["phi"] += phi_ok ? 1.0 : 0.0;
    }
  }
  if (prior_.conj.estimate_kappa) state.kappa = csv_sample_kappa(rng, state.A, state.Sigma, prior_.conj);
}

}  // namespace bvarml
