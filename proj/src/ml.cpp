#include "bvarml/ml.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "bvarml/ar1_steps.hpp"
#include "bvarml/special.hpp"

namespace bvarml {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kLogPi = 1.1447298858494001741;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

double csv_integrated_likelihood(const VARData& data, const Eigen::VectorXd& h, double kappa,
                                 const ConjugatePrior& prior) {
  const int T = data.T, n = data.n;
  if (h.size() != T) throw std::invalid_argument("csv_integrated_likelihood: h length mismatch");
  const Eigen::VectorXd v = prior.V_A(kappa);
  const Eigen::ArrayXd w = (-0.5 * h.array()).exp();
  const Eigen::MatrixXd Xw = data.X.array().colwise() * w;
  const Eigen::MatrixXd Yw = data.Y.array().colwise() * w;

  Eigen::MatrixXd K_A = Xw.transpose() * Xw;
  K_A.diagonal() += v.cwiseInverse();
  Eigen::LLT<Eigen::MatrixXd> K_llt(K_A);
  if (K_llt.info() != Eigen::Success) throw std::runtime_error("csv_integrated_likelihood: K_A not SPD");
  const double log_det_K = 2.0 * K_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();

  const Eigen::MatrixXd rhs = v.cwiseInverse().asDiagonal() * prior.A0 + Xw.transpose() * Yw;
  const Eigen::MatrixXd Ahat = K_llt.solve(rhs);
  // residual form of the posterior scale (no large-term cancellation)
  const Eigen::MatrixXd resid = Yw - Xw * Ahat;
  const Eigen::MatrixXd dev = Ahat - prior.A0;
  Eigen::MatrixXd Shat =
      prior.S0 + resid.transpose() * resid + dev.transpose() * (v.cwiseInverse().asDiagonal() * dev);
  Shat = 0.5 * (Shat + Shat.transpose());
  Eigen::LLT<Eigen::MatrixXd> S_llt(Shat);
  if (S_llt.info() != Eigen::Success) throw std::runtime_error("csv_integrated_likelihood: Shat not SPD");
  const double log_det_Shat = 2.0 * S_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();

  return -0.5 * T * n * kLogPi - 0.5 * n * h.sum() - 0.5 * n * v.array().log().sum() - 0.5 * n * log_det_K +
         ln_multivariate_gamma(n, 0.5 * (prior.nu0 + T)) - ln_multivariate_gamma(n, 0.5 * prior.nu0) +
         0.5 * prior.nu0 * log_det_spd(prior.S0) - 0.5 * (prior.nu0 + T) * log_det_Shat;
}

double log_ph_given_phi(const Eigen::VectorXd& h, double mu, double phi, double nu, double S) {
  if (!(std::abs(phi) < 1.0)) return kNegInf;
  const int T = static_cast<int>(h.size());
  const double Stilde = ar1_sigma2_scale(h, mu, phi, S);
  return -0.5 * T * kLog2Pi + 0.5 * std::log1p(-phi * phi) + std::lgamma(nu + 0.5 * T) - std::lgamma(nu) +
         nu * std::log(S) - (nu + 0.5 * T) * std::log(Stilde);
}

double sv_integrated_likelihood(const VARData& data, const Eigen::MatrixXd& B0, const Eigen::MatrixXd& h,
                                double kappa1, double kappa2, const EquationPrior& prior) {
  const int T = data.T, n = data.n, k = data.k();
  if (h.rows() != n || h.cols() != T) throw std::invalid_argument("sv_integrated_likelihood: h dimension mismatch");
  const int nk = n * k;

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nk, nk);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nk);
  double log_det_V = 0.0;
  std::vector<Eigen::VectorXd> v_inv(n);

  std::vector<Eigen::MatrixXd> M(n);
  std::vector<Eigen::VectorXd> XtDz(n);
  const Eigen::MatrixXd YB = data.Y * B0.transpose();
  for (int l = 0; l < n; ++l) {
    const Eigen::ArrayXd w = (-h.row(l).transpose().array()).exp();
    const Eigen::MatrixXd Xw = data.X.array().colwise() * w.sqrt();
    M[l] = Xw.transpose() * Xw;
    XtDz[l] = data.X.transpose() * (w * YB.col(l).array()).matrix();
  }
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd v = prior.V_alpha(i, kappa1, kappa2);
    log_det_V += v.array().log().sum();
    v_inv[i] = v.cwiseInverse();
    for (int j = i; j < n; ++j) {
      Eigen::MatrixXd block = Eigen::MatrixXd::Zero(k, k);
      for (int l = j; l < n; ++l) block += B0(l, i) * B0(l, j) * M[l];
      K.block(i * k, j * k, k, k) = block;
      if (j != i) K.block(j * k, i * k, k, k) = block.transpose();
    }
    K.diagonal().segment(i * k, k) += v_inv[i];
    Eigen::VectorXd r = Eigen::VectorXd::Zero(k);
    for (int l = i; l < n; ++l) r += B0(l, i) * XtDz[l];
    rhs.segment(i * k, k) = r;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sv_integrated_likelihood: K_alpha (" + std::to_string(nk) + "x" + std::to_string(nk) +
                             ") not SPD");
  const double log_det_K = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();

  // residual form of the exponent: (ytilde - Xtilde ahat)' D^{-1} (..) plus
  // the prior quadratic at ahat (prior means are zero)
  const Eigen::VectorXd ahat = llt.solve(rhs);
  Eigen::MatrixXd Ahat(k, n);
  for (int i = 0; i < n; ++i) Ahat.col(i) = ahat.segment(i * k, k);
  const Eigen::MatrixXd resid_orth = (data.Y - data.X * Ahat) * B0.transpose();
  double quad = 0.0;
  for (int l = 0; l < n; ++l) {
    const Eigen::ArrayXd w = (-h.row(l).transpose().array()).exp();
    quad += (w * resid_orth.col(l).array().square()).sum();
  }
  for (int i = 0; i < n; ++i) quad += ahat.segment(i * k, k).dot(v_inv[i].cwiseProduct(ahat.segment(i * k, k)));

  return -0.5 * n * T * kLog2Pi - 0.5 * h.sum() - 0.5 * log_det_V - 0.5 * log_det_K - 0.5 * quad;
}

double fsv_integrated_likelihood(const VARData& data, const Eigen::MatrixXd& L, const Eigen::MatrixXd& h,
                                 double kappa1, double kappa2, const EquationPrior& prior) {
  const int T = data.T, n = data.n, k = data.k();
  const int r = static_cast<int>(L.cols());
  if (h.rows() != n + r || h.cols() != T) throw std::invalid_argument("fsv_integrated_likelihood: h mismatch");
  const int nk = n * k;

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nk, nk);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nk);
  double log_det_Sy = 0.0;

  std::vector<Eigen::LLT<Eigen::MatrixXd>> block_llt(T);
  Eigen::MatrixXd St(n, n);
  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd d = h.col(t).head(n).array().exp();
    const Eigen::VectorXd g = h.col(t).tail(r).array().exp();
    St.noalias() = L * g.asDiagonal() * L.transpose();
    St.diagonal() += d;
    block_llt[t].compute(St);
    if (block_llt[t].info() != Eigen::Success)
      throw std::runtime_error("fsv_integrated_likelihood: S_y block not SPD at t = " + std::to_string(t + 1));
    log_det_Sy += 2.0 * block_llt[t].matrixL().toDenseMatrix().diagonal().array().log().sum();
    const Eigen::VectorXd Sinv_y = block_llt[t].solve(data.Y.row(t).transpose());
    const Eigen::MatrixXd Sinv = block_llt[t].solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::VectorXd xt = data.X.row(t).transpose();
    const Eigen::MatrixXd xxt = xt * xt.transpose();
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) K.block(i * k, j * k, k, k) += Sinv(i, j) * xxt;
      rhs.segment(i * k, k) += Sinv_y(i) * xt;
    }
  }
  double log_det_V = 0.0;
  std::vector<Eigen::VectorXd> v_inv(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd v = prior.V_alpha(i, kappa1, kappa2);
    log_det_V += v.array().log().sum();
    v_inv[i] = v.cwiseInverse();
    K.diagonal().segment(i * k, k) += v_inv[i];
    for (int j = 0; j < i; ++j) K.block(i * k, j * k, k, k) = K.block(j * k, i * k, k, k).transpose();
  }

  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("fsv_integrated_likelihood: K_alpha (" + std::to_string(nk) + "x" + std::to_string(nk) +
                             ") not SPD");
  const double log_det_K = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();

  // residual form of the exponent
  const Eigen::VectorXd ahat = llt.solve(rhs);
  Eigen::MatrixXd Ahat(k, n);
  for (int i = 0; i < n; ++i) Ahat.col(i) = ahat.segment(i * k, k);
  const Eigen::MatrixXd resid = data.Y - data.X * Ahat;
  double quad = 0.0;
  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd z = block_llt[t].matrixL().solve(resid.row(t).transpose());
    quad += z.squaredNorm();
  }
  for (int i = 0; i < n; ++i) quad += ahat.segment(i * k, k).dot(v_inv[i].cwiseProduct(ahat.segment(i * k, k)));

  return -0.5 * T * n * kLog2Pi - 0.5 * log_det_Sy - 0.5 * log_det_V - 0.5 * log_det_K - 0.5 * quad;
}

double homoskedastic_var_log_ml(const VARData& data, const ConjugatePrior& prior, double kappa) {
  return csv_integrated_likelihood(data, Eigen::VectorXd::Zero(data.T), kappa, prior);
}

MLEstimate is_estimate(RngStream& rng, long long R, const std::function<double(RngStream&)>& draw_log_weight,
                       int threads) {
  if (R < 2) throw std::invalid_argument("is_estimate: need R >= 2");
  threads = std::max(1, threads);
  std::vector<double> logw(static_cast<std::size_t>(R));

  // Advance the parent stream so repeated calls draw fresh samples; worker
  // streams derive deterministically from the nonce.
  const RngStream base(rng.seed(), rng.next_u64());
  if (threads == 1) {
    RngStream worker = base.substream(0);
    for (long long i = 0; i < R; ++i) logw[static_cast<std::size_t>(i)] = draw_log_weight(worker);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
      const long long lo = R * w / threads, hi = R * (w + 1) / threads;
      pool.emplace_back([&, w, lo, hi]() {
        RngStream worker = base.substream(static_cast<std::uint64_t>(w));
        for (long long i = lo; i < hi; ++i) logw[static_cast<std::size_t>(i)] = draw_log_weight(worker);
      });
    }
    for (auto& th : pool) th.join();
  }

  double max = kNegInf;
  for (double v : logw) max = std::max(max, v);
  if (!std::isfinite(max)) throw std::runtime_error("is_estimate: every importance weight vanished");
  double sum = 0.0, sum_sq = 0.0;
  for (double v : logw) {
    const double e = std::exp(v - max);
    sum += e;
    sum_sq += e * e;
  }
  const double mean = sum / R;
  const double var = std::max(0.0, sum_sq / R - mean * mean) * R / std::max(1.0, R - 1.0);

  MLEstimate out;
  out.R = R;
  out.log_ml = max + std::log(mean);
  out.nse = std::sqrt(var / R) / mean;
  out.ess = sum * sum / sum_sq;
  return out;
}

namespace {

double log_phi_prior(double phi, const VolPrior& vol) {
  return log_truncated_normal_pdf(phi, vol.phi0, vol.V_phi, -1.0, 1.0);
}

// Representability window for sampled log-volatility paths: exp(|h|) must
// stay inside double range when squared inside Gram matrices. The fitted
// family would need a ~90-sigma excursion to reach the edge.
bool h_in_range(const Eigen::Ref<const Eigen::MatrixXd>& h) { return h.cwiseAbs().maxCoeff() < 300.0; }

double csv_draw_log_weight(RngStream& rng, const VARData& data, const PriorBundle& priors, const ISFamily& fam) {
  const ConjugatePrior& conj = priors.csv.conj;
  const VolPrior& vol = priors.csv.vol;
  const Eigen::VectorXd h = fam.h_blocks[0].sample(rng);
  const double phi = fam.phi_blocks[0].sample(rng);
  double kappa = conj.kappa_fixed;
  double log_w = -fam.h_blocks[0].log_pdf(h) - fam.phi_blocks[0].log_pdf(phi);
  if (!fam.kappa_blocks.empty()) {
    kappa = fam.kappa_blocks[0].sample(rng);
    log_w += -fam.kappa_blocks[0].log_pdf(kappa) + log_gamma_pdf(kappa, conj.kappa_hyper.shape, conj.kappa_hyper.rate);
  }
  if (!(std::abs(phi) < 1.0)) return kNegInf;
  if (!h_in_range(h)) return kNegInf;
  log_w += csv_integrated_likelihood(data, h, kappa, conj);
  log_w += log_ph_given_phi(h, 0.0, phi, vol.nu, vol.S);
  log_w += log_phi_prior(phi, vol);
  return log_w;
}

double sv_draw_log_weight(RngStream& rng, const VARData& data, const PriorBundle& priors, const ISFamily& fam) {
  const EquationPrior& eq = priors.eq;
  const int n = data.n;
  const int T = data.T;

  Eigen::MatrixXd h(n, T);
  Eigen::VectorXd mu(n), phi(n);
  std::vector<Eigen::VectorXd> beta(n);
  double log_w = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd hi = fam.h_blocks[i].sample(rng);
    h.row(i) = hi.transpose();
    mu(i) = fam.mu_blocks[i].sample(rng);
    phi(i) = fam.phi_blocks[i].sample(rng);
    beta[i] = fam.row_blocks[i].sample(rng);
    log_w -= fam.h_blocks[i].log_pdf(hi) + fam.mu_blocks[i].log_pdf(mu(i)) + fam.phi_blocks[i].log_pdf(phi(i)) +
             fam.row_blocks[i].log_pdf(beta[i]);
  }

  double kappa1 = eq.kappa1_fixed, kappa2 = eq.kappa2_fixed, kappa3 = eq.kappa3_fixed;
  if (!fam.kappa_blocks.empty()) {
    if (eq.mode == PriorMode::symmetric) {
      kappa1 = kappa2 = fam.kappa_blocks[0].sample(rng);
      kappa3 = fam.kappa_blocks[1].sample(rng);
      log_w += -fam.kappa_blocks[0].log_pdf(kappa1) + log_gamma_pdf(kappa1, eq.k1_hyper.shape, eq.k1_hyper.rate);
      log_w += -fam.kappa_blocks[1].log_pdf(kappa3) + log_gamma_pdf(kappa3, eq.k3_hyper.shape, eq.k3_hyper.rate);
    } else {
      kappa1 = fam.kappa_blocks[0].sample(rng);
      kappa2 = fam.kappa_blocks[1].sample(rng);
      kappa3 = fam.kappa_blocks[2].sample(rng);
      log_w += -fam.kappa_blocks[0].log_pdf(kappa1) + log_gamma_pdf(kappa1, eq.k1_hyper.shape, eq.k1_hyper.rate);
      log_w += -fam.kappa_blocks[1].log_pdf(kappa2) + log_gamma_pdf(kappa2, eq.k2_hyper.shape, eq.k2_hyper.rate);
      log_w += -fam.kappa_blocks[2].log_pdf(kappa3) + log_gamma_pdf(kappa3, eq.k3_hyper.shape, eq.k3_hyper.rate);
    }
  }

  for (int i = 0; i < n; ++i)
    if (!(std::abs(phi(i)) < 1.0)) return kNegInf;
  if (!h_in_range(h)) return kNegInf;

  Eigen::MatrixXd B0 = Eigen::MatrixXd::Identity(n, n);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) B0(i, j) = beta[i](j);

  log_w += sv_integrated_likelihood(data, B0, h, kappa1, kappa2, eq);
  for (int i = 0; i < n; ++i) {
    log_w += log_ph_given_phi(h.row(i).transpose(), mu(i), phi(i), eq.vol.nu, eq.vol.S);
    log_w += log_normal_pdf(mu(i), eq.vol.mu0, eq.vol.V_mu);
    log_w += log_phi_prior(phi(i), eq.vol);
    const Eigen::VectorXd vb = eq.V_beta(i, kappa3);
    for (int j = 0; j < i; ++j) log_w += log_normal_pdf(beta[i](j), 0.0, vb(j));
  }
  return log_w;
}

double fsv_draw_log_weight(RngStream& rng, const VARData& data, const PriorBundle& priors, const ISFamily& fam,
                           int r) {
  const EquationPrior& eq = priors.eq;
  const int n = data.n;
  const int T = data.T;
  const int nr = n + r;

  Eigen::MatrixXd h(nr, T);
  Eigen::VectorXd mu(nr), phi(nr);
  double log_w = 0.0;
  for (int i = 0; i < nr; ++i) {
    const Eigen::VectorXd hi = fam.h_blocks[i].sample(rng);
    h.row(i) = hi.transpose();
    mu(i) = fam.mu_blocks[i].sample(rng);
    phi(i) = fam.phi_blocks[i].sample(rng);
    log_w -= fam.h_blocks[i].log_pdf(hi) + fam.mu_blocks[i].log_pdf(mu(i)) + fam.phi_blocks[i].log_pdf(phi(i));
  }
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, r);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd li = fam.row_blocks[i].sample(rng);
    log_w -= fam.row_blocks[i].log_pdf(li);
    for (int j = 0; j < li.size(); ++j) {
      L(i, j) = li(j);
      log_w += log_normal_pdf(li(j), 0.0, eq.loading_var);
    }
    if (i < r) L(i, i) = 1.0;
  }

  double kappa1 = eq.kappa1_fixed, kappa2 = eq.kappa2_fixed;
  if (!fam.kappa_blocks.empty()) {
    if (eq.mode == PriorMode::symmetric) {
      kappa1 = kappa2 = fam.kappa_blocks[0].sample(rng);
      log_w += -fam.kappa_blocks[0].log_pdf(kappa1) + log_gamma_pdf(kappa1, eq.k1_hyper.shape, eq.k1_hyper.rate);
    } else {
      kappa1 = fam.kappa_blocks[0].sample(rng);
      kappa2 = fam.kappa_blocks[1].sample(rng);
      log_w += -fam.kappa_blocks[0].log_pdf(kappa1) + log_gamma_pdf(kappa1, eq.k1_hyper.shape, eq.k1_hyper.rate);
      log_w += -fam.kappa_blocks[1].log_pdf(kappa2) + log_gamma_pdf(kappa2, eq.k2_hyper.shape, eq.k2_hyper.rate);
    }
  }

  for (int i = 0; i < nr; ++i)
    if (!(std::abs(phi(i)) < 1.0)) return kNegInf;
  if (!h_in_range(h)) return kNegInf;

  log_w += fsv_integrated_likelihood(data, L, h, kappa1, kappa2, eq);
  for (int i = 0; i < nr; ++i) {
    log_w += log_ph_given_phi(h.row(i).transpose(), mu(i), phi(i), eq.vol.nu, eq.vol.S);
    log_w += log_normal_pdf(mu(i), eq.vol.mu0, eq.vol.V_mu);
    log_w += log_phi_prior(phi(i), eq.vol);
  }
  return log_w;
}

}  // namespace

MLEstimate is_log_ml(ModelTag model, const VARData& data, const PriorBundle& priors, const ISFamily& family,
                     long long R, RngStream& rng, int threads) {
  if (family.model != model) throw std::invalid_argument("is_log_ml: family fitted for a different model");
  switch (model) {
    case ModelTag::var: {
      MLEstimate out;
      out.log_ml = homoskedastic_var_log_ml(data, priors.csv.conj, priors.csv.conj.kappa_fixed);
      out.nse = 0.0;
      out.R = 0;
      out.ess = 0.0;
      return out;
    }
    case ModelTag::csv:
      return is_estimate(
          rng, R, [&](RngStream& r) { return csv_draw_log_weight(r, data, priors, family); }, threads);
    case ModelTag::sv:
      return is_estimate(
          rng, R, [&](RngStream& r) { return sv_draw_log_weight(r, data, priors, family); }, threads);
    case ModelTag::fsv: {
      const int r_factors = static_cast<int>(family.h_blocks.size()) - data.n;
      return is_estimate(
          rng, R, [&](RngStream& r) { return fsv_draw_log_weight(r, data, priors, family, r_factors); }, threads);
    }
  }
  throw std::logic_error("is_log_ml: unreachable");
}

}  // namespace bvarml
