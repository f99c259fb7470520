#include "bvarml/dgp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "bvarml/draws.hpp"

namespace bvarml {

double companion_spectral_radius(const Eigen::MatrixXd& A, int n, int p) {
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n * p, n * p);
  for (int l = 0; l < p; ++l) companion.block(0, l * n, n, n) = A.middleRows(1 + l * n, n).transpose();
  if (p > 1) companion.block(n, 0, n * (p - 1), n * (p - 1)).setIdentity();
  return companion.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

Eigen::MatrixXd draw_var_coefficients(RngStream& rng, const DgpConfig& cfg, int* redraws) {
  const int n = cfg.n, p = cfg.p;
  Eigen::MatrixXd A(1 + n * p, n);
  for (int attempt = 0;; ++attempt) {
    if (attempt > cfg.max_redraws)
      throw std::runtime_error("simulate_dgp: no stable coefficient draw after " + std::to_string(cfg.max_redraws) +
                               " attempts");
    for (int i = 0; i < n; ++i) A(0, i) = rng.uniform(-10.0, 10.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        A(1 + j, i) = i == j ? rng.uniform(-0.2, 0.4) : rng.uniform(-0.2, 0.2);
    for (int l = 2; l <= p; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(1 + (l - 1) * n + j, i) = rng.normal(0.0, 0.05 * 0.05);
    if (companion_spectral_radius(A, n, p) < cfg.stability_limit) {
      if (redraws) *redraws = attempt;
      return A;
    }
  }
}

Eigen::MatrixXd draw_dgp_sigma(RngStream& rng, const DgpConfig& cfg) {
  const int n = cfg.n;
  Eigen::MatrixXd scale = 0.7 * Eigen::MatrixXd::Identity(n, n) + 0.3 * Eigen::MatrixXd::Ones(n, n);
  if (cfg.model == ModelTag::csv || cfg.model == ModelTag::var) scale *= cfg.noise_scale;
  return draw_inverse_wishart(rng, n + 5.0, scale);
}

Eigen::VectorXd simulate_ar1_path(RngStream& rng, int T, double mu, double phi, double sigma2) {
  Eigen::VectorXd h(T);
  h(0) = mu + rng.normal() * std::sqrt(sigma2 / (1.0 - phi * phi));
  for (int t = 1; t < T; ++t) h(t) = mu + phi * (h(t - 1) - mu) + rng.normal() * std::sqrt(sigma2);
  return h;
}

// Unconditional mean of a stable VAR; used as the starting point.
Eigen::VectorXd var_mean(const Eigen::MatrixXd& A, int n, int p) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
  for (int l = 0; l < p; ++l) sum -= A.middleRows(1 + l * n, n).transpose();
  return sum.fullPivLu().solve(A.row(0).transpose());
}

Eigen::VectorXd var_conditional_mean(const Eigen::MatrixXd& A, const Eigen::MatrixXd& recent, int n, int p) {
  // recent holds the p most recent rows, most recent last.
  Eigen::VectorXd m = A.row(0).transpose();
  for (int l = 1; l <= p; ++l)
    m += A.middleRows(1 + (l - 1) * n, n).transpose() * recent.row(p - l).transpose();
  return m;
}

void push_row(Eigen::MatrixXd& recent, const Eigen::VectorXd& row) {
  const int p = static_cast<int>(recent.rows());
  for (int l = 0; l + 1 < p; ++l) recent.row(l) = recent.row(l + 1);
  recent.row(p - 1) = row.transpose();
}

}  // namespace

Eigen::MatrixXd simulate_given_state(RngStream& rng, const CsvState& state, const Eigen::MatrixXd& init, int T,
                                     bool heteroskedastic) {
  const int n = static_cast<int>(state.A.cols());
  const int p = static_cast<int>((state.A.rows() - 1) / n);
  Eigen::LLT<Eigen::MatrixXd> llt(state.Sigma);
  if (llt.info() != Eigen::Success) throw std::runtime_error("simulate_given_state: Sigma not SPD");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd recent = init.bottomRows(p);
  Eigen::MatrixXd Y(T, n);
  Eigen::VectorXd z(n);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    Eigen::VectorXd y = var_conditional_mean(state.A, recent, n, p) +
                        (heteroskedastic ? std::exp(0.5 * state.h(t)) : 1.0) * (L * z);
    Y.row(t) = y.transpose();
    push_row(recent, y);
  }
  return Y;
}

Eigen::MatrixXd simulate_given_state(RngStream& rng, const SvState& state, const Eigen::MatrixXd& init, int T) {
  const int n = static_cast<int>(state.alpha.cols());
  const int p = static_cast<int>((state.alpha.rows() - 1) / n);
  const Eigen::MatrixXd B0 = state.impact_matrix();
  Eigen::MatrixXd recent = init.bottomRows(p);
  Eigen::MatrixXd Y(T, n);
  Eigen::VectorXd eta(n);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) eta(i) = std::exp(0.5 * state.h(i, t)) * rng.normal();
    const Eigen::VectorXd eps = B0.triangularView<Eigen::Lower>().solve(eta);
    Eigen::VectorXd y = var_conditional_mean(state.alpha, recent, n, p) + eps;
    Y.row(t) = y.transpose();
    push_row(recent, y);
  }
  return Y;
}

Eigen::MatrixXd simulate_given_state(RngStream& rng, const FsvState& state, const Eigen::MatrixXd& init, int T) {
  const int n = static_cast<int>(state.alpha.cols());
  const int p = static_cast<int>((state.alpha.rows() - 1) / n);
  const Eigen::MatrixXd L = state.loading_matrix();
  Eigen::MatrixXd recent = init.bottomRows(p);
  Eigen::MatrixXd Y(T, n);
  Eigen::VectorXd u(n);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) u(i) = std::exp(0.5 * state.h(i, t)) * rng.normal();
    Eigen::VectorXd y = var_conditional_mean(state.alpha, recent, n, p) + L * state.f.col(t) + u;
    Y.row(t) = y.transpose();
    push_row(recent, y);
  }
  return Y;
}

DgpDraw simulate_dgp(RngStream& rng, const DgpConfig& cfg) {
  const int n = cfg.n, T = cfg.T, p = cfg.p;
  if (T <= p) throw std::invalid_argument("simulate_dgp: T must exceed p");
  DgpDraw out;
  const Eigen::MatrixXd A = draw_var_coefficients(rng, cfg, &out.coefficient_redraws);
  const double mu_var = cfg.noise_scale > 1.0 ? 1.3 : cfg.mu;

  // Warm-up from the unconditional mean so the kept sample is close to stationary.
  const int warmup = 50;
  const int total = T + warmup;
  Eigen::MatrixXd init(p, n);
  init.rowwise() = var_mean(A, n, p).transpose();

  Eigen::MatrixXd values;
  switch (cfg.model) {
    case ModelTag::var:
    case ModelTag::csv: {
      CsvState s;
      s.A = A;
      s.Sigma = draw_dgp_sigma(rng, cfg);
      s.phi = cfg.phi;
      s.sigma2 = cfg.sigma2;
      s.kappa = 1.0;
      s.h = cfg.model == ModelTag::var ? Eigen::VectorXd::Zero(total)
                                       : simulate_ar1_path(rng, total, 0.0, cfg.phi, cfg.sigma2);
      values = simulate_given_state(rng, s, init, total, cfg.model == ModelTag::csv);
      s.h = s.h.tail(T).eval();
      out.truth = std::move(s);
      break;
    }
    case ModelTag::sv: {
      SvState s;
      s.alpha = A;
      s.beta.resize(n);
      for (int i = 0; i < n; ++i) {
        s.beta[i].resize(i);
        for (int j = 0; j < i; ++j) s.beta[i](j) = rng.normal(0.0, 0.5 * 0.5);
      }
      s.h.resize(n, total);
      for (int i = 0; i < n; ++i)
        s.h.row(i) = simulate_ar1_path(rng, total, mu_var, cfg.phi, cfg.sigma2).transpose();
      s.mu = Eigen::VectorXd::Constant(n, mu_var);
      s.phi = Eigen::VectorXd::Constant(n, cfg.phi);
      s.sigma2 = Eigen::VectorXd::Constant(n, cfg.sigma2);
      s.kappa1 = s.kappa2 = s.kappa3 = 1.0;
      values = simulate_given_state(rng, s, init, total);
      s.h = s.h.rightCols(T).eval();
      out.truth = std::move(s);
      break;
    }
    case ModelTag::fsv: {
      const int r = cfg.r;
      FsvState s;
      s.alpha = A;
      s.loadings.resize(n);
      for (int i = 0; i < n; ++i) {
        const int len = std::min(i, r);
        s.loadings[i].resize(len);
        for (int j = 0; j < len; ++j) s.loadings[i](j) = rng.normal(0.0, 0.5 * 0.5);
      }
      s.h.resize(n + r, total);
      for (int i = 0; i < n; ++i)
        s.h.row(i) = simulate_ar1_path(rng, total, mu_var, cfg.phi, cfg.sigma2).transpose();
      for (int j = 0; j < r; ++j)
        s.h.row(n + j) = simulate_ar1_path(rng, total, cfg.mu_factor, cfg.phi, cfg.sigma2).transpose();
      s.f.resize(r, total);
      for (int j = 0; j < r; ++j)
        for (int t = 0; t < total; ++t) s.f(j, t) = std::exp(0.5 * s.h(n + j, t)) * rng.normal();
      s.mu.resize(n + r);
      s.mu.head(n).setConstant(mu_var);
      s.mu.tail(r).setConstant(cfg.mu_factor);
      s.phi = Eigen::VectorXd::Constant(n + r, cfg.phi);
      s.sigma2 = Eigen::VectorXd::Constant(n + r, cfg.sigma2);
      s.kappa1 = s.kappa2 = 1.0;
      values = simulate_given_state(rng, s, init, total);
      s.h = s.h.rightCols(T).eval();
      s.f = s.f.rightCols(T).eval();
      out.truth = std::move(s);
      break;
    }
  }

  out.panel.values = values.bottomRows(T);
  out.panel.names.resize(n);
  out.panel.transform_codes.assign(n, TransformCode::none);
  for (int i = 0; i < n; ++i) out.panel.names[i] = "v" + std::to_string(i + 1);
  return out;
}

CsvState draw_csv_state_from_prior(RngStream& rng, const CsvPrior& prior, int T) {
  CsvState s;
  const ConjugatePrior& conj = prior.conj;
  s.kappa = conj.estimate_kappa ? rng.gamma(conj.kappa_hyper.shape, conj.kappa_hyper.rate) : conj.kappa_fixed;
  s.Sigma = draw_inverse_wishart(rng, conj.nu0, conj.S0);
  const Eigen::VectorXd v = conj.V_A(s.kappa);
  Eigen::MatrixXd Kprior = v.cwiseInverse().asDiagonal();
  s.A = draw_matrix_normal_prec(rng, conj.A0, s.Sigma, Eigen::LLT<Eigen::MatrixXd>(Kprior));
  s.phi = draw_truncated_normal(rng, prior.vol.phi0, prior.vol.V_phi, -1.0, 1.0);
  s.sigma2 = rng.inverse_gamma(prior.vol.nu, prior.vol.S);
  s.h = simulate_ar1_path(rng, T, 0.0, s.phi, s.sigma2);
  return s;
}

SvState draw_sv_state_from_prior(RngStream& rng, const EquationPrior& prior, int n, int T) {
  SvState s;
  if (prior.estimate_kappas && prior.mode != PriorMode::subjective) {
    s.kappa1 = rng.gamma(prior.k1_hyper.shape, prior.k1_hyper.rate);
    s.kappa2 = prior.mode == PriorMode::symmetric ? s.kappa1 : rng.gamma(prior.k2_hyper.shape, prior.k2_hyper.rate);
  } else {
    s.kappa1 = prior.kappa1_fixed;
    s.kappa2 = prior.kappa2_fixed;
  }
  s.kappa3 = prior.estimate_kappas ? rng.gamma(prior.k3_hyper.shape, prior.k3_hyper.rate) : prior.kappa3_fixed;
  const int k = prior.k();
  s.alpha.resize(k, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd v = prior.V_alpha(i, s.kappa1, s.kappa2);
    for (int j = 0; j < k; ++j) s.alpha(j, i) = rng.normal(0.0, v(j));
  }
  s.beta.resize(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd v = prior.V_beta(i, s.kappa3);
    s.beta[i].resize(i);
    for (int j = 0; j < i; ++j) s.beta[i](j) = rng.normal(0.0, v(j));
  }
  s.mu.resize(n);
  s.phi.resize(n);
  s.sigma2.resize(n);
  s.h.resize(n, T);
  for (int i = 0; i < n; ++i) {
    s.mu(i) = rng.normal(prior.vol.mu0, prior.vol.V_mu);
    s.phi(i) = draw_truncated_normal(rng, prior.vol.phi0, prior.vol.V_phi, -1.0, 1.0);
    s.sigma2(i) = rng.inverse_gamma(prior.vol.nu, prior.vol.S);
    s.h.row(i) = simulate_ar1_path(rng, T, s.mu(i), s.phi(i), s.sigma2(i)).transpose();
  }
  return s;
}

FsvState draw_fsv_state_from_prior(RngStream& rng, const EquationPrior& prior, int n, int r, int T) {
  FsvState s;
  if (prior.estimate_kappas && prior.mode != PriorMode::subjective) {
    s.kappa1 = rng.gamma(prior.k1_hyper.shape, prior.k1_hyper.rate);
    s.kappa2 = prior.mode == PriorMode::symmetric ? s.kappa1 : rng.gamma(prior.k2_hyper.shape, prior.k2_hyper.rate);
  } else {
    s.kappa1 = prior.kappa1_fixed;
    s.kappa2 = prior.kappa2_fixed;
  }
  const int k = prior.k();
  s.alpha.resize(k, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd v = prior.V_alpha(i, s.kappa1, s.kappa2);
    for (int j = 0; j < k; ++j) s.alpha(j, i) = rng.normal(0.0, v(j));
  }
  s.loadings.resize(n);
  for (int i = 0; i < n; ++i) {
    const int len = std::min(i, r);
    s.loadings[i].resize(len);
    for (int j = 0; j < len; ++j) s.loadings[i](j) = rng.normal(0.0, prior.loading_var);
  }
  s.mu.resize(n + r);
  s.phi.resize(n + r);
  s.sigma2.resize(n + r);
  s.h.resize(n + r, T);
  for (int i = 0; i < n + r; ++i) {
    s.mu(i) = rng.normal(prior.vol.mu0, prior.vol.V_mu);
    s.phi(i) = draw_truncated_normal(rng, prior.vol.phi0, prior.vol.V_phi, -1.0, 1.0);
    s.sigma2(i) = rng.inverse_gamma(prior.vol.nu, prior.vol.S);
    s.h.row(i) = simulate_ar1_path(rng, T, s.mu(i), s.phi(i), s.sigma2(i)).transpose();
  }
  s.f.resize(r, T);
  for (int j = 0; j < r; ++j)
    for (int t = 0; t < T; ++t) s.f(j, t) = std::exp(0.5 * s.h(n + j, t)) * rng.normal();
  return s;
}

}  // namespace bvarml
