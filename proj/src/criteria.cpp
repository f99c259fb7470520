#include "bvarml/criteria.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "bvarml/banded.hpp"
#include "bvarml/special.hpp"

namespace bvarml {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

bool TruncatedGaussianTuning::contains(const Eigen::VectorXd& x) const {
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  const Eigen::VectorXd z = llt.matrixL().solve(x - mean);
  return z.squaredNorm() < chi2_cut;
}

double TruncatedGaussianTuning::log_pdf(const Eigen::VectorXd& x) const {
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  const Eigen::VectorXd z = llt.matrixL().solve(x - mean);
  const double maha = z.squaredNorm();
  if (maha >= chi2_cut) return kNegInf;
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (dim() * kLog2Pi + log_det + maha) - log_trunc_mass;
}

TruncatedGaussianTuning build_truncated_gaussian(const Eigen::MatrixXd& draws, double alpha) {
  const int M = static_cast<int>(draws.rows());
  const int m = static_cast<int>(draws.cols());
  if (M <= m) throw std::invalid_argument("build_truncated_gaussian: need more draws than dimensions");
  TruncatedGaussianTuning t;
  t.mean = draws.colwise().mean();
  const Eigen::MatrixXd centered = draws.rowwise() - t.mean.transpose();
  t.Q = centered.transpose() * centered / M;
  Eigen::LLT<Eigen::MatrixXd> llt(t.Q);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "build_truncated_gaussian: singular sample covariance; reduce the block or add draws");
  t.chi2_cut = chi2_quantile(alpha, m);
  t.log_trunc_mass = std::log1p(-alpha);
  return t;
}

MLEstimate gd_log_ml(const std::vector<Eigen::VectorXd>& psi_draws,
                     const std::function<double(const Eigen::VectorXd&)>& log_f,
                     const std::function<double(const Eigen::VectorXd&)>& log_g,
                     const std::function<double(const Eigen::VectorXd&)>& log_prior, int threads) {
  const long long R = static_cast<long long>(psi_draws.size());
  if (R < 2) throw std::invalid_argument("gd_log_ml: need at least 2 posterior draws");
  std::vector<double> logv(psi_draws.size(), kNegInf);

  auto worker = [&](long long lo, long long hi) {
    for (long long i = lo; i < hi; ++i) {
      const Eigen::VectorXd& psi = psi_draws[static_cast<std::size_t>(i)];
      const double lf = log_f(psi);
      if (!std::isfinite(lf)) continue;  // outside the tuning support
      logv[static_cast<std::size_t>(i)] = lf - log_prior(psi) - log_g(psi);
    }
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    worker(0, R);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, R * w / threads, R * (w + 1) / threads);
    for (auto& th : pool) th.join();
  }

  double max = kNegInf;
  for (double v : logv) max = std::max(max, v);
  if (!std::isfinite(max)) throw std::runtime_error("gd_log_ml: no posterior draw fell inside the tuning support");
  double sum = 0.0, sum_sq = 0.0;
  for (double v : logv) {
    const double e = std::exp(v - max);
    sum += e;
    sum_sq += e * e;
  }
  const double mean = sum / R;
  const double var = std::max(0.0, sum_sq / R - mean * mean) * R / std::max(1.0, R - 1.0);

  MLEstimate out;
  out.R = R;
  out.log_ml = -(max + std::log(mean));
  out.nse = std::sqrt(var / R) / mean;
  out.ess = sum * sum / sum_sq;
  return out;
}

MLEstimate csv_gd_log_ml(const ChainOutput& chain, const VARData& data, const PriorBundle& priors, bool use_h_family,
                         double alpha, int threads) {
  if (chain.model != ModelTag::csv) throw std::invalid_argument("csv_gd_log_ml: expected a CSV chain");
  const auto& draws = chain.csv_draws();
  const int T = data.T;
  const bool include_kappa = priors.csv.conj.estimate_kappa;
  const int extra = include_kappa ? 2 : 1;

  std::vector<Eigen::VectorXd> psi(draws.size());
  for (std::size_t m = 0; m < draws.size(); ++m) {
    Eigen::VectorXd v(T + extra);
    v.head(T) = draws[m].h;
    v(T) = draws[m].phi;
    if (include_kappa) v(T + 1) = draws[m].kappa;
    psi[m] = std::move(v);
  }
  const VolPrior& vol = priors.csv.vol;
  const ConjugatePrior& conj = priors.csv.conj;
  auto log_g = [&](const Eigen::VectorXd& v) {
    return csv_integrated_likelihood(data, v.head(T), include_kappa ? v(T + 1) : conj.kappa_fixed, conj);
  };
  auto log_prior = [&](const Eigen::VectorXd& v) {
    double lp = log_ph_given_phi(v.head(T), 0.0, v(T), vol.nu, vol.S) +
                log_truncated_normal_pdf(v(T), vol.phi0, vol.V_phi, -1.0, 1.0);
    if (include_kappa) lp += log_gamma_pdf(v(T + 1), conj.kappa_hyper.shape, conj.kappa_hyper.rate);
    return lp;
  };

  if (!use_h_family) {
    Eigen::MatrixXd stack(static_cast<Eigen::Index>(psi.size()), T + extra);
    for (std::size_t m = 0; m < psi.size(); ++m) stack.row(static_cast<Eigen::Index>(m)) = psi[m].transpose();
    const TruncatedGaussianTuning tune = build_truncated_gaussian(stack, alpha);
    return gd_log_ml(
        psi, [&](const Eigen::VectorXd& v) { return tune.log_pdf(v); }, log_g, log_prior, threads);
  }
  Eigen::MatrixXd h_stack(static_cast<Eigen::Index>(psi.size()), T);
  Eigen::MatrixXd rest(static_cast<Eigen::Index>(psi.size()), extra);
  for (std::size_t m = 0; m < psi.size(); ++m) {
    h_stack.row(static_cast<Eigen::Index>(m)) = psi[m].head(T).transpose();
    rest.row(static_cast<Eigen::Index>(m)) = psi[m].tail(extra).transpose();
  }
  const Ar1GaussianFamily fh = fit_ar1_family(h_stack);
  const TruncatedGaussianTuning tune = build_truncated_gaussian(rest, alpha);
  auto log_f = [&](const Eigen::VectorXd& v) {
    const double tail = tune.log_pdf(v.tail(extra));
    return std::isfinite(tail) ? fh.log_pdf(v.head(T)) + tail : tail;
  };
  return gd_log_ml(psi, log_f, log_g, log_prior, threads);
}

ObservedLoglik fsv_observed_loglik(const VARData& data, const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& L,
                                   const Eigen::VectorXd& mu, const Eigen::VectorXd& phi,
                                   const Eigen::VectorXd& sigma2, const std::vector<Ar1GaussianFamily>& h_family,
                                   long long R, RngStream& rng) {
  const int T = data.T, n = data.n;
  const int r = static_cast<int>(L.cols());
  if (static_cast<int>(h_family.size()) != n + r)
    throw std::invalid_argument("fsv_observed_loglik: need one h family per volatility series");
  const Eigen::MatrixXd eps = data.Y - data.X * alpha;

  std::vector<double> logw(static_cast<std::size_t>(R));
  Eigen::MatrixXd h(n + r, T);
  Eigen::MatrixXd St(n, n);
  for (long long rep = 0; rep < R; ++rep) {
    double lw = 0.0;
    for (int j = 0; j < n + r; ++j) {
      const Eigen::VectorXd hj = h_family[j].sample(rng);
      h.row(j) = hj.transpose();
      lw += log_ar1_path_pdf(hj, mu(j), phi(j), sigma2(j)) - h_family[j].log_pdf(hj);
    }
    for (int t = 0; t < T; ++t) {
      const Eigen::VectorXd d = h.col(t).head(n).array().exp();
      const Eigen::VectorXd g = h.col(t).tail(r).array().exp();
      St.noalias() = L * g.asDiagonal() * L.transpose();
      St.diagonal() += d;
      Eigen::LLT<Eigen::MatrixXd> llt(St);
      if (llt.info() != Eigen::Success) {
        lw = kNegInf;
        break;
      }
      const Eigen::VectorXd z = llt.matrixL().solve(eps.row(t).transpose());
      lw += -0.5 * n * kLog2Pi - llt.matrixL().toDenseMatrix().diagonal().array().log().sum() - 0.5 * z.squaredNorm();
    }
    logw[static_cast<std::size_t>(rep)] = lw;
  }

  double max = kNegInf;
  for (double v : logw) max = std::max(max, v);
  ObservedLoglik out;
  if (!std::isfinite(max)) {
    out.value = kNegInf;
    out.low_ess = true;
    return out;
  }
  double sum = 0.0, sum_sq = 0.0;
  for (double v : logw) {
    const double e = std::exp(v - max);
    sum += e;
    sum_sq += e * e;
  }
  out.value = max + std::log(sum / R);
  out.ess = sum * sum / sum_sq;
  out.low_ess = out.ess < 10.0;
  return out;
}

DicResult compute_dic(const std::vector<Eigen::VectorXd>& draws,
                      const std::function<double(const Eigen::VectorXd&)>& loglik, int threads) {
  const std::size_t M = draws.size();
  if (M < 100) throw std::invalid_argument("compute_dic: need at least 100 kept draws");

  std::vector<double> values(M);
  std::atomic<long long> failures{0};
  auto worker = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double v;
      try {
        v = loglik(draws[i]);
      } catch (const std::exception&) {
        v = std::numeric_limits<double>::quiet_NaN();
      }
      if (!std::isfinite(v)) ++failures;
      values[i] = v;
    }
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    worker(0, M);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, M * w / threads, M * (w + 1) / threads);
    for (auto& th : pool) th.join();
  }
  if (failures * 100 > static_cast<long long>(M))
    throw std::runtime_error("compute_dic: evaluator failed on more than 1% of draws");

  double sum = 0.0;
  long long count = 0;
  for (double v : values)
    if (std::isfinite(v)) {
      sum += v;
      ++count;
    }
  Eigen::VectorXd mean_theta = Eigen::VectorXd::Zero(draws[0].size());
  for (const auto& d : draws) mean_theta += d;
  mean_theta /= static_cast<double>(M);

  DicResult out;
  out.mean_deviance = -2.0 * sum / count;
  out.deviance_at_point = -2.0 * loglik(mean_theta);
  out.pd = out.mean_deviance - out.deviance_at_point;
  out.dic = out.mean_deviance + out.pd;
  return out;
}

namespace {

// IS estimate of sum_t log N(eps_t; 0, e^{h_t} Sigma) integrated over the
// common volatility path.
double csv_observed_loglik(const VARData& data, const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma, double phi,
                           double sigma2, const Ar1GaussianFamily& fam, long long R, RngStream& rng) {
  const int T = data.T, n = data.n;
  const Eigen::MatrixXd eps = data.Y - data.X * A;
  Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
  if (llt.info() != Eigen::Success) throw std::runtime_error("csv_observed_loglik: Sigma not SPD");
  const double log_det_sigma = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const Eigen::VectorXd w = llt.matrixL().solve(eps.transpose()).colwise().squaredNorm();

  std::vector<double> logw(static_cast<std::size_t>(R));
  for (long long rep = 0; rep < R; ++rep) {
    const Eigen::VectorXd h = fam.sample(rng);
    double lw = log_ar1_path_pdf(h, 0.0, phi, sigma2) - fam.log_pdf(h);
    lw += -0.5 * T * n * kLog2Pi - 0.5 * T * log_det_sigma - 0.5 * n * h.sum();
    lw += -0.5 * ((-h.array()).exp() * w.array()).sum();
    logw[static_cast<std::size_t>(rep)] = lw;
  }
  return log_sum_exp(logw) - std::log(static_cast<double>(R));
}

// Product over series of per-series IS estimates: the SV conditional density
// factors across equations given the orthogonalized residuals.
double sv_observed_loglik(const VARData& data, const SvState& state, const std::vector<Ar1GaussianFamily>& fams,
                          long long R, RngStream& rng) {
  const int T = data.T, n = data.n;
  const Eigen::MatrixXd eps_orth = (data.Y - data.X * state.alpha) * state.impact_matrix().transpose();
  double total = 0.0;
  std::vector<double> logw(static_cast<std::size_t>(R));
  for (int i = 0; i < n; ++i) {
    const Eigen::ArrayXd e2 = eps_orth.col(i).array().square();
    for (long long rep = 0; rep < R; ++rep) {
      const Eigen::VectorXd h = fams[i].sample(rng);
      double lw = log_ar1_path_pdf(h, state.mu(i), state.phi(i), state.sigma2(i)) - fams[i].log_pdf(h);
      lw += -0.5 * T * kLog2Pi - 0.5 * h.sum() - 0.5 * ((-h.array()).exp() * e2).sum();
      logw[static_cast<std::size_t>(rep)] = lw;
    }
    total += log_sum_exp(logw) - std::log(static_cast<double>(R));
  }
  return total;
}

}  // namespace

DicResult dic_for_chain(const ChainOutput& chain, const VARData& data, long long R_h, RngStream& rng, int max_draws) {
  const std::size_t M = chain.size();
  if (M < 100) throw std::invalid_argument("dic_for_chain: need at least 100 kept draws");
  const std::size_t step = max_draws > 0 && M > static_cast<std::size_t>(max_draws) ? M / max_draws : 1;

  // Fit the h importance families once from the full chain.
  std::vector<Ar1GaussianFamily> fams;
  const int T = data.T;
  auto fit_series = [&](auto getter, int count) {
    for (int i = 0; i < count; ++i) {
      Eigen::MatrixXd stack(static_cast<Eigen::Index>(M), T);
      for (std::size_t m = 0; m < M; ++m) stack.row(static_cast<Eigen::Index>(m)) = getter(m, i);
      fams.push_back(fit_ar1_family(stack));
    }
  };

  std::vector<double> values;
  double sum = 0.0;

  switch (chain.model) {
    case ModelTag::var:
    case ModelTag::csv: {
      const auto& draws = chain.csv_draws();
      const bool vol = chain.model == ModelTag::csv;
      if (vol) fit_series([&](std::size_t m, int) { return draws[m].h.transpose(); }, 1);
      CsvState mean = draws[0];
      mean.A.setZero();
      mean.Sigma.setZero();
      mean.phi = 0.0;
      mean.sigma2 = 0.0;
      std::size_t used = 0;
      for (std::size_t m = 0; m < M; m += step) {
        ++used;
        mean.A += draws[m].A;
        mean.Sigma += draws[m].Sigma;
        mean.phi += draws[m].phi;
        mean.sigma2 += draws[m].sigma2;
      }
      mean.A /= used;
      mean.Sigma /= used;
      mean.phi /= used;
      mean.sigma2 /= used;
      auto eval = [&](const CsvState& s, std::uint64_t id) {
        RngStream sub = rng.substream(id);
        if (!vol) {
          Eigen::LLT<Eigen::MatrixXd> llt(s.Sigma);
          const Eigen::MatrixXd eps = data.Y - data.X * s.A;
          const Eigen::VectorXd w = llt.matrixL().solve(eps.transpose()).colwise().squaredNorm();
          const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
          return -0.5 * data.T * data.n * kLog2Pi - 0.5 * data.T * log_det - 0.5 * w.sum();
        }
        return csv_observed_loglik(data, s.A, s.Sigma, s.phi, s.sigma2, fams[0], R_h, sub);
      };
      std::uint64_t id = 0;
      for (std::size_t m = 0; m < M; m += step) {
        values.push_back(eval(draws[m], id++));
        sum += values.back();
      }
      DicResult out;
      out.mean_deviance = -2.0 * sum / values.size();
      out.deviance_at_point = -2.0 * eval(mean, id);
      out.pd = out.mean_deviance - out.deviance_at_point;
      out.dic = out.mean_deviance + out.pd;
      return out;
    }
    case ModelTag::sv: {
      const auto& draws = chain.sv_draws();
      const int n = data.n;
      fit_series([&](std::size_t m, int i) { return draws[m].h.row(i); }, n);
      SvState mean = draws[0];
      mean.alpha.setZero();
      for (auto& b : mean.beta) b.setZero();
      mean.mu.setZero();
      mean.phi.setZero();
      mean.sigma2.setZero();
      std::size_t used = 0;
      for (std::size_t m = 0; m < M; m += step) {
        ++used;
        mean.alpha += draws[m].alpha;
        for (int i = 0; i < n; ++i) mean.beta[i] += draws[m].beta[i];
        mean.mu += draws[m].mu;
        mean.phi += draws[m].phi;
        mean.sigma2 += draws[m].sigma2;
      }
      mean.alpha /= used;
      for (auto& b : mean.beta) b /= static_cast<double>(used);
      mean.mu /= used;
      mean.phi /= used;
      mean.sigma2 /= used;
      std::uint64_t id = 0;
      for (std::size_t m = 0; m < M; m += step) {
        RngStream sub = rng.substream(id++);
        values.push_back(sv_observed_loglik(data, draws[m], fams, R_h, sub));
        sum += values.back();
      }
      RngStream sub = rng.substream(id);
      DicResult out;
      out.mean_deviance = -2.0 * sum / values.size();
      out.deviance_at_point = -2.0 * sv_observed_loglik(data, mean, fams, R_h, sub);
      out.pd = out.mean_deviance - out.deviance_at_point;
      out.dic = out.mean_deviance + out.pd;
      return out;
    }
    case ModelTag::fsv: {
      const auto& draws = chain.fsv_draws();
      const int n = data.n;
      const int r = draws[0].factor_count();
      fit_series([&](std::size_t m, int i) { return draws[m].h.row(i); }, n + r);
      FsvState mean = draws[0];
      mean.alpha.setZero();
      for (auto& l : mean.loadings) l.setZero();
      mean.mu.setZero();
      mean.phi.setZero();
      mean.sigma2.setZero();
      std::size_t used = 0;
      for (std::size_t m = 0; m < M; m += step) {
        ++used;
        mean.alpha += draws[m].alpha;
        for (int i = 0; i < n; ++i) mean.loadings[i] += draws[m].loadings[i];
        mean.mu += draws[m].mu;
        mean.phi += draws[m].phi;
        mean.sigma2 += draws[m].sigma2;
      }
      mean.alpha /= used;
      for (auto& l : mean.loadings) l /= static_cast<double>(used);
      mean.mu /= used;
      mean.phi /= used;
      mean.sigma2 /= used;
      std::uint64_t id = 0;
      for (std::size_t m = 0; m < M; m += step) {
        RngStream sub = rng.substream(id++);
        const auto& s = draws[m];
        values.push_back(
            fsv_observed_loglik(data, s.alpha, s.loading_matrix(), s.mu, s.phi, s.sigma2, fams, R_h, sub).value);
        sum += values.back();
      }
      RngStream sub = rng.substream(id);
      DicResult out;
      out.mean_deviance = -2.0 * sum / values.size();
      out.deviance_at_point =
          -2.0 *
          fsv_observed_loglik(data, mean.alpha, mean.loading_matrix(), mean.mu, mean.phi, mean.sigma2, fams, R_h, sub)
              .value;
      out.pd = out.mean_deviance - out.deviance_at_point;
      out.dic = out.mean_deviance + out.pd;
      return out;
    }
  }
  throw std::logic_error("dic_for_chain: unreachable");
}

}  // namespace bvarml
