#include "bvarml/forecast.hpp"

#include <cmath>
#include <stdexcept>

#include "bvarml/special.hpp"

namespace bvarml {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::VectorXd conditional_mean(const Eigen::MatrixXd& A, const Eigen::MatrixXd& recent) {
  const int n = static_cast<int>(A.cols());
  const int p = static_cast<int>(recent.rows());
  Eigen::VectorXd m = A.row(0).transpose();
  for (int l = 1; l <= p; ++l) m += A.middleRows(1 + (l - 1) * n, n).transpose() * recent.row(p - l).transpose();
  return m;
}

void push_row(Eigen::MatrixXd& recent, const Eigen::VectorXd& row) {
  const int p = static_cast<int>(recent.rows());
  for (int l = 0; l + 1 < p; ++l) recent.row(l) = recent.row(l + 1);
  recent.row(p - 1) = row.transpose();
}

double ar1_step(RngStream& rng, double h_prev, double mu, double phi, double sigma2) {
  return mu + phi * (h_prev - mu) + std::sqrt(sigma2) * rng.normal();
}

}  // namespace

double predictive_log_likelihood(const ChainOutput& chain, const VARData& data, int origin, int horizon,
                                 long long path_draws, RngStream& rng) {
  if (horizon < 1) throw std::invalid_argument("predictive_log_likelihood: horizon must be >= 1");
  if (origin + horizon - 1 >= data.T)
    throw std::invalid_argument("predictive_log_likelihood: origin leaves no realized observation at the horizon");
  const int n = data.n, p = data.p;
  const std::size_t M = chain.size();
  if (M == 0) throw std::invalid_argument("predictive_log_likelihood: empty chain");
  const Eigen::VectorXd realized = data.Y.row(origin + horizon - 1).transpose();

  // The p rows preceding the origin, in time order.
  Eigen::MatrixXd base_recent(p, n);
  for (int l = 0; l < p; ++l) {
    const int row = origin - p + l;
    if (row >= 0) {
      base_recent.row(l) = data.Y.row(row);
    } else {
      // reach into the lag block of X at the first available row
      base_recent.row(l) = data.X.row(0).segment(1 + (-row - 1) * n, n);
    }
  }

  std::vector<double> logp(static_cast<std::size_t>(path_draws));
  for (long long d = 0; d < path_draws; ++d) {
    const std::size_t m = static_cast<std::size_t>(d % M);
    Eigen::MatrixXd recent = base_recent;
    double lp = 0.0;
    switch (chain.model) {
      case ModelTag::var:
      case ModelTag::csv: {
        const CsvState& s = chain.csv_draws()[m];
        Eigen::LLT<Eigen::MatrixXd> llt(s.Sigma);
        const Eigen::MatrixXd L = llt.matrixL();
        const double log_det = 2.0 * L.diagonal().array().log().sum();
        double h = chain.model == ModelTag::csv ? s.h(s.h.size() - 1) : 0.0;
        for (int step = 0; step < horizon; ++step) {
          if (chain.model == ModelTag::csv) h = ar1_step(rng, h, 0.0, s.phi, s.sigma2);
          const Eigen::VectorXd mean = conditional_mean(s.A, recent);
          if (step + 1 == horizon) {
            const Eigen::VectorXd z = L.triangularView<Eigen::Lower>().solve(realized - mean);
            lp = -0.5 * n * (kLog2Pi + h) - 0.5 * log_det - 0.5 * std::exp(-h) * z.squaredNorm();
          } else {
            Eigen::VectorXd zdraw(n);
            for (int i = 0; i < n; ++i) zdraw(i) = rng.normal();
            push_row(recent, mean + std::exp(0.5 * h) * (L * zdraw));
          }
        }
        break;
      }
      case ModelTag::sv: {
        const SvState& s = chain.sv_draws()[m];
        const Eigen::MatrixXd B0 = s.impact_matrix();
        Eigen::VectorXd h = s.h.col(s.h.cols() - 1);
        for (int step = 0; step < horizon; ++step) {
          for (int i = 0; i < n; ++i) h(i) = ar1_step(rng, h(i), s.mu(i), s.phi(i), s.sigma2(i));
          const Eigen::VectorXd mean = conditional_mean(s.alpha, recent);
          if (step + 1 == horizon) {
            const Eigen::VectorXd w = B0 * (realized - mean);
            lp = -0.5 * n * kLog2Pi - 0.5 * h.sum() - 0.5 * ((-h.array()).exp() * w.array().square()).sum();
          } else {
            Eigen::VectorXd eta(n);
            for (int i = 0; i < n; ++i) eta(i) = std::exp(0.5 * h(i)) * rng.normal();
            push_row(recent, mean + B0.triangularView<Eigen::Lower>().solve(eta));
          }
        }
        break;
      }
      case ModelTag::fsv: {
        const FsvState& s = chain.fsv_draws()[m];
        const int r = s.factor_count();
        const Eigen::MatrixXd L = s.loading_matrix();
        Eigen::VectorXd h = s.h.col(s.h.cols() - 1);
        for (int step = 0; step < horizon; ++step) {
          for (int i = 0; i < n + r; ++i) h(i) = ar1_step(rng, h(i), s.mu(i), s.phi(i), s.sigma2(i));
          const Eigen::VectorXd mean = conditional_mean(s.alpha, recent);
          Eigen::MatrixXd cov = L * h.tail(r).array().exp().matrix().asDiagonal() * L.transpose();
          cov.diagonal() += h.head(n).array().exp().matrix();
          if (step + 1 == horizon) {
            lp = log_mvn_pdf_cov(realized, mean, cov);
          } else {
            Eigen::LLT<Eigen::MatrixXd> llt(cov);
            Eigen::VectorXd z(n);
            for (int i = 0; i < n; ++i) z(i) = rng.normal();
            push_row(recent, mean + Eigen::MatrixXd(llt.matrixL()) * z);
          }
        }
        break;
      }
    }
    logp[static_cast<std::size_t>(d)] = lp;
  }
  return log_sum_exp(logp) - std::log(static_cast<double>(path_draws));
}

}  // namespace bvarml
