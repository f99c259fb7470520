#include "bvarml/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bvarml {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kLogPi = 1.1447298858494001741;
}  // namespace

double ln_multivariate_gamma(int n, double x) {
  if (n < 1) throw std::domain_error("ln_multivariate_gamma: n must be >= 1");
  if (!(x > 0.5 * (n - 1))) throw std::domain_error("ln_multivariate_gamma: pole at x <= (n-1)/2");
  double out = 0.25 * n * (n - 1) * kLogPi;
  for (int j = 1; j <= n; ++j) out += std::lgamma(x + 0.5 * (1 - j));
  return out;
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: x must be positive");
  double result = 0.0;
  while (x < 12.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic series in 1/x^2.
  const double inv = 1.0 / x, inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return result;
}

double trigamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("trigamma: x must be positive");
  double result = 0.0;
  while (x < 12.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  result +=
      inv * (1.0 + 0.5 * inv +
             inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * 5.0 / 66.0)))));
  return result;
}

double log_norm_sf(double x) {
  if (x < 10.0) {
    if (x < -10.0) return std::log1p(-std::exp(log_norm_sf(-x)));
    return std::log(0.5 * std::erfc(x / std::sqrt(2.0)));
  }
  // Asymptotic expansion of Mills' ratio for the far right tail.
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - 0.5 * kLog2Pi - std::log(x) + std::log(series);
}

double log_norm_cdf(double x) { return log_norm_sf(-x); }

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

double log_gamma_pdf(double x, double shape, double rate) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_inverse_gamma_pdf(double x, double shape, double scale) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

double log_truncated_normal_pdf(double x, double mean, double var, double lo, double hi) {
  if (x <= lo || x >= hi) return -std::numeric_limits<double>::infinity();
  const double s = std::sqrt(var);
  const double a = (lo - mean) / s, b = (hi - mean) / s;
  double log_mass;
  if (std::isinf(a) && std::isinf(b)) {
    log_mass = 0.0;
  } else if (std::isinf(a)) {
    log_mass = log_norm_cdf(b);
  } else if (std::isinf(b)) {
    log_mass = log_norm_sf(a);
  } else {
    // Work in the tail direction with the smaller magnitude terms.
    const double la = log_norm_sf(a), lb = log_norm_sf(b);
    log_mass = la + std::log1p(-std::exp(lb - la));
  }
  return log_normal_pdf(x, mean, var) - log_mass;
}

double log_det_spd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw std::runtime_error("log_det_spd: matrix not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double log_mvn_pdf_cov(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::runtime_error("log_mvn_pdf_cov: covariance not SPD");
  const Eigen::VectorXd z = llt.matrixL().solve(x - mean);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (x.size() * kLog2Pi + log_det + z.squaredNorm());
}

double log_mvn_pdf_prec(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& prec) {
  Eigen::LLT<Eigen::MatrixXd> llt(prec);
  if (llt.info() != Eigen::Success) throw std::runtime_error("log_mvn_pdf_prec: precision not SPD");
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const Eigen::VectorXd d = x - mean;
  const Eigen::VectorXd z = llt.matrixL().transpose() * d;
  return -0.5 * (x.size() * kLog2Pi - log_det + z.squaredNorm());
}

double log_inverse_wishart_pdf(const Eigen::MatrixXd& sigma, double nu, const Eigen::MatrixXd& S) {
  const int n = static_cast<int>(sigma.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw std::runtime_error("log_inverse_wishart_pdf: sigma not SPD");
  const double log_det_sigma = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double trace_term = llt.solve(S).trace();
  return 0.5 * nu * log_det_spd(S) - 0.5 * nu * n * std::log(2.0) - ln_multivariate_gamma(n, 0.5 * nu) -
         0.5 * (nu + n + 1.0) * log_det_sigma - 0.5 * trace_term;
}

double log_matrix_normal_pdf_prec(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M, const Eigen::MatrixXd& Sigma,
                                  const Eigen::MatrixXd& K) {
  const int k = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  Eigen::LLT<Eigen::MatrixXd> llt_sigma(Sigma);
  if (llt_sigma.info() != Eigen::Success) throw std::runtime_error("log_matrix_normal_pdf_prec: Sigma not SPD");
  const double log_det_sigma = 2.0 * llt_sigma.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const Eigen::MatrixXd D = A - M;
  const double quad = llt_sigma.solve(D.transpose() * (K * D)).trace();
  return -0.5 * n * k * kLog2Pi - 0.5 * k * log_det_sigma + 0.5 * n * log_det_spd(K) - 0.5 * quad;
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a, sum = term, ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) = 1 - P(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, f = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return f * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("gamma_p: a must be positive");
  if (x <= 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double chi2_quantile(double alpha, double dof) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("chi2_quantile: alpha must be in (0,1)");
  const double p = 1.0 - alpha;
  const double a = 0.5 * dof;
  // Bisection on the regularized incomplete gamma.
  double lo = 0.0, hi = dof + 10.0 * std::sqrt(2.0 * dof) + 10.0;
  while (gamma_p(a, 0.5 * hi) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_p(a, 0.5 * mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double log_sum_exp(const std::vector<double>& v) {
  double max = -std::numeric_limits<double>::infinity();
  for (double x : v) max = std::max(max, x);
  if (!std::isfinite(max)) return max;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - max);
  return max + std::log(sum);
}

}  // namespace bvarml
