#include "bvarml/draws.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bvarml/special.hpp"

namespace bvarml {

namespace {

// Concave log-density of t = log(x) for GIG(lambda, omega, omega), shifted so
// the maximum (at t = 0 after centering on the mode) equals zero.
struct GigLogDensity {
  double lambda, omega, mode, psi_mode;

  GigLogDensity(double lambda_, double omega_) : lambda(lambda_), omega(omega_) {
    mode = std::asinh(lambda / omega);
    psi_mode = lambda * mode - omega * std::cosh(mode);
  }
  double operator()(double t) const { return lambda * (mode + t) - omega * std::cosh(mode + t) - psi_mode; }
  double deriv(double t) const { return lambda - omega * std::sinh(mode + t); }
};

// Smallest s > 0 with g(sign * s) = -1, by bracketed Newton.
double unit_drop(const GigLogDensity& g, double sign) {
  double hi = 1.0;
  while (g(sign * hi) > -1.0) hi *= 2.0;
  double lo = 0.0, s = std::min(1.0, hi);
  for (int it = 0; it < 100; ++it) {
    const double val = g(sign * s) + 1.0;
    if (std::abs(val) < 1e-12) break;
    if (val > 0.0)
      lo = s;
    else
      hi = s;
    const double d = sign * g.deriv(sign * s);
    double next = s - val / d;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    s = next;
  }
  return s;
}

// Rejection sampler for x ~ GIG(lambda, omega, omega), lambda >= 0, omega > 0.
// Envelope: flat over [-t_m, t_p] around the mode of the log-x density plus
// exponential tails with the tangent slopes at the unit-drop points.
double draw_gig_symmetric(RngStream& rng, double lambda, double omega) {
  const GigLogDensity g(lambda, omega);
  const double tp = unit_drop(g, +1.0);
  const double tm = unit_drop(g, -1.0);
  const double eta = -g.deriv(tp);       // > 0
  const double theta = g.deriv(-tm);     // > 0
  const double w_center = tm + tp;
  const double w_right = std::exp(-1.0) / eta;
  const double w_left = std::exp(-1.0) / theta;
  const double total = w_center + w_right + w_left;

  for (;;) {
    const double u = rng.uniform() * total;
    double t, log_env;
    if (u < w_center) {
      t = -tm + rng.uniform() * w_center;
      log_env = 0.0;
    } else if (u < w_center + w_right) {
      const double e = rng.exponential();
      t = tp + e / eta;
      log_env = -1.0 - eta * (t - tp);
    } else {
      const double e = rng.exponential();
      t = -tm - e / theta;
      log_env = -1.0 + theta * (t + tm);
    }
    if (std::log(rng.uniform()) <= g(t) - log_env) return std::exp(t + g.mode);
  }
}

}  // namespace

double draw_gig(RngStream& rng, double p, double a, double b) {
  if (a < 0.0 || b < 0.0) throw std::domain_error("draw_gig: a and b must be nonnegative");
  const bool a_zero = a < std::numeric_limits<double>::min();
  const bool b_zero = b < std::numeric_limits<double>::min();
  if (a_zero && b_zero) throw std::domain_error("draw_gig: a and b cannot both vanish");
  if (b_zero) {
    if (!(p > 0.0)) throw std::domain_error("draw_gig: b = 0 requires p > 0");
    return rng.gamma(p, 0.5 * a);
  }
  if (a_zero) {
    if (!(p < 0.0)) throw std::domain_error("draw_gig: a = 0 requires p < 0");
    return rng.inverse_gamma(-p, 0.5 * b);
  }
  const double omega = std::sqrt(a * b);
  const double scale = std::sqrt(b / a);
  // Near-degenerate omega with large |p|: the GIG is numerically a gamma
  // (p > 0) or inverse gamma (p < 0); the shortcut avoids cosh overflow.
  if (omega < 1e-10 && std::abs(p) > 0.5) {
    return p > 0.0 ? rng.gamma(p, 0.5 * a) : rng.inverse_gamma(-p, 0.5 * b);
  }
  if (p >= 0.0) return scale * draw_gig_symmetric(rng, p, omega);
  return scale / draw_gig_symmetric(rng, -p, omega);
}

Eigen::MatrixXd draw_inverse_wishart(RngStream& rng, double nu, const Eigen::MatrixXd& S) {
  const int n = static_cast<int>(S.rows());
  if (S.cols() != n) throw std::invalid_argument("draw_inverse_wishart: S must be square");
  if (!(nu > n - 1)) throw std::domain_error("draw_inverse_wishart: nu must exceed n - 1");
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw std::runtime_error("draw_inverse_wishart: S not positive definite");

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = std::sqrt(rng.chi_squared(nu - i));
    for (int j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  // Sigma = (C A'^{-1})(C A'^{-1})' with C = chol(S); here T = A^{-1} C'.
  const Eigen::MatrixXd C = llt.matrixL();
  const Eigen::MatrixXd T =
      A.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(C.transpose()));
  Eigen::MatrixXd sigma = T.transpose() * T;
  return 0.5 * (sigma + sigma.transpose());
}

namespace {

// Robert's translated-exponential rejection for the standardized tail
// z >= a (a > 0), additionally rejecting draws above b.
double tail_exponential(RngStream& rng, double a, double b) {
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a + rng.exponential() / lambda;
    if (x > b) continue;
    const double d = x - lambda;
    if (std::log(rng.uniform()) <= -0.5 * d * d) return x;
  }
}

double uniform_rejection(RngStream& rng, double a, double b) {
  // Max of the density over [a, b].
  double c = 0.0;
  if (a > 0.0) c = a;
  if (b < 0.0) c = b;
  for (;;) {
    const double x = a + (b - a) * rng.uniform();
    if (std::log(rng.uniform()) <= 0.5 * (c * c - x * x)) return x;
  }
}

}  // namespace

double draw_truncated_normal(RngStream& rng, double m, double v, double lo, double hi) {
  if (!(v > 0.0)) throw std::domain_error("draw_truncated_normal: variance must be positive");
  if (!(lo < hi)) throw std::invalid_argument("draw_truncated_normal: need lo < hi");
  const double s = std::sqrt(v);
  double a = (lo - m) / s, b = (hi - m) / s;
  bool flipped = false;
  if (b <= 0.0) {
    const double na = -b, nb = -a;
    a = na;
    b = nb;
    flipped = true;
  }

  // Interval mass gate (standardized scale).
  double log_mass;
  if (std::isinf(b)) {
    log_mass = std::isinf(a) ? 0.0 : log_norm_sf(a);
  } else if (a >= 0.0) {
    const double la = log_norm_sf(a), lb = log_norm_sf(b);
    log_mass = la + std::log1p(-std::exp(lb - la));
  } else {
    log_mass = std::log(std::max(0.5 * std::erf(b / std::sqrt(2.0)) - 0.5 * std::erf(a / std::sqrt(2.0)),
                                 std::numeric_limits<double>::min()));
  }
  if (log_mass < std::log(1e-300)) throw std::underflow_error("draw_truncated_normal: interval mass underflow");

  double z;
  if (std::isfinite(b) && b - a < 0.35) {
    z = uniform_rejection(rng, a, b);
  } else if (a <= 0.0) {
    // Region straddles the mode and is not narrow: plain rejection.
    do {
      z = rng.normal();
    } while (z < a || z > b);
  } else if (a > 0.6) {
    z = tail_exponential(rng, a, b);
  } else {
    // Moderate one-sided region: half-normal rejection.
    do {
      z = std::abs(rng.normal());
    } while (z < a || z > b);
  }
  if (flipped) z = -z;
  return m + s * z;
}

Eigen::MatrixXd draw_matrix_normal_prec(RngStream& rng, const Eigen::MatrixXd& M, const Eigen::MatrixXd& Sigma,
                                        const Eigen::LLT<Eigen::MatrixXd>& K_llt) {
  const int k = static_cast<int>(M.rows()), n = static_cast<int>(M.cols());
  Eigen::LLT<Eigen::MatrixXd> llt_sigma(Sigma);
  if (llt_sigma.info() != Eigen::Success) throw std::runtime_error("draw_matrix_normal_prec: Sigma not SPD");
  Eigen::MatrixXd Z(k, n);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) Z(i, j) = rng.normal();
  // A = M + L_K'^{-1} Z L_Sigma'
  const Eigen::MatrixXd W = K_llt.matrixU().solve(Z);
  return M + W * Eigen::MatrixXd(llt_sigma.matrixL()).transpose();
}

Eigen::VectorXd draw_mvn_precision(RngStream& rng, const Eigen::VectorXd& c, const Eigen::LLT<Eigen::MatrixXd>& K_llt) {
  Eigen::VectorXd z(c.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return K_llt.solve(c) + K_llt.matrixU().solve(z);
}

}  // namespace bvarml
