#include "bvarml/banded.hpp"

#include <cmath>
#include <stdexcept>

namespace bvarml {

BandedPrecision::BandedPrecision(int dim, int bandwidth)
    : dim_(dim), bw_(bandwidth), storage_(Eigen::MatrixXd::Zero(bandwidth + 1, dim)) {
  if (dim < 1 || bandwidth < 0 || bandwidth >= dim) throw std::invalid_argument("BandedPrecision: bad dimensions");
}

double& BandedPrecision::at(int row, int col) {
  if (row < col) std::swap(row, col);
  return storage_(row - col, col);
}

double BandedPrecision::at(int row, int col) const {
  if (row < col) std::swap(row, col);
  return storage_(row - col, col);
}

void BandedPrecision::add_diagonal(const Eigen::VectorXd& d) {
  if (d.size() != dim_) throw std::invalid_argument("add_diagonal: size mismatch");
  storage_.row(0) += d.transpose();
}

double BandedPrecision::quad_form(const Eigen::VectorXd& x) const {
  double out = 0.0;
  for (int t = 0; t < dim_; ++t) {
    out += storage_(0, t) * x(t) * x(t);
    for (int d = 1; d <= bw_ && t + d < dim_; ++d) out += 2.0 * storage_(d, t) * x(t) * x(t + d);
  }
  return out;
}

Eigen::MatrixXd BandedPrecision::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int t = 0; t < dim_; ++t)
    for (int d = 0; d <= bw_ && t + d < dim_; ++d) {
      m(t + d, t) = storage_(d, t);
      m(t, t + d) = storage_(d, t);
    }
  return m;
}

BandedPrecision::Cholesky::Cholesky(const BandedPrecision& k)
    : l_(Eigen::MatrixXd::Zero(k.bandwidth() + 1, k.dim())), dim_(k.dim()), bw_(k.bandwidth()) {
  for (int t = 0; t < dim_; ++t) {
    double diag = k.band(0, t);
    for (int d = 1; d <= bw_ && t - d >= 0; ++d) diag -= l_(d, t - d) * l_(d, t - d);
    if (!(diag > 0.0)) throw std::runtime_error("BandedPrecision: Cholesky failed, matrix not positive definite");
    l_(0, t) = std::sqrt(diag);
    for (int d = 1; d <= bw_ && t + d < dim_; ++d) {
      double v = k.band(d, t);
      // sum over shared columns j < t with both (t+d, j) and (t, j) in band
      for (int e = 1; e + d <= bw_ && t - e >= 0; ++e) v -= l_(e + d, t - e) * l_(e, t - e);
      l_(d, t) = v / l_(0, t);
    }
  }
}

double BandedPrecision::Cholesky::log_det() const { return 2.0 * l_.row(0).array().log().sum(); }

Eigen::VectorXd BandedPrecision::Cholesky::solve_lower(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x(dim_);
  for (int t = 0; t < dim_; ++t) {
    double v = b(t);
    for (int d = 1; d <= bw_ && t - d >= 0; ++d) v -= l_(d, t - d) * x(t - d);
    x(t) = v / l_(0, t);
  }
  return x;
}

Eigen::VectorXd BandedPrecision::Cholesky::solve_upper(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x(dim_);
  for (int t = dim_ - 1; t >= 0; --t) {
    double v = b(t);
    for (int d = 1; d <= bw_ && t + d < dim_; ++d) v -= l_(d, t) * x(t + d);
    x(t) = v / l_(0, t);
  }
  return x;
}

Eigen::VectorXd BandedPrecision::Cholesky::solve(const Eigen::VectorXd& b) const {
  return solve_upper(solve_lower(b));
}

Eigen::VectorXd BandedPrecision::Cholesky::sample(RngStream& rng, const Eigen::VectorXd& c) const {
  Eigen::VectorXd z(dim_);
  for (int t = 0; t < dim_; ++t) z(t) = rng.normal();
  return solve(c) + solve_upper(z);
}

BandedPrecision ar1_precision(int T, double phi, double s2) {
  if (T < 1) throw std::invalid_argument("ar1_precision: T must be >= 1");
  if (!(std::abs(phi) < 1.0)) throw std::domain_error("ar1_precision: |phi| must be < 1");
  if (!(s2 > 0.0)) throw std::domain_error("ar1_precision: s2 must be positive");
  BandedPrecision k(T, T > 1 ? 1 : 0);
  const double inv = 1.0 / s2;
  for (int t = 0; t < T; ++t) {
    double d = inv;
    if (t == 0) d = (1.0 - phi * phi) * inv;
    if (t + 1 < T) d += phi * phi * inv;
    k.band(0, t) = d;
    if (t + 1 < T) k.band(1, t) = -phi * inv;
  }
  return k;
}

Eigen::VectorXd ar1_precision_times_mean(const BandedPrecision& K, double mu) {
  const int T = K.dim();
  Eigen::VectorXd c(T);
  for (int t = 0; t < T; ++t) {
    double v = K.band(0, t) * mu;
    if (t > 0) v += K.band(1, t - 1) * mu;
    if (t + 1 < T) v += K.band(1, t) * mu;
    c(t) = v;
  }
  return c;
}

Eigen::VectorXd draw_gaussian_precision(RngStream& rng, const Eigen::VectorXd& c, const BandedPrecision& K) {
  if (c.size() != K.dim()) throw std::invalid_argument("draw_gaussian_precision: size mismatch");
  return K.cholesky().sample(rng, c);
}

double log_ar1_path_pdf(const Eigen::VectorXd& h, double mu, double phi, double s2) {
  const int T = static_cast<int>(h.size());
  constexpr double kLog2Pi = 1.8378770664093454836;
  double quad = (1.0 - phi * phi) * (h(0) - mu) * (h(0) - mu);
  for (int t = 1; t < T; ++t) {
    const double e = h(t) - mu - phi * (h(t - 1) - mu);
    quad += e * e;
  }
  return -0.5 * T * (kLog2Pi + std::log(s2)) + 0.5 * std::log1p(-phi * phi) - 0.5 * quad / s2;
}

}  // namespace bvarml
