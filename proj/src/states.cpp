#include "bvarml/states.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace bvarml {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void require_spd(const Eigen::MatrixXd& m, const char* msg) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  require(llt.info() == Eigen::Success, msg);
}

void require_ar1(const Eigen::VectorXd& mu, const Eigen::VectorXd& phi, const Eigen::VectorXd& sigma2, int count,
                 const char* what) {
  require(mu.size() == count && phi.size() == count && sigma2.size() == count, what);
  for (int i = 0; i < count; ++i) {
    require(std::abs(phi(i)) < 1.0, "state: |phi| must be < 1");
    require(sigma2(i) > 0.0, "state: sigma2 must be positive");
  }
}

}  // namespace

ModelTag model_tag_from_string(const std::string& s) {
  if (s == "var") return ModelTag::var;
  if (s == "csv") return ModelTag::csv;
  if (s == "sv") return ModelTag::sv;
  if (s == "fsv") return ModelTag::fsv;
  throw std::invalid_argument("unknown model tag: " + s);
}

std::string to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::var: return "var";
    case ModelTag::csv: return "csv";
    case ModelTag::sv: return "sv";
    case ModelTag::fsv: return "fsv";
  }
  return "csv";
}

void CsvState::validate() const {
  require(A.cols() == Sigma.rows() && Sigma.rows() == Sigma.cols(), "CsvState: dimension mismatch");
  require_spd(Sigma, "CsvState: Sigma not positive definite");
  require(std::abs(phi) < 1.0, "CsvState: |phi| must be < 1");
  require(sigma2 > 0.0, "CsvState: sigma2 must be positive");
  require(kappa > 0.0, "CsvState: kappa must be positive");
}

Eigen::MatrixXd SvState::impact_matrix() const {
  const int n = static_cast<int>(alpha.cols());
  Eigen::MatrixXd B0 = Eigen::MatrixXd::Identity(n, n);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) B0(i, j) = beta[i](j);
  return B0;
}

void SvState::validate() const {
  const int n = static_cast<int>(alpha.cols());
  require(static_cast<int>(beta.size()) == n, "SvState: beta row count mismatch");
  for (int i = 0; i < n; ++i)
    require(static_cast<int>(beta[i].size()) == i, "SvState: beta row i must have i free elements");
  require(h.rows() == n, "SvState: h must have n rows");
  require_ar1(mu, phi, sigma2, n, "SvState: AR parameter length mismatch");
  require(kappa1 > 0.0 && kappa2 > 0.0 && kappa3 > 0.0, "SvState: shrinkage parameters must be positive");
}

Eigen::MatrixXd FsvState::loading_matrix() const {
  const int n = static_cast<int>(alpha.cols());
  const int r = factor_count();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, r);
  for (int i = 0; i < n; ++i) {
    const int len = std::min(i, r);
    for (int j = 0; j < len; ++j) L(i, j) = loadings[i](j);
    if (i < r) L(i, i) = 1.0;
  }
  return L;
}

void FsvState::validate() const {
  const int n = static_cast<int>(alpha.cols());
  const int r = factor_count();
  require(2 * r <= n - 1, "FsvState: identification requires r <= (n-1)/2");
  require(static_cast<int>(loadings.size()) == n, "FsvState: loadings row count mismatch");
  for (int i = 0; i < n; ++i)
    require(static_cast<int>(loadings[i].size()) == std::min(i, r), "FsvState: loading row length mismatch");
  require(h.rows() == n + r && f.cols() == h.cols(), "FsvState: latent dimensions mismatch");
  require_ar1(mu, phi, sigma2, n + r, "FsvState: AR parameter length mismatch");
  require(kappa1 > 0.0 && kappa2 > 0.0, "FsvState: shrinkage parameters must be positive");
}

void RunConfig::validate(int n) const {
  require(burn_in >= 0, "RunConfig: burn_in must be >= 0");
  require(kept >= 1, "RunConfig: kept must be >= 1");
  require(thin >= 1, "RunConfig: thin must be >= 1");
  require(p >= 1, "RunConfig: lag order must be >= 1");
  if (model == ModelTag::fsv) require(2 * r <= n - 1, "RunConfig: FSV requires r <= (n-1)/2");
}

std::size_t ChainOutput::size() const {
  return std::visit([](const auto& v) { return v.size(); }, draws);
}

}  // namespace bvarml
