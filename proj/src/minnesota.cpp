#include "bvarml/minnesota.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>

namespace bvarml {

PriorMode prior_mode_from_string(const std::string& s) {
  if (s == "asymmetric") return PriorMode::asymmetric;
  if (s == "symmetric") return PriorMode::symmetric;
  if (s == "subjective") return PriorMode::subjective;
  throw std::invalid_argument("unknown prior mode: " + s);
}

std::string to_string(PriorMode mode) {
  switch (mode) {
    case PriorMode::asymmetric: return "asymmetric";
    case PriorMode::symmetric: return "symmetric";
    case PriorMode::subjective: return "subjective";
  }
  return "asymmetric";
}

namespace {

void check_positive(const Eigen::VectorXd& s2, const char* what) {
  if ((s2.array() <= 0.0).any()) throw std::domain_error(std::string(what) + ": scale constants must be positive");
}

}  // namespace

Eigen::VectorXd conjugate_V_A(double kappa, const Eigen::VectorXd& s2, int p, int n, double intercept_var) {
  if (!(kappa > 0.0)) throw std::domain_error("conjugate_V_A: kappa must be positive");
  if (static_cast<int>(s2.size()) != n) throw std::invalid_argument("conjugate_V_A: s2 length != n");
  check_positive(s2, "conjugate_V_A");
  Eigen::VectorXd v(1 + n * p);
  v(0) = intercept_var;
  for (int l = 1; l <= p; ++l)
    for (int r = 0; r < n; ++r) v(1 + (l - 1) * n + r) = kappa / (l * l * s2(r));
  return v;
}

Eigen::VectorXd equation_V_alpha(int i, double kappa1, double kappa2, const Eigen::VectorXd& s2, int p,
                                 double intercept_var) {
  const int n = static_cast<int>(s2.size());
  if (i < 0 || i >= n) throw std::invalid_argument("equation_V_alpha: equation index out of range");
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) throw std::domain_error("equation_V_alpha: kappas must be positive");
  check_positive(s2, "equation_V_alpha");
  Eigen::VectorXd v(1 + n * p);
  v(0) = intercept_var * s2(i);
  for (int l = 1; l <= p; ++l)
    for (int j = 0; j < n; ++j) {
      const int idx = 1 + (l - 1) * n + j;
      v(idx) = (j == i) ? kappa1 / (l * l) : kappa2 * s2(i) / (l * l * s2(j));
    }
  return v;
}

Eigen::VectorXd impact_V_beta(int i, double kappa3, const Eigen::VectorXd& s2) {
  if (i < 0 || i >= static_cast<int>(s2.size())) throw std::invalid_argument("impact_V_beta: index out of range");
  if (!(kappa3 > 0.0)) throw std::domain_error("impact_V_beta: kappa3 must be positive");
  check_positive(s2, "impact_V_beta");
  Eigen::VectorXd v(i);
  for (int j = 0; j < i; ++j) v(j) = kappa3 * s2(i) / s2(j);
  return v;
}

ConjugatePrior ConjugatePrior::defaults(const Eigen::VectorXd& s2, int p) {
  ConjugatePrior prior;
  prior.s2 = s2;
  prior.p = p;
  const int n = prior.n();
  prior.A0 = Eigen::MatrixXd::Zero(prior.k(), n);
  prior.nu0 = n + 3.0;
  prior.S0 = (prior.nu0 - n - 1.0) * s2.asDiagonal();
  return prior;
}

Eigen::VectorXd ConjugatePrior::lag_constants() const {
  Eigen::VectorXd c(k() - 1);
  for (int l = 1; l <= p; ++l)
    for (int r = 0; r < n(); ++r) c((l - 1) * n() + r) = 1.0 / (l * l * s2(r));
  return c;
}

EquationPrior EquationPrior::defaults(const Eigen::VectorXd& s2, int p) {
  EquationPrior prior;
  prior.s2 = s2;
  prior.p = p;
  return prior;
}

GigParams kappa_gig_params(const Eigen::VectorXd& resid, const Eigen::VectorXd& C, const GammaHyper& hyper) {
  if (resid.size() == 0) throw std::domain_error("kappa_gig_params: empty coefficient group");
  if (resid.size() != C.size()) throw std::invalid_argument("kappa_gig_params: resid/C misaligned");
  check_positive(C, "kappa_gig_params");
  GigParams out;
  out.p = hyper.shape - 0.5 * static_cast<double>(resid.size());
  out.a = 2.0 * hyper.rate;
  out.b = (resid.array().square() / C.array()).sum();
  return out;
}

GigParams kappa_gig_params_conjugate(const Eigen::MatrixXd& A, const Eigen::MatrixXd& A0, const Eigen::MatrixXd& Sigma,
                                     const Eigen::VectorXd& lag_constants, const GammaHyper& hyper) {
  const int k = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (k - 1 != lag_constants.size()) throw std::invalid_argument("kappa_gig_params_conjugate: constants misaligned");
  if (k <= 1) throw std::domain_error("kappa_gig_params_conjugate: empty coefficient group");
  check_positive(lag_constants, "kappa_gig_params_conjugate");
  Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
  if (llt.info() != Eigen::Success) throw std::runtime_error("kappa_gig_params_conjugate: Sigma not SPD");
  const Eigen::MatrixXd D = A - A0;
  // Q_ii = row_i(D) Sigma^{-1} row_i(D)'
  const Eigen::MatrixXd W = llt.matrixL().solve(D.transpose());  // n x k
  GigParams out;
  out.p = hyper.shape - 0.5 * static_cast<double>((k - 1) * n);
  out.a = 2.0 * hyper.rate;
  out.b = (W.rightCols(k - 1).colwise().squaredNorm().transpose().array() / lag_constants.array()).sum();
  return out;
}

KappaGroupData collect_kappa_group(KappaGroup group, const Eigen::MatrixXd& alpha, const Eigen::VectorXd& s2, int p) {
  const int n = static_cast<int>(alpha.cols());
  if (group != KappaGroup::own && group != KappaGroup::other)
    throw std::invalid_argument("collect_kappa_group: use the impact/conjugate helpers for those groups");
  const bool own = group == KappaGroup::own;
  const int count = own ? n * p : n * (n - 1) * p;
  KappaGroupData out;
  out.resid.resize(count);
  out.C.resize(count);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int l = 1; l <= p; ++l)
      for (int j = 0; j < n; ++j) {
        if ((j == i) != own) continue;
        out.resid(idx) = alpha(1 + (l - 1) * n + j, i);
        out.C(idx) = own ? 1.0 / (l * l) : s2(i) / (l * l * s2(j));
        ++idx;
      }
  return out;
}

KappaGroupData collect_impact_group(const std::vector<Eigen::VectorXd>& beta, const Eigen::VectorXd& s2) {
  const int n = static_cast<int>(beta.size());
  int count = 0;
  for (const auto& row : beta) count += static_cast<int>(row.size());
  KappaGroupData out;
  out.resid.resize(count);
  out.C.resize(count);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < static_cast<int>(beta[i].size()); ++j) {
      out.resid(idx) = beta[i](j);
      out.C(idx) = s2(i) / s2(j);
      ++idx;
    }
  return out;
}

}  // namespace bvarml
