#include "bvarml/ce_fit.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

#include "bvarml/special.hpp"

namespace bvarml {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

Eigen::VectorXd Ar1GaussianFamily::sample(RngStream& rng) const {
  const int n = T();
  Eigen::VectorXd h(n);
  h(0) = a(0) + std::sqrt(b(0)) * rng.normal();
  for (int t = 1; t < n; ++t) h(t) = a(t) + rho * h(t - 1) + std::sqrt(b(t)) * rng.normal();
  return h;
}

double Ar1GaussianFamily::log_pdf(const Eigen::VectorXd& h) const {
  const int n = T();
  double quad = 0.0, log_det = 0.0;
  for (int t = 0; t < n; ++t) {
    const double r = (t == 0 ? h(0) : h(t) - rho * h(t - 1)) - a(t);
    quad += r * r / b(t);
    log_det += std::log(b(t));
  }
  return -0.5 * (n * kLog2Pi + log_det + quad);
}

Eigen::VectorXd Ar1GaussianFamily::mean() const {
  const int n = T();
  Eigen::VectorXd m(n);
  m(0) = a(0);
  for (int t = 1; t < n; ++t) m(t) = a(t) + rho * m(t - 1);
  return m;
}

double GammaBlock::log_pdf(double x) const { return log_gamma_pdf(x, shape, rate); }

double NormalBlock::log_pdf(double x) const {
  const double d = x - mean;
  return 0.5 * (std::log(prec) - kLog2Pi - prec * d * d);
}

Eigen::VectorXd MvNormalBlock::sample(RngStream& rng) const {
  const int d = dim();
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z(i) = rng.normal();
  if (diagonal) return mean + cov.diagonal().cwiseSqrt().cwiseProduct(z);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::runtime_error("MvNormalBlock: covariance not SPD");
  return mean + llt.matrixL() * z;
}

double MvNormalBlock::log_pdf(const Eigen::VectorXd& x) const {
  if (dim() == 0) return 0.0;
  if (diagonal) {
    double out = 0.0;
    for (int i = 0; i < dim(); ++i) out += log_normal_pdf(x(i), mean(i), cov(i, i));
    return out;
  }
  return log_mvn_pdf_cov(x, mean, cov);
}

int MvNormalBlock::parameter_count() const {
  const int d = dim();
  return diagonal ? 2 * d : d + d * (d + 1) / 2;
}

int ISFamily::parameter_count() const {
  int count = 0;
  for (const auto& blk : h_blocks) count += blk.parameter_count();
  for (const auto& blk : row_blocks) count += blk.parameter_count();
  count += 2 * static_cast<int>(mu_blocks.size());
  count += 2 * static_cast<int>(phi_blocks.size());
  count += 2 * static_cast<int>(kappa_blocks.size());
  return count;
}

Ar1GaussianFamily fit_ar1_family(const Eigen::MatrixXd& draws, bool literal_residual) {
  const int M = static_cast<int>(draws.rows());
  const int T = static_cast<int>(draws.cols());
  if (M < 2 || T < 2) throw std::invalid_argument("fit_ar1_family: need M >= 2 draws and T >= 2 periods");

  const Eigen::VectorXd col_mean = draws.colwise().mean();
  Eigen::VectorXd col_var(T), lag_cov(T);
  for (int t = 0; t < T; ++t) {
    col_var(t) = (draws.col(t).array() - col_mean(t)).square().mean();
    lag_cov(t) = t == 0 ? 0.0
                        : ((draws.col(t).array() - col_mean(t)) * (draws.col(t - 1).array() - col_mean(t - 1))).mean();
  }

  auto b_of_rho = [&](double rho) {
    Eigen::VectorXd b(T);
    b(0) = col_var(0);
    for (int t = 1; t < T; ++t) {
      b(t) = literal_residual ? col_var(t) + rho * rho * col_mean(t - 1) * col_mean(t - 1)
                              : col_var(t) - 2.0 * rho * lag_cov(t) + rho * rho * col_var(t - 1);
      b(t) = std::max(b(t), 0.0);
    }
    return b;
  };
  // Concentrated log-likelihood, up to constants: -(M/2) sum log b_t(rho).
  auto objective = [&](double rho) {
    const Eigen::VectorXd b = b_of_rho(rho);
    if ((b.array() <= 0.0).any()) return -std::numeric_limits<double>::infinity();
    return -0.5 * M * b.array().log().sum();
  };

  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  auto golden_max = [&](double lo, double hi) {
    double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + golden * (hi - lo);
        f2 = objective(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - golden * (hi - lo);
        f1 = objective(x1);
      }
    }
    return 0.5 * (lo + hi);
  };

  const double brackets[4] = {-0.999, -0.333, 0.333, 0.999};
  double best_rho = 0.0, best_val = objective(0.0);
  for (int s = 0; s < 3; ++s) {
    const double cand = golden_max(brackets[s], brackets[s + 1]);
    const double val = objective(cand);
    if (val > best_val) {
      best_val = val;
      best_rho = cand;
    }
  }
  if (!std::isfinite(best_val)) throw std::runtime_error("fit_ar1_family: degenerate draws (zero variance)");

  Ar1GaussianFamily fam;
  fam.rho = best_rho;
  fam.b = b_of_rho(best_rho);
  fam.a.resize(T);
  fam.a(0) = col_mean(0);
  for (int t = 1; t < T; ++t) fam.a(t) = col_mean(t) - best_rho * col_mean(t - 1);
  for (int t = 0; t < T; ++t)
    if (!(fam.b(t) > 1e-12 * (1.0 + fam.a(t) * fam.a(t))))
      throw std::runtime_error("fit_ar1_family: degenerate draws (zero variance) at t = " + std::to_string(t + 1));
  return fam;
}

GammaBlock fit_gamma_ml(const Eigen::VectorXd& draws) {
  const int M = static_cast<int>(draws.size());
  if (M < 10) throw std::invalid_argument("fit_gamma_ml: need at least 10 draws");
  if ((draws.array() <= 0.0).any()) throw std::domain_error("fit_gamma_ml: draws must be positive");
  const double mean = draws.mean();
  const double mean_log = draws.array().log().mean();
  const double s = std::log(mean) - mean_log;
  if (!(s > 1e-12 * (1.0 + std::abs(std::log(mean)))))
    throw std::runtime_error("fit_gamma_ml: degenerate draws (zero variance)");

  double shape = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  for (int it = 0; it < 60; ++it) {
    const double f = std::log(shape) - digamma(shape) - s;
    const double fp = 1.0 / shape - trigamma(shape);
    const double next = shape - f / fp;
    if (!(next > 0.0)) {
      shape *= 0.5;
      continue;
    }
    if (std::abs(next - shape) < 1e-12 * shape) {
      shape = next;
      break;
    }
    shape = next;
  }
  return GammaBlock{shape, shape / mean};
}

NormalBlock fit_normal(const Eigen::VectorXd& draws) {
  if (draws.size() < 2) throw std::invalid_argument("fit_normal: need at least 2 draws");
  const double mean = draws.mean();
  const double var = (draws.array() - mean).square().mean();
  if (!(var > 0.0)) throw std::runtime_error("fit_normal: degenerate draws (zero variance)");
  return NormalBlock{mean, 1.0 / var};
}

MvNormalBlock fit_mv_normal(const Eigen::MatrixXd& draws, int max_full_dim) {
  const int M = static_cast<int>(draws.rows());
  const int d = static_cast<int>(draws.cols());
  MvNormalBlock blk;
  blk.mean = draws.colwise().mean();
  if (d == 0) {
    blk.cov.resize(0, 0);
    return blk;
  }
  if (M < 2) throw std::invalid_argument("fit_mv_normal: need at least 2 draws");
  const Eigen::MatrixXd centered = draws.rowwise() - blk.mean.transpose();
  blk.diagonal = d > max_full_dim;
  if (blk.diagonal) {
    blk.cov = Eigen::MatrixXd(centered.colwise().squaredNorm().asDiagonal()) / M;
  } else {
    blk.cov = centered.transpose() * centered / M;
  }
  if ((blk.cov.diagonal().array() <= 0.0).any())
    throw std::runtime_error("fit_mv_normal: degenerate draws (zero variance)");
  return blk;
}

namespace {

template <class Getter>
Eigen::MatrixXd stack_draws(std::size_t M, int cols, Getter&& get) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(M), cols);
  for (std::size_t m = 0; m < M; ++m) out.row(static_cast<Eigen::Index>(m)) = get(m);
  return out;
}

template <class Getter>
Eigen::VectorXd stack_scalar(std::size_t M, Getter&& get) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(M));
  for (std::size_t m = 0; m < M; ++m) out(static_cast<Eigen::Index>(m)) = get(m);
  return out;
}

}  // namespace

ISFamily build_is_family(ModelTag model, const ChainOutput& chain, bool include_kappa) {
  ISFamily fam;
  fam.model = model;
  const std::size_t M = chain.size();
  if (M < 2) throw std::invalid_argument("build_is_family: chain too short");

  switch (model) {
    case ModelTag::var:
      throw std::invalid_argument("build_is_family: the homoskedastic VAR marginal likelihood is analytic");
    case ModelTag::csv: {
      const auto& draws = chain.csv_draws();
      const int T = static_cast<int>(draws[0].h.size());
      fam.h_blocks.push_back(fit_ar1_family(stack_draws(M, T, [&](std::size_t m) { return draws[m].h.transpose(); })));
      fam.phi_blocks.push_back(fit_normal(stack_scalar(M, [&](std::size_t m) { return draws[m].phi; })));
      if (include_kappa)
        fam.kappa_blocks.push_back(fit_gamma_ml(stack_scalar(M, [&](std::size_t m) { return draws[m].kappa; })));
      break;
    }
    case ModelTag::sv: {
      const auto& draws = chain.sv_draws();
      const int n = static_cast<int>(draws[0].h.rows());
      const int T = static_cast<int>(draws[0].h.cols());
      for (int i = 0; i < n; ++i) {
        fam.h_blocks.push_back(
            fit_ar1_family(stack_draws(M, T, [&](std::size_t m) { return draws[m].h.row(i); })));
        fam.mu_blocks.push_back(fit_normal(stack_scalar(M, [&](std::size_t m) { return draws[m].mu(i); })));
        fam.phi_blocks.push_back(fit_normal(stack_scalar(M, [&](std::size_t m) { return draws[m].phi(i); })));
        fam.row_blocks.push_back(fit_mv_normal(
            stack_draws(M, i, [&](std::size_t m) { return draws[m].beta[i].transpose(); })));
      }
      if (include_kappa) {
        fam.kappa_blocks.push_back(fit_gamma_ml(stack_scalar(M, [&](std::size_t m) { return draws[m].kappa1; })));
        fam.kappa_blocks.push_back(fit_gamma_ml(stack_scalar(M, [&](std::size_t m) { return draws[m].kappa2; })));
        fam.kappa_blocks.push_back(fit_gamma_ml(stack_scalar(M, [&](std::size_t m) { return draws[m].kappa3; })));
      }
      break;
    }
    case ModelTag::fsv: {
      const auto& draws = chain.fsv_draws();
      const int nr = static_cast<int>(draws[0].h.rows());
      const int n = static_cast<int>(draws[0].alpha.cols());
      const int T = static_cast<int>(draws[0].h.cols());
      for (int i = 0; i < nr; ++i) {
        fam.h_blocks.push_back(
            fit_ar1_family(stack_draws(M, T, [&](std::size_t m) { return draws[m].h.row(i); })));
        fam.mu_blocks.push_back(fit_normal(stack_scalar(M, [&](std::size_t m) { return draws[m].mu(i); })));
        fam.phi_blocks.push_back(fit_normal(stack_scalar(M, [&](std::size_t m) { return draws[m].phi(i); })));
      }
      for (int i = 0; i < n; ++i) {
        const int len = static_cast<int>(draws[0].loadings[i].size());
        fam.row_blocks.push_back(
            fit_mv_normal(stack_draws(M, len, [&](std::size_t m) { return draws[m].loadings[i].transpose(); })));
      }
      if (include_kappa) {
        fam.kappa_blocks.push_back(fit_gamma_ml(stack_scalar(M, [&](std::size_t m) { return draws[m].kappa1; })));
        fam.kappa_blocks.push_back(fit_gamma_ml(stack_scalar(M, [&](std::size_t m) { return draws[m].kappa2; })));
      }
      break;
    }
  }
  return fam;
}

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string ISFamily::to_json() const {
  nlohmann::json j;
  j["model"] = bvarml::to_string(model);
  j["h_blocks"] = nlohmann::json::array();
  for (const auto& blk : h_blocks)
    j["h_blocks"].push_back({{"rho", blk.rho}, {"a", vec_to_json(blk.a)}, {"b", vec_to_json(blk.b)}});
  j["row_blocks"] = nlohmann::json::array();
  for (const auto& blk : row_blocks) {
    nlohmann::json r;
    r["mean"] = vec_to_json(blk.mean);
    r["diagonal"] = blk.diagonal;
    std::vector<double> flat(blk.cov.data(), blk.cov.data() + blk.cov.size());
    r["cov"] = flat;
    j["row_blocks"].push_back(r);
  }
  j["mu_blocks"] = nlohmann::json::array();
  for (const auto& blk : mu_blocks) j["mu_blocks"].push_back({{"mean", blk.mean}, {"prec", blk.prec}});
  j["phi_blocks"] = nlohmann::json::array();
  for (const auto& blk : phi_blocks) j["phi_blocks"].push_back({{"mean", blk.mean}, {"prec", blk.prec}});
  j["kappa_blocks"] = nlohmann::json::array();
  for (const auto& blk : kappa_blocks) j["kappa_blocks"].push_back({{"shape", blk.shape}, {"rate", blk.rate}});
  return j.dump(2);
}

ISFamily ISFamily::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ISFamily fam;
  fam.model = model_tag_from_string(j.at("model").get<std::string>());
  for (const auto& r : j.at("h_blocks")) {
    Ar1GaussianFamily blk;
    blk.rho = r.at("rho").get<double>();
    blk.a = vec_from_json(r.at("a"));
    blk.b = vec_from_json(r.at("b"));
    fam.h_blocks.push_back(std::move(blk));
  }
  for (const auto& r : j.at("row_blocks")) {
    MvNormalBlock blk;
    blk.mean = vec_from_json(r.at("mean"));
    blk.diagonal = r.at("diagonal").get<bool>();
    const auto flat = r.at("cov").get<std::vector<double>>();
    const int d = blk.dim();
    blk.cov = Eigen::Map<const Eigen::MatrixXd>(flat.data(), d, d);
    fam.row_blocks.push_back(std::move(blk));
  }
  for (const auto& r : j.at("mu_blocks")) fam.mu_blocks.push_back({r.at("mean").get<double>(), r.at("prec").get<double>()});
  for (const auto& r : j.at("phi_blocks"))
    fam.phi_blocks.push_back({r.at("mean").get<double>(), r.at("prec").get<double>()});
  for (const auto& r : j.at("kappa_blocks"))
    fam.kappa_blocks.push_back({r.at("shape").get<double>(), r.at("rate").get<double>()});
  return fam;
}

}  // namespace bvarml
