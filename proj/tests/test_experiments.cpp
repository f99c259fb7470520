#include <doctest.h>

#include <cmath>

#include "bvarml/dgp.hpp"
#include "bvarml/forecast.hpp"
#include "bvarml/mc_study.hpp"
#include "bvarml/ml.hpp"

using namespace bvarml;

TEST_SUITE_BEGIN("experiments");

TEST_CASE("simulate_dgp shapes, stability and volatility autocorrelation") {
  RngStream rng(501);
  DgpConfig cfg;
  cfg.model = ModelTag::csv;
  cfg.n = 4;
  cfg.T = 120;
  cfg.p = 2;
  const DgpDraw draw = simulate_dgp(rng, cfg);
  CHECK(draw.panel.rows() == 120);
  CHECK(draw.panel.cols() == 4);
  const CsvState& s = std::get<CsvState>(draw.truth);
  CHECK(companion_spectral_radius(s.A, 4, 2) < 0.999);

  // degenerate volatility: phi = 0, sigma2 = 0 gives homoskedastic data
  DgpConfig flat = cfg;
  flat.phi = 0.0;
  flat.sigma2 = 0.0;
  const DgpDraw hdraw = simulate_dgp(rng, flat);
  CHECK(std::get<CsvState>(hdraw.truth).h.cwiseAbs().maxCoeff() == 0.0);

  // lag-1 autocorrelation of a long simulated volatility path is close to 0.98
  DgpConfig longcfg;
  longcfg.model = ModelTag::csv;
  longcfg.n = 2;
  longcfg.T = 10000;
  longcfg.p = 1;
  const DgpDraw ldraw = simulate_dgp(rng, longcfg);
  const Eigen::VectorXd h = std::get<CsvState>(ldraw.truth).h;
  const double mean = h.mean();
  double c0 = 0.0, c1 = 0.0;
  for (int t = 0; t < h.size(); ++t) {
    c0 += (h(t) - mean) * (h(t) - mean);
    if (t > 0) c1 += (h(t) - mean) * (h(t - 1) - mean);
  }
  CHECK(c1 / c0 == doctest::Approx(0.98).epsilon(0.02));
}

TEST_CASE("simulate_dgp covers all models and the noisy variant") {
  RngStream rng(502);
  for (ModelTag tag : {ModelTag::var, ModelTag::sv, ModelTag::fsv}) {
    DgpConfig cfg;
    cfg.model = tag;
    cfg.n = 7;
    cfg.T = 60;
    cfg.p = 2;
    cfg.r = 3;
    const DgpDraw draw = simulate_dgp(rng, cfg);
    CHECK(draw.panel.rows() == 60);
    CHECK(draw.panel.cols() == 7);
    if (tag == ModelTag::sv) CHECK(std::get<SvState>(draw.truth).mu(0) == doctest::Approx(-1.0));
    if (tag == ModelTag::fsv) {
      const FsvState& s = std::get<FsvState>(draw.truth);
      CHECK(s.mu(0) == doctest::Approx(-1.0));
      CHECK(s.mu(7) == doctest::Approx(0.0));  // factor volatility mean
      CHECK(s.loading_matrix().rows() == 7);
    }
  }
  DgpConfig noisy;
  noisy.model = ModelTag::sv;
  noisy.n = 3;
  noisy.T = 40;
  noisy.noise_scale = 10.0;
  const DgpDraw draw = simulate_dgp(rng, noisy);
  CHECK(std::get<SvState>(draw.truth).mu(0) == doctest::Approx(1.3));
}

TEST_CASE("run_model_comparison structure on a tiny study") {
  McRunConfig mc;
  mc.dgp.model = ModelTag::csv;
  mc.dgp.n = 3;
  mc.dgp.T = 60;
  mc.dgp.p = 1;
  mc.candidates = {{ModelTag::var, 1}, {ModelTag::csv, 1}};
  mc.replications = 2;
  mc.burn_in = 100;
  mc.kept = 400;
  mc.is_draws = 400;
  mc.seed = 7;
  const McResult result = run_model_comparison(mc);
  CHECK(result.true_index == 1);
  CHECK(result.replications.size() == 2);
  CHECK(result.failures == 0);
  double total = 0.0;
  for (double f : result.selection_frequency) total += f;
  CHECK(total == doctest::Approx(1.0));
  for (const auto& rep : result.replications) {
    CHECK(rep.estimates.size() == 2);
    CHECK(rep.diff_vs_true[1] == 0.0);
    CHECK(std::isfinite(rep.estimates[0].log_ml));
  }
  // replications are independently seeded and re-runnable
  const McResult again = run_model_comparison(mc);
  CHECK(again.replications[0].estimates[1].log_ml == result.replications[0].estimates[1].log_ml);
}

TEST_CASE("factor_count_study wires FSV candidates") {
  McRunConfig mc;
  mc.dgp.n = 5;
  mc.dgp.T = 50;
  mc.dgp.p = 1;
  mc.dgp.r = 2;
  mc.replications = 1;
  mc.burn_in = 60;
  mc.kept = 200;
  mc.is_draws = 200;
  mc.seed = 11;
  const McResult result = factor_count_study(mc, {1, 2});
  CHECK(result.config.candidates.size() == 2);
  CHECK(result.true_index == 1);
  CHECK(result.replications.size() == 1);
  CHECK(result.replications[0].estimates.size() == 2);
}

TEST_CASE("predictive likelihood matches the analytic matrix-t predictive for the homoskedastic VAR") {
  RngStream rng(503);
  DgpConfig cfg;
  cfg.model = ModelTag::var;
  cfg.n = 2;
  cfg.T = 80;
  cfg.p = 1;
  const DgpDraw draw = simulate_dgp(rng, cfg);
  const VARData full = build_var_data(draw.panel, 1);

  const int origin = full.T - 1;  // predict the final observation
  Panel sub = draw.panel;
  sub.values = draw.panel.values.topRows(1 + origin);
  const VARData fit_data = build_var_data(sub, 1);
  const Eigen::VectorXd s2 = ar4_residual_variances(sub);
  PriorBundle priors = PriorBundle::fixed_shrinkage(s2, 1, 0.04);

  // analytic predictive density: the ratio of marginal likelihoods
  const double oracle =
      homoskedastic_var_log_ml(full, priors.csv.conj, 0.04) - homoskedastic_var_log_ml(fit_data, priors.csv.conj, 0.04);

  RunConfig rc;
  rc.burn_in = 200;
  rc.kept = 2000;
  rc.seed = 21;
  rc.model = ModelTag::var;
  rc.p = 1;
  const ChainOutput chain = run_chain(ModelTag::var, fit_data, priors, rc);

  RngStream r2(22);
  std::vector<double> reps;
  for (int b = 0; b < 5; ++b) reps.push_back(predictive_log_likelihood(chain, full, origin, 1, 4000, r2));
  double mean = 0.0, var = 0.0;
  for (double v : reps) mean += v;
  mean /= reps.size();
  for (double v : reps) var += (v - mean) * (v - mean);
  var /= (reps.size() - 1);
  const double se = std::sqrt(var / reps.size() + 1e-12);
  CHECK(std::abs(mean - oracle) < 3.0 * se + 0.02);
}

TEST_CASE("predictive likelihood is finite and large for a near-deterministic model") {
  RngStream rng(504);
  Panel panel;
  panel.values.resize(30, 1);
  for (int t = 0; t < 30; ++t) panel.values(t, 0) = 0.001 * rng.normal();
  panel.names = {"v"};
  panel.transform_codes = {TransformCode::none};
  const VARData full = build_var_data(panel, 1);

  ChainOutput chain;
  chain.model = ModelTag::var;
  CsvState s;
  s.A = Eigen::MatrixXd::Zero(2, 1);
  s.Sigma = Eigen::MatrixXd::Constant(1, 1, 1e-6);
  s.h = Eigen::VectorXd::Zero(full.T - 1);
  s.phi = 0.9;
  s.sigma2 = 0.01;
  s.kappa = 0.04;
  chain.draws = std::vector<CsvState>{s};
  chain.config.kept = 1;

  RngStream r2(19);
  const double lp = predictive_log_likelihood(chain, full, full.T - 1, 1, 100, r2);
  CHECK(std::isfinite(lp));
  CHECK(lp > 3.0);  // density spike on a tiny-variance model
}

TEST_CASE("predictive likelihood multi-step horizon runs") {
  RngStream rng(505);
  DgpConfig cfg;
  cfg.model = ModelTag::csv;
  cfg.n = 2;
  cfg.T = 60;
  cfg.p = 1;
  const DgpDraw draw = simulate_dgp(rng, cfg);
  const VARData full = build_var_data(draw.panel, 1);
  Panel sub = draw.panel;
  sub.values = draw.panel.values.topRows(1 + full.T - 4);
  const VARData fit_data = build_var_data(sub, 1);
  const PriorBundle priors = PriorBundle::fixed_shrinkage(ar4_residual_variances(sub), 1, 0.04);
  RunConfig rc;
  rc.burn_in = 100;
  rc.kept = 300;
  rc.seed = 23;
  rc.model = ModelTag::csv;
  rc.p = 1;
  const ChainOutput chain = run_chain(ModelTag::csv, fit_data, priors, rc);
  RngStream r2(24);
  const double lp = predictive_log_likelihood(chain, full, full.T - 4, 4, 2000, r2);
  CHECK(std::isfinite(lp));
}

TEST_SUITE_END();
