#include <doctest.h>

#include <cmath>

#include "bvarml/panel.hpp"
#include "bvarml/rng.hpp"
#include "bvarml/states.hpp"
#include "bvarml/var_data.hpp"

using namespace bvarml;

TEST_SUITE_BEGIN("data-model");

TEST_CASE("transform_series") {
  CHECK(transform_series(std::vector<double>{100.0, 101.0}, TransformCode::dlog400)[0] ==
        doctest::Approx(400.0 * std::log(1.01)).epsilon(1e-12));
  const auto id = transform_series(std::vector<double>{5.0, 7.0, 2.0}, TransformCode::none);
  CHECK(id == std::vector<double>{5.0, 7.0, 2.0});
  const auto dd = transform_series(std::vector<double>{1.0, std::exp(1.0), std::exp(3.0)}, TransformCode::d2log);
  REQUIRE(dd.size() == 1);
  CHECK(dd[0] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(transform_series(std::vector<double>{1.0, -2.0, 3.0}, TransformCode::dlog400), std::domain_error);
  // length contraction equals the differencing order
  std::vector<double> raw{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(transform_series(raw, TransformCode::none).size() == 5);
  CHECK(transform_series(raw, TransformCode::dlog400).size() == 4);
  CHECK(transform_series(raw, TransformCode::d2log).size() == 3);
}

TEST_CASE("build_var_data dimensions and lag layout") {
  Panel panel;
  panel.values.resize(10, 2);
  RngStream rng(1);
  for (int t = 0; t < 10; ++t)
    for (int c = 0; c < 2; ++c) panel.values(t, c) = rng.normal();
  panel.names = {"a", "b"};
  panel.transform_codes = {TransformCode::none, TransformCode::none};

  const VARData d = build_var_data(panel, 2);
  CHECK(d.Y.rows() == 8);
  CHECK(d.Y.cols() == 2);
  CHECK(d.X.rows() == 8);
  CHECK(d.X.cols() == 5);
  // row t of X is (1, y_{t-1}', y_{t-2}')
  for (int t = 0; t < 8; ++t) {
    CHECK(d.X(t, 0) == 1.0);
    CHECK(d.X(t, 1) == panel.values(t + 1, 0));
    CHECK(d.X(t, 2) == panel.values(t + 1, 1));
    CHECK(d.X(t, 3) == panel.values(t, 0));
    CHECK(d.X(t, 4) == panel.values(t, 1));
  }
  CHECK_THROWS(build_var_data(panel, 10));

  // constant column: every X row carries the constant
  Panel cpanel;
  cpanel.values = Eigen::MatrixXd::Constant(6, 1, 3.25);
  cpanel.names = {"c"};
  cpanel.transform_codes = {TransformCode::none};
  const VARData cd = build_var_data(cpanel, 1);
  for (int t = 0; t < cd.T; ++t) {
    CHECK(cd.X(t, 0) == 1.0);
    CHECK(cd.X(t, 1) == 3.25);
  }

  // paper-scale dimension arithmetic: 244 x 30 panel, p = 4
  Panel big;
  big.values = Eigen::MatrixXd::Zero(244, 30);
  for (int t = 0; t < 244; ++t)
    for (int c = 0; c < 30; ++c) big.values(t, c) = rng.normal();
  big.names.assign(30, "x");
  big.transform_codes.assign(30, TransformCode::none);
  const VARData bd = build_var_data(big, 4);
  CHECK(bd.Y.rows() == 240);
  CHECK(bd.Y.cols() == 30);
  CHECK(bd.X.rows() == 240);
  CHECK(bd.X.cols() == 121);
}

TEST_CASE("build_var_data OLS matches dense least-squares oracle") {
  RngStream rng(2);
  Panel panel;
  const int rows = 40, n = 5, p = 1;
  panel.values.resize(rows, n);
  for (int t = 0; t < rows; ++t)
    for (int c = 0; c < n; ++c) panel.values(t, c) = rng.normal();
  panel.names.assign(n, "v");
  panel.transform_codes.assign(n, TransformCode::none);
  const VARData d = build_var_data(panel, p);

  // dense oracle: lstsq of column i of Y on the raw lagged values
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd Xo(d.T, 1 + n * p);
    Xo.col(0).setOnes();
    for (int t = 0; t < d.T; ++t)
      for (int j = 0; j < n; ++j) Xo(t, 1 + j) = panel.values(t + p - 1, j);
    const Eigen::VectorXd oracle = (Xo.transpose() * Xo).ldlt().solve(Xo.transpose() * d.Y.col(i));
    const Eigen::VectorXd fitted = (d.X.transpose() * d.X).ldlt().solve(d.X.transpose() * d.Y.col(i));
    CHECK((oracle - fitted).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("ar4_residual_variances") {
  RngStream rng(3);
  // white noise, variance 1: consistent estimate
  Eigen::VectorXd wn(5000);
  for (int t = 0; t < 5000; ++t) wn(t) = rng.normal();
  const double s2 = ar4_residual_variance(wn);
  CHECK(s2 > 0.9);
  CHECK(s2 < 1.1);

  // exact AR(4) recurrence with zero innovation variance: residual variance 0
  Eigen::VectorXd exact(60);
  exact(0) = 1.0;
  exact(1) = 0.5;
  exact(2) = -0.3;
  exact(3) = 0.8;
  for (int t = 4; t < 60; ++t)
    exact(t) = 0.1 + 0.4 * exact(t - 1) - 0.2 * exact(t - 2) + 0.1 * exact(t - 3) + 0.05 * exact(t - 4);
  CHECK(ar4_residual_variance(exact) == doctest::Approx(0.0).epsilon(1e-12));

  // constant column: collinear with the intercept
  CHECK_THROWS(ar4_residual_variance(Eigen::VectorXd::Constant(50, 2.0)));
  // too short
  CHECK_THROWS(ar4_residual_variance(Eigen::VectorXd::Ones(6)));
}

TEST_CASE("state invariant validation") {
  CsvState s;
  s.A = Eigen::MatrixXd::Zero(3, 2);
  s.Sigma = Eigen::MatrixXd::Identity(2, 2);
  s.h = Eigen::VectorXd::Zero(5);
  s.phi = 0.9;
  s.sigma2 = 0.1;
  s.kappa = 0.04;
  CHECK_NOTHROW(s.validate());
  s.phi = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.phi = 0.9;
  s.sigma2 = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.sigma2 = 0.1;
  s.Sigma(0, 1) = s.Sigma(1, 0) = 2.0;  // not SPD
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  SvState sv;
  sv.alpha = Eigen::MatrixXd::Zero(3, 2);
  sv.beta = {Eigen::VectorXd(0), Eigen::VectorXd::Zero(1)};
  sv.h = Eigen::MatrixXd::Zero(2, 5);
  sv.mu = Eigen::VectorXd::Zero(2);
  sv.phi = Eigen::VectorXd::Constant(2, 0.9);
  sv.sigma2 = Eigen::VectorXd::Constant(2, 0.1);
  sv.kappa1 = sv.kappa2 = sv.kappa3 = 0.04;
  CHECK_NOTHROW(sv.validate());
  sv.beta[1].resize(2);  // wrong triangular shape
  CHECK_THROWS_AS(sv.validate(), std::invalid_argument);

  FsvState fsv;
  fsv.alpha = Eigen::MatrixXd::Zero(3, 5);
  fsv.loadings.resize(5);
  for (int i = 0; i < 5; ++i) fsv.loadings[i] = Eigen::VectorXd::Zero(std::min(i, 2));
  fsv.f = Eigen::MatrixXd::Zero(2, 5);
  fsv.h = Eigen::MatrixXd::Zero(7, 5);
  fsv.mu = Eigen::VectorXd::Zero(7);
  fsv.phi = Eigen::VectorXd::Constant(7, 0.9);
  fsv.sigma2 = Eigen::VectorXd::Constant(7, 0.1);
  fsv.kappa1 = fsv.kappa2 = 0.04;
  CHECK_NOTHROW(fsv.validate());
  fsv.f.resize(3, 5);  // r = 3 > (n-1)/2 = 2
  fsv.h.resize(8, 5);
  fsv.mu = Eigen::VectorXd::Zero(8);
  fsv.phi = Eigen::VectorXd::Constant(8, 0.9);
  fsv.sigma2 = Eigen::VectorXd::Constant(8, 0.1);
  CHECK_THROWS_AS(fsv.validate(), std::invalid_argument);
}

TEST_CASE("panel presets") {
  const auto p7 = panel_preset(7);
  REQUIRE(p7.size() == 7);
  CHECK(p7[0].name == "real_gdp");
  CHECK(p7[1].name == "industrial_production");
  CHECK(p7[2].name == "unemployment_rate");
  CHECK(p7[2].transform == TransformCode::none);
  CHECK(p7[3].name == "cpi_all_items");
  CHECK(p7[4].name == "real_hourly_earnings_manufacturing");
  CHECK(p7[5].name == "fed_funds_rate");
  CHECK(p7[6].name == "treasury_10y");
  CHECK(panel_preset(15).size() == 15);
  CHECK(panel_preset(30).size() == 30);
  // 7-variable list is a prefix-ordered subset of the 15 and 30 lists
  const auto p30 = panel_preset(30);
  CHECK(p30[28].transform == TransformCode::d2log);
  CHECK_THROWS(panel_preset(8));
}

TEST_SUITE_END();
