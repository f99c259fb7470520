#include <doctest.h>

#include "bvarml/minnesota.hpp"
#include "bvarml/rng.hpp"

using namespace bvarml;

TEST_SUITE_BEGIN("minnesota");

TEST_CASE("conjugate_V_A") {
  Eigen::VectorXd s2 = Eigen::VectorXd::Ones(2);
  const Eigen::VectorXd v = conjugate_V_A(0.04, s2, 1, 2);
  REQUIRE(v.size() == 3);
  CHECK(v(0) == 100.0);
  CHECK(v(1) == doctest::Approx(0.04));
  CHECK(v(2) == doctest::Approx(0.04));

  // lag-2 entry of a variable with s2 = 4 under kappa = 0.2^2
  Eigen::VectorXd s2b(2);
  s2b << 1.0, 4.0;
  const Eigen::VectorXd vb = conjugate_V_A(0.04, s2b, 2, 2);
  REQUIRE(vb.size() == 5);
  CHECK(vb(4) == doctest::Approx(0.04 / (4.0 * 4.0)));  // lag 2, variable 2
  CHECK(conjugate_V_A(0.1, Eigen::VectorXd::Ones(3), 4, 3).size() == 13);
}

TEST_CASE("equation_V_alpha own, other and intercept entries") {
  Eigen::VectorXd s2(2);
  s2 << 2.0, 8.0;
  const Eigen::VectorXd v = equation_V_alpha(0, 0.04, 0.0016, s2, 2);
  REQUIRE(v.size() == 5);
  CHECK(v(0) == doctest::Approx(100.0 * 2.0));
  CHECK(v(1) == doctest::Approx(0.04));                          // own lag 1
  CHECK(v(2) == doctest::Approx(0.0016 * 2.0 / (1.0 * 8.0)));    // other lag 1
  CHECK(v(3) == doctest::Approx(0.04 / 4.0));                    // own lag 2
  CHECK(v(4) == doctest::Approx(0.0016 * 2.0 / (4.0 * 8.0)));    // other lag 2 -> 0.0001

  // symmetric mode with equal scales reproduces the conjugate pattern off the intercept
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
  const Eigen::VectorXd conj = conjugate_V_A(0.04, ones, 3, 3);
  for (int i = 0; i < 3; ++i) {
    const Eigen::VectorXd eq = equation_V_alpha(i, 0.04, 0.04, ones, 3);
    for (int j = 1; j < eq.size(); ++j) CHECK(eq(j) == doctest::Approx(conj(j)).epsilon(1e-14));
  }
}

TEST_CASE("impact_V_beta") {
  Eigen::VectorXd s2(3);
  s2 << 1.0, 2.0, 4.0;
  CHECK(impact_V_beta(0, 0.5, s2).size() == 0);
  const Eigen::VectorXd v1 = impact_V_beta(1, 1.0, Eigen::VectorXd::Ones(2));
  REQUIRE(v1.size() == 1);
  CHECK(v1(0) == doctest::Approx(1.0));
  const Eigen::VectorXd v2 = impact_V_beta(2, 0.5, s2);
  REQUIRE(v2.size() == 2);
  CHECK(v2(0) == doctest::Approx(0.5 * 4.0 / 1.0));
  CHECK(v2(1) == doctest::Approx(0.5 * 4.0 / 2.0));
}

TEST_CASE("kappa_gig_params group counts and zero-sum case") {
  const int n = 2, p = 1;
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Zero(1 + n * p, n);
  Eigen::VectorXd s2 = Eigen::VectorXd::Ones(n);
  const KappaGroupData own = collect_kappa_group(KappaGroup::own, alpha, s2, p);
  const KappaGroupData other = collect_kappa_group(KappaGroup::other, alpha, s2, p);
  CHECK(own.resid.size() == n * p);
  CHECK(other.resid.size() == n * (n - 1) * p);
  CHECK(own.resid.size() + other.resid.size() == n * n * p);

  const GammaHyper hyper{2.0, 3.0};
  const GigParams g = kappa_gig_params(own.resid, own.C, hyper);
  CHECK(g.p == doctest::Approx(2.0 - 0.5 * n * p));
  CHECK(g.a == doctest::Approx(6.0));
  CHECK(g.b == doctest::Approx(0.0));  // coefficients at their prior means

  CHECK_THROWS_AS(kappa_gig_params(Eigen::VectorXd(), Eigen::VectorXd(), hyper), std::domain_error);
}

TEST_CASE("conjugate kappa GIG parameters match a dense oracle") {
  RngStream rng(5);
  const int n = 2, p = 1, k = 1 + n * p;
  Eigen::MatrixXd A(k, n), A0 = Eigen::MatrixXd::Zero(k, n);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
  Eigen::MatrixXd Sigma(n, n);
  Sigma << 2.0, 0.3, 0.3, 1.0;
  Eigen::VectorXd s2(n);
  s2 << 1.5, 0.7;

  ConjugatePrior prior = ConjugatePrior::defaults(s2, p);
  const GammaHyper hyper{1.0, 25.0};
  const GigParams g = kappa_gig_params_conjugate(A, A0, Sigma, prior.lag_constants(), hyper);

  // dense oracle: Q = (A - A0) Sigma^{-1} (A - A0)', b = sum_{i>=2} Q_ii / C_i
  const Eigen::MatrixXd Q = (A - A0) * Sigma.inverse() * (A - A0).transpose();
  const Eigen::VectorXd C = prior.lag_constants();
  double b_oracle = 0.0;
  for (int i = 1; i < k; ++i) b_oracle += Q(i, i) / C(i - 1);
  CHECK(g.b == doctest::Approx(b_oracle).epsilon(1e-12));
  CHECK(g.p == doctest::Approx(1.0 - 0.5 * (k - 1) * n));
  CHECK(g.a == doctest::Approx(50.0));
}

TEST_CASE("symmetric-mode invariance when scales are equal") {
  // with all s2 equal, own and other entries swap cleanly under kappa1 = kappa2
  Eigen::VectorXd s2 = Eigen::VectorXd::Constant(3, 2.0);
  const Eigen::VectorXd v0 = equation_V_alpha(0, 0.09, 0.09, s2, 2);
  const Eigen::VectorXd v1 = equation_V_alpha(1, 0.09, 0.09, s2, 2);
  for (int j = 1; j < v0.size(); ++j) CHECK(v0(j) == doctest::Approx(v1(j)).epsilon(1e-14));
}

TEST_SUITE_END();
