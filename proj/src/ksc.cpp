#include "bvarml/ksc.hpp"

#include <cmath>

#include "bvarml/banded.hpp"

namespace bvarml {

const double KscMixture::weight[] = {0.00730, 0.10556, 0.00002, 0.04395, 0.34001, 0.24566, 0.25750};
const double KscMixture::mean[] = {-10.12999, -3.97281, -8.56686, 2.77786, 0.61942, 1.79518, -1.08819};
const double KscMixture::var[] = {5.79596, 2.61369, 5.17950, 0.16735, 0.64009, 0.34023, 1.26261};

Eigen::VectorXd ksc_sample_logvol(RngStream& rng, const Eigen::VectorXd& eps, const Eigen::VectorXd& h_current,
                                  double mu, double phi, double sigma2, double offset_c) {
  const int T = static_cast<int>(eps.size());
  Eigen::VectorXd ystar(T);
  for (int t = 0; t < T; ++t) ystar(t) = std::log(eps(t) * eps(t) + offset_c);

  // Mixture indicators given the current path.
  Eigen::VectorXd obs_mean(T), obs_prec(T);
  double w[KscMixture::kComponents];
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < KscMixture::kComponents; ++j) {
      const double m = h_current(t) + KscMixture::mean[j] + KscMixture::kOffset;
      const double d = ystar(t) - m;
      w[j] = KscMixture::weight[j] / std::sqrt(KscMixture::var[j]) * std::exp(-0.5 * d * d / KscMixture::var[j]);
    }
    const int s = rng.categorical(w, KscMixture::kComponents);
    obs_mean(t) = KscMixture::mean[s] + KscMixture::kOffset;
    obs_prec(t) = 1.0 / KscMixture::var[s];
  }

  BandedPrecision K = ar1_precision(T, phi, sigma2);
  Eigen::VectorXd c = ar1_precision_times_mean(K, mu);
  K.add_diagonal(obs_prec);
  c += obs_prec.cwiseProduct(ystar - obs_mean);
  return draw_gaussian_precision(rng, c, K);
}

}  // namespace bvarml
