#pragma once

#include "bvarml/chain.hpp"
#include "bvarml/var_data.hpp"

namespace bvarml {

// Rao-Blackwellized log predictive likelihood of the realized y at horizon hz
// from the given origin (0-based row of data.Y; the chain must have been fit
// on rows 0..origin-1). Intermediate observations and volatility paths are
// simulated; the density of the realized point is a Gaussian mixture over
// simulated paths. Returns -inf (flagged by the caller) on total underflow.
double predictive_log_likelihood(const ChainOutput& chain, const VARData& data, int origin, int horizon,
                                 long long path_draws, RngStream& rng);

// Sum of log predictive likelihoods over a recursive evaluation window.
struct ForecastConfig {
  int first_origin = 0;  // 0-based row of data.Y
  int horizon = 1;
  long long path_draws = 5000;
};

struct ForecastResult {
  double sum_log_score = 0.0;
  std::vector<double> per_origin;
  std::vector<int> origins;
};

}  // namespace bvarml
