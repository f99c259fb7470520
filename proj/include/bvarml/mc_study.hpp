#pragma once

#include <string>
#include <vector>

#include "bvarml/dgp.hpp"
#include "bvarml/ml.hpp"

namespace bvarml {

struct McCandidate {
  ModelTag model = ModelTag::csv;
  int r = 1;  // FSV factor count

  std::string label() const;
};

struct McRunConfig {
  DgpConfig dgp;
  std::vector<McCandidate> candidates;
  int replications = 20;
  int burn_in = 1000;
  int kept = 5000;
  int thin = 1;
  long long is_draws = 5000;
  std::uint64_t seed = 1;
  int threads = 1;
  double kappa_fixed = 0.04;  // shrinkage held fixed inside Monte Carlo runs
  double failure_budget = 0.10;
};

struct McReplication {
  int rep = 0;
  std::uint64_t seed = 0;
  std::vector<MLEstimate> estimates;  // one per candidate
  std::vector<double> diff_vs_true;   // candidate log-ML minus true-model log-ML
  bool failed = false;
  std::string error;
};

struct McResult {
  McRunConfig config;
  int true_index = -1;  // index of the true model among the candidates, -1 if absent
  std::vector<McReplication> replications;
  std::vector<double> selection_frequency;  // per candidate, over successful replications
  int failures = 0;

  double true_model_win_rate() const { return true_index < 0 ? 0.0 : selection_frequency[true_index]; }
};

// Simulate `replications` datasets from the DGP, fit every candidate model and
// estimate its log marginal likelihood; per-replication failures are recorded
// (fatal only above the failure budget). Replications run in parallel on
// independent streams and aggregate by replication id.
McResult run_model_comparison(const McRunConfig& config);

// Factor-count recovery: FSV candidates r in `candidate_rs` against an FSV DGP.
McResult factor_count_study(McRunConfig config, const std::vector<int>& candidate_rs = {2, 3, 4});

// Tidy CSV (replication, candidate, log_ml, nse, diff_vs_true) plus per-candidate
// histogram bin files for plotting, written under `dir`.
void write_mc_outputs(const McResult& result, const std::string& dir);

}  // namespace bvarml
