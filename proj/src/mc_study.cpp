#include "bvarml/mc_study.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "bvarml/ce_fit.hpp"

namespace bvarml {

std::string McCandidate::label() const {
  return model == ModelTag::fsv ? to_string(model) + std::to_string(r) : to_string(model);
}

namespace {

McReplication run_one(const McRunConfig& cfg, int rep, int true_index) {
  McReplication out;
  out.rep = rep;
  RngStream master(cfg.seed);
  RngStream rng = master.substream(static_cast<std::uint64_t>(rep) + 1);
  out.seed = rng.stream();
  try {
    const DgpDraw draw = simulate_dgp(rng, cfg.dgp);
    const Eigen::VectorXd s2 = ar4_residual_variances(draw.panel);
    const VARData data = build_var_data(draw.panel, cfg.dgp.p);
    const PriorBundle priors = PriorBundle::fixed_shrinkage(s2, cfg.dgp.p, cfg.kappa_fixed);

    for (std::size_t c = 0; c < cfg.candidates.size(); ++c) {
      const McCandidate& cand = cfg.candidates[c];
      MLEstimate est;
      if (cand.model == ModelTag::var) {
        est.log_ml = homoskedastic_var_log_ml(data, priors.csv.conj, cfg.kappa_fixed);
      } else {
        RunConfig run;
        run.burn_in = cfg.burn_in;
        run.kept = cfg.kept;
        run.thin = cfg.thin;
        run.seed = rng.substream(100 + c).stream();
        run.model = cand.model;
        run.p = cfg.dgp.p;
        run.r = cand.r;
        const ChainOutput chain = run_chain(cand.model, data, priors, run);
        const ISFamily family = build_is_family(cand.model, chain, /*include_kappa=*/false);
        RngStream is_rng = rng.substream(200 + c);
        est = is_log_ml(cand.model, data, priors, family, cfg.is_draws, is_rng, 1);
      }
      out.estimates.push_back(est);
    }
    out.diff_vs_true.resize(cfg.candidates.size(), 0.0);
    if (true_index >= 0)
      for (std::size_t c = 0; c < cfg.candidates.size(); ++c)
        out.diff_vs_true[c] = out.estimates[c].log_ml - out.estimates[static_cast<std::size_t>(true_index)].log_ml;
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

}  // namespace

McResult run_model_comparison(const McRunConfig& cfg) {
  McResult result;
  result.config = cfg;
  for (std::size_t c = 0; c < cfg.candidates.size(); ++c) {
    const McCandidate& cand = cfg.candidates[c];
    const bool match = cand.model == cfg.dgp.model && (cand.model != ModelTag::fsv || cand.r == cfg.dgp.r);
    if (match) result.true_index = static_cast<int>(c);
  }

  result.replications.resize(cfg.replications);
  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    for (int rep = 0; rep < cfg.replications; ++rep) result.replications[rep] = run_one(cfg, rep, result.true_index);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w]() {
        for (int rep = w; rep < cfg.replications; rep += threads)
          result.replications[rep] = run_one(cfg, rep, result.true_index);
      });
    }
    for (auto& th : pool) th.join();
  }

  result.selection_frequency.assign(cfg.candidates.size(), 0.0);
  int ok = 0;
  for (const auto& rep : result.replications) {
    if (rep.failed) {
      ++result.failures;
      continue;
    }
    ++ok;
    std::size_t best = 0;
    for (std::size_t c = 1; c < rep.estimates.size(); ++c)
      if (rep.estimates[c].log_ml > rep.estimates[best].log_ml) best = c;
    result.selection_frequency[best] += 1.0;
  }
  if (ok > 0)
    for (auto& f : result.selection_frequency) f /= ok;
  if (result.failures > cfg.failure_budget * cfg.replications)
    throw std::runtime_error("run_model_comparison: " + std::to_string(result.failures) +
                             " replication failures exceed the budget");
  return result;
}

McResult factor_count_study(McRunConfig cfg, const std::vector<int>& candidate_rs) {
  cfg.dgp.model = ModelTag::fsv;
  cfg.candidates.clear();
  for (int r : candidate_rs) cfg.candidates.push_back({ModelTag::fsv, r});
  return run_model_comparison(cfg);
}

void write_mc_outputs(const McResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream csv(fs::path(dir) / "mc_results.csv");
    csv << "replication,candidate,log_ml,nse,diff_vs_true\n";
    csv.precision(17);
    for (const auto& rep : result.replications) {
      if (rep.failed) continue;
      for (std::size_t c = 0; c < rep.estimates.size(); ++c) {
        csv << rep.rep << ',' << result.config.candidates[c].label() << ',' << rep.estimates[c].log_ml << ','
            << rep.estimates[c].nse << ',' << rep.diff_vs_true[c] << '\n';
      }
    }
  }
  // Histogram bins of the differences vs the true model, one file per candidate.
  for (std::size_t c = 0; c < result.config.candidates.size(); ++c) {
    if (static_cast<int>(c) == result.true_index) continue;
    std::vector<double> diffs;
    for (const auto& rep : result.replications)
      if (!rep.failed) diffs.push_back(rep.diff_vs_true[c]);
    if (diffs.empty()) continue;
    const auto [lo_it, hi_it] = std::minmax_element(diffs.begin(), diffs.end());
    const double lo = *lo_it, hi = *hi_it;
    const int bins = std::max(5, static_cast<int>(std::sqrt(diffs.size())));
    const double width = (hi - lo) / bins + 1e-12;
    std::vector<int> counts(bins, 0);
    for (double d : diffs) counts[std::min(bins - 1, static_cast<int>((d - lo) / width))]++;
    std::ofstream hist(fs::path(dir) / ("hist_" + result.config.candidates[c].label() + ".csv"));
    hist << "bin_left,bin_right,count\n";
    hist.precision(17);
    for (int b = 0; b < bins; ++b)
      hist << lo + b * width << ',' << lo + (b + 1) * width << ',' << counts[b] << '\n';
  }
}

}  // namespace bvarml
