#include "bvarml/chain.hpp"

#include <chrono>
#include <stdexcept>

namespace bvarml {

PriorBundle PriorBundle::defaults(const Eigen::VectorXd& s2, int p) {
  PriorBundle b;
  b.csv.conj = ConjugatePrior::defaults(s2, p);
  b.eq = EquationPrior::defaults(s2, p);
  b.csv.vol = b.eq.vol;
  return b;
}

PriorBundle PriorBundle::fixed_shrinkage(const Eigen::VectorXd& s2, int p, double kappa) {
  PriorBundle b = defaults(s2, p);
  b.csv.conj.estimate_kappa = false;
  b.csv.conj.kappa_fixed = kappa;
  b.eq.estimate_kappas = false;
  b.eq.kappa1_fixed = kappa;
  b.eq.kappa2_fixed = kappa;
  b.eq.kappa3_fixed = 1.0;
  return b;
}

namespace {

template <class Sampler, class State>
void run_loop(const Sampler& sampler, const RunConfig& config, std::vector<State>* draws,
              std::map<std::string, double>* tallies, double* sweeps_done) {
  RngStream rng(config.seed);
  State state = sampler.init_state();
  const int total = config.burn_in + config.kept * config.thin;
  draws->reserve(config.kept);
  int sweep = 0;
  try {
    for (; sweep < total; ++sweep) {
      sampler.sweep(rng, state, tallies);
      if (sweep >= config.burn_in && (sweep - config.burn_in) % config.thin == 0) {
#ifndef NDEBUG
        state.validate();
#endif
        draws->push_back(state);
      }
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("chain aborted at sweep " + std::to_string(sweep + 1) + ": " + e.what());
  }
  *sweeps_done = total;
}

}  // namespace

ChainOutput run_chain(ModelTag model, const VARData& data, const PriorBundle& priors, const RunConfig& config) {
  config.validate(data.n);
  ChainOutput out;
  out.model = model;
  out.config = config;
  out.config.model = model;

  std::map<std::string, double> tallies;
  double sweeps = 1.0;
  const auto start = std::chrono::steady_clock::now();
  switch (model) {
    case ModelTag::var:
    case ModelTag::csv: {
      CsvSampler sampler(data, priors.csv, model == ModelTag::csv);
      std::vector<CsvState> draws;
      run_loop(sampler, config, &draws, &tallies, &sweeps);
      out.draws = std::move(draws);
      break;
    }
    case ModelTag::sv: {
      SvSampler sampler(data, priors.eq);
      std::vector<SvState> draws;
      run_loop(sampler, config, &draws, &tallies, &sweeps);
      out.draws = std::move(draws);
      break;
    }
    case ModelTag::fsv: {
      FsvSampler sampler(data, priors.eq, config.r);
      std::vector<FsvState> draws;
      run_loop(sampler, config, &draws, &tallies, &sweeps);
      out.draws = std::move(draws);
      break;
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (auto& [name, count] : tallies) out.acceptance_rates[name] = count / sweeps;
  return out;
}

}  // namespace bvarml
