#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>

#include "bvarml/ce_fit.hpp"
#include "bvarml/chain.hpp"
#include "bvarml/config.hpp"
#include "bvarml/criteria.hpp"
#include "bvarml/csv_io.hpp"
#include "bvarml/dgp.hpp"
#include "bvarml/forecast.hpp"
#include "bvarml/manifest.hpp"
#include "bvarml/mc_study.hpp"
#include "bvarml/ml.hpp"
#include "bvarml/special.hpp"

namespace fs = std::filesystem;
using namespace bvarml;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::string model_override;
  std::string preset_override;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int threads = 1;
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

DgpConfig dgp_from_config(const Config& cfg, const std::string& section) {
  DgpConfig d;
  d.model = model_tag_from_string(cfg.get_string(section + ".model", "csv"));
  d.n = static_cast<int>(cfg.get_int(section + ".n", 10));
  d.T = static_cast<int>(cfg.get_int(section + ".T", 400));
  d.p = static_cast<int>(cfg.get_int(section + ".p", 2));
  d.r = static_cast<int>(cfg.get_int(section + ".r", 3));
  d.phi = cfg.get_double(section + ".phi", 0.98);
  d.sigma2 = cfg.get_double(section + ".sigma2", 0.1);
  d.mu = cfg.get_double(section + ".mu", -1.0);
  d.noise_scale = cfg.get_double(section + ".noise_scale", 1.0);
  return d;
}

Panel load_panel(const Config& cfg, const CliOptions& opt) {
  const std::string source = cfg.get_string("data.source", "csv");
  if (source == "simulate") {
    RngStream rng(static_cast<std::uint64_t>(cfg.get_int("data.seed", 1)));
    return simulate_dgp(rng, dgp_from_config(cfg, "data")).panel;
  }
  if (source != "csv") throw ConfigError("data.source must be 'csv' or 'simulate'");
  IngestSpec spec;
  const std::string preset = !opt.preset_override.empty() ? opt.preset_override : cfg.get_string("data.preset", "custom");
  if (preset == "custom") {
    spec.preset = 0;
    for (const std::string& key : cfg.keys_with_prefix("data.transforms.")) {
      const std::string name = key.substr(std::string("data.transforms.").size());
      spec.custom.push_back({name, transform_code_from_string(cfg.get_string(key))});
    }
  } else {
    spec.preset = static_cast<int>(std::stoll(preset));
  }
  for (const std::string& key : cfg.keys_with_prefix("data.columns.")) {
    const std::string name = key.substr(std::string("data.columns.").size());
    spec.column_map[name] = cfg.get_string(key);
  }
  return ingest_csv(cfg.get_string("data.path"), spec);
}

PriorBundle priors_from_config(const Config& cfg, const Eigen::VectorXd& s2, int p) {
  PriorBundle b = PriorBundle::defaults(s2, p);
  b.eq.mode = prior_mode_from_string(cfg.get_string("prior.mode", "asymmetric"));
  b.csv.conj.estimate_kappa = cfg.get_bool("prior.estimate_kappa", true);
  b.eq.estimate_kappas = cfg.get_bool("prior.estimate_kappa", true);
  b.csv.conj.kappa_fixed = cfg.get_double("prior.kappa_fixed", 0.04);
  b.eq.kappa1_fixed = cfg.get_double("prior.kappa1_fixed", 0.04);
  b.eq.kappa2_fixed = cfg.get_double("prior.kappa2_fixed", 0.0016);
  b.eq.kappa3_fixed = cfg.get_double("prior.kappa3_fixed", 1.0);
  b.csv.conj.kappa_hyper = {cfg.get_double("prior.kappa_shape", 1.0), cfg.get_double("prior.kappa_rate", 25.0)};
  b.eq.k1_hyper = {cfg.get_double("prior.kappa1_shape", 1.0), cfg.get_double("prior.kappa1_rate", 25.0)};
  b.eq.k2_hyper = {cfg.get_double("prior.kappa2_shape", 1.0), cfg.get_double("prior.kappa2_rate", 625.0)};
  b.eq.k3_hyper = {cfg.get_double("prior.kappa3_shape", 1.0), cfg.get_double("prior.kappa3_rate", 1.0)};
  VolPrior vol;
  vol.mu0 = cfg.get_double("prior.mu0", 0.0);
  vol.V_mu = cfg.get_double("prior.V_mu", 10.0);
  vol.phi0 = cfg.get_double("prior.phi0", 0.97);
  vol.V_phi = cfg.get_double("prior.V_phi", 0.01);
  vol.nu = cfg.get_double("prior.nu_sigma2", 5.0);
  vol.S = cfg.get_double("prior.S_sigma2", 0.4);
  b.eq.vol = vol;
  b.csv.vol = vol;
  if (cfg.has("prior.nu0")) {
    const int n = static_cast<int>(s2.size());
    b.csv.conj.nu0 = cfg.get_double("prior.nu0");
    b.csv.conj.S0 = (b.csv.conj.nu0 - n - 1.0) * s2.asDiagonal();
  }
  return b;
}

RunConfig run_from_config(const Config& cfg, const CliOptions& opt) {
  RunConfig run;
  run.burn_in = static_cast<int>(cfg.get_int("run.burn_in", 1000));
  run.kept = static_cast<int>(cfg.get_int("run.kept", 20000));
  run.thin = static_cast<int>(cfg.get_int("run.thin", 1));
  run.seed = opt.seed_set ? opt.seed_override : static_cast<std::uint64_t>(cfg.get_int("run.seed", 1));
  const std::string model = !opt.model_override.empty() ? opt.model_override : cfg.get_string("run.model", "csv");
  run.model = model_tag_from_string(model);
  run.p = static_cast<int>(cfg.get_int("run.p", 4));
  run.r = static_cast<int>(cfg.get_int("run.r", 1));
  return run;
}

nlohmann::json ml_to_json(const MLEstimate& est, ModelTag model, int n, int r) {
  nlohmann::json j;
  j["model"] = to_string(model);
  if (model == ModelTag::fsv) j["r"] = r;
  j["n"] = n;
  j["log_ml"] = est.log_ml;
  j["nse"] = est.nse;
  j["R"] = est.R;
  j["ess"] = est.ess;
  return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_run_meta(const std::string& path, const ChainOutput& chain) {
  nlohmann::json j;
  j["model"] = to_string(chain.model);
  j["burn_in"] = chain.config.burn_in;
  j["kept"] = chain.config.kept;
  j["thin"] = chain.config.thin;
  j["seed"] = chain.config.seed;
  j["p"] = chain.config.p;
  if (chain.model == ModelTag::fsv) j["r"] = chain.config.r;
  j["acceptance_rates"] = chain.acceptance_rates;
  j["seconds"] = chain.seconds;
  write_json(path, j);
}

int cmd_simulate(const Config& cfg, const CliOptions& opt, RunManifest& manifest) {
  DgpConfig d = dgp_from_config(cfg, "simulate");
  const std::uint64_t seed = opt.seed_set ? opt.seed_override : static_cast<std::uint64_t>(cfg.get_int("simulate.seed", 1));
  RngStream rng(seed);
  const DgpDraw draw = simulate_dgp(rng, d);
  const std::string panel_path = (fs::path(opt.out_dir) / "panel.csv").string();
  write_panel_csv(panel_path, draw.panel);

  ChainOutput truth;
  truth.model = d.model;
  truth.config.kept = 1;
  switch (d.model) {
    case ModelTag::var:
    case ModelTag::csv: truth.draws = std::vector<CsvState>{std::get<CsvState>(draw.truth)}; break;
    case ModelTag::sv: truth.draws = std::vector<SvState>{std::get<SvState>(draw.truth)}; break;
    case ModelTag::fsv: truth.draws = std::vector<FsvState>{std::get<FsvState>(draw.truth)}; break;
  }
  const std::string truth_path = (fs::path(opt.out_dir) / "truth.csv").string();
  write_chain_csv(truth_path, truth);
  manifest.seed = seed;
  manifest.outputs = {panel_path, truth_path};
  return 0;
}

struct FittedModel {
  Panel panel;
  VARData data;
  PriorBundle priors;
  ChainOutput chain;
};

FittedModel fit_from_config(const Config& cfg, const CliOptions& opt, RunManifest& manifest) {
  FittedModel f;
  f.panel = load_panel(cfg, opt);
  RunConfig run = run_from_config(cfg, opt);
  manifest.seed = run.seed;
  const Eigen::VectorXd s2 = ar4_residual_variances(f.panel);
  f.data = build_var_data(f.panel, run.p);
  f.priors = priors_from_config(cfg, s2, run.p);
  f.chain = run_chain(run.model, f.data, f.priors, run);
  return f;
}

int cmd_estimate(const Config& cfg, const CliOptions& opt, RunManifest& manifest) {
  Timer t;
  FittedModel f = fit_from_config(cfg, opt, manifest);
  const std::string draws_path = (fs::path(opt.out_dir) / "draws.csv").string();
  const std::string meta_path = (fs::path(opt.out_dir) / "run_meta.json").string();
  write_chain_csv(draws_path, f.chain);
  write_run_meta(meta_path, f.chain);
  manifest.outputs = {draws_path, meta_path};
  manifest.timings_seconds["estimate"] = t.seconds();
  return 0;
}

int cmd_ml(const Config& cfg, const CliOptions& opt, RunManifest& manifest) {
  Timer t;
  FittedModel f = fit_from_config(cfg, opt, manifest);
  manifest.timings_seconds["chain"] = t.seconds();

  const long long R = cfg.get_int("ml.is_draws", 10000);
  MLEstimate est;
  ISFamily family;
  const bool include_kappa = f.priors.csv.conj.estimate_kappa;
  if (f.chain.model == ModelTag::var) {
    RngStream rng(f.chain.config.seed + 1);
    family.model = ModelTag::var;
    est = is_log_ml(ModelTag::var, f.data, f.priors, family, R, rng, opt.threads);
  } else {
    Timer t_fit;
    family = build_is_family(f.chain.model, f.chain, include_kappa);
    manifest.timings_seconds["ce_fit"] = t_fit.seconds();
    const std::string fam_path = (fs::path(opt.out_dir) / "is_family.json").string();
    std::ofstream(fam_path) << family.to_json() << '\n';
    manifest.outputs.push_back(fam_path);
    Timer t_is;
    RngStream rng(f.chain.config.seed + 1);
    est = is_log_ml(f.chain.model, f.data, f.priors, family, R, rng, opt.threads);
    manifest.timings_seconds["is"] = t_is.seconds();
  }
  const std::string ml_path = (fs::path(opt.out_dir) / "ml.json").string();
  write_json(ml_path, ml_to_json(est, f.chain.model, f.data.n, f.chain.config.r));
  manifest.outputs.push_back(ml_path);
  return 0;
}

int cmd_gd(const Config& cfg, const CliOptions& opt, RunManifest& manifest) {
  Timer t;
  FittedModel f = fit_from_config(cfg, opt, manifest);
  if (f.chain.model != ModelTag::csv)
    throw ConfigError("gd: only the csv model is supported (use ml for the others)");
  const std::string variant = cfg.get_string("gd.variant", "gd2");
  const double alpha = cfg.get_double("gd.alpha", 0.05);
  if (variant != "gd1" && variant != "gd2") throw ConfigError("gd.variant must be gd1 or gd2");
  const MLEstimate est = csv_gd_log_ml(f.chain, f.data, f.priors, variant == "gd2", alpha, opt.threads);

  nlohmann::json j = ml_to_json(est, f.chain.model, f.data.n, f.chain.config.r);
  j["criterion"] = "gd";
  j["variant"] = variant;
  const std::string path = (fs::path(opt.out_dir) / "gd.json").string();
  write_json(path, j);
  manifest.outputs.push_back(path);
  manifest.timings_seconds["gd"] = t.seconds();
  return 0;
}

int cmd_dic(const Config& cfg, const CliOptions& opt, RunManifest& manifest) {
  Timer t;
  FittedModel f = fit_from_config(cfg, opt, manifest);
  const long long R_h = cfg.get_int("dic.h_draws", 200);
  const int max_draws = static_cast<int>(cfg.get_int("dic.max_draws", 500));
  RngStream rng(f.chain.config.seed + 2);
  const DicResult dic = dic_for_chain(f.chain, f.data, R_h, rng, max_draws);
  nlohmann::json j;
  j["criterion"] = "dic";
  j["model"] = to_string(f.chain.model);
  j["n"] = f.data.n;
  j["dic"] = dic.dic;
  j["mean_deviance"] = dic.mean_deviance;
  j["pd"] = dic.pd;
  j["deviance_at_point"] = dic.deviance_at_point;
  const std::string path = (fs::path(opt.out_dir) / "dic.json").string();
  write_json(path, j);
  manifest.outputs.push_back(path);
  manifest.timings_seconds["dic"] = t.seconds();
  return 0;
}

int cmd_compare(const Config& cfg, const CliOptions& opt, RunManifest& manifest) {
  const std::vector<std::string> files = cfg.get_list("compare.files");
  if (files.empty()) throw ConfigError("compare.files must list result JSON files");
  struct Entry {
    int n;
    std::string label;
    double log_ml, nse;
  };
  std::vector<Entry> entries;
  for (const std::string& file : files) {
    std::ifstream in(file);
    if (!in) throw ConfigError("compare: cannot open " + file);
    nlohmann::json j;
    in >> j;
    Entry e;
    e.n = j.value("n", 0);
    e.label = j.value("model", std::string("?"));
    if (j.contains("r")) e.label += "(" + std::to_string(j["r"].get<int>()) + ")";
    e.log_ml = j.at("log_ml").get<double>();
    e.nse = j.value("nse", 0.0);
    entries.push_back(e);
  }
  std::set<int> dims;
  std::vector<std::string> labels;
  for (const auto& e : entries) {
    dims.insert(e.n);
    if (std::find(labels.begin(), labels.end(), e.label) == labels.end()) labels.push_back(e.label);
  }
  std::ostringstream table;
  table << std::left << std::setw(8) << "n";
  for (const auto& l : labels) table << std::setw(22) << l;
  table << '\n';
  for (int n : dims) {
    table << std::left << std::setw(8) << n;
    for (const auto& l : labels) {
      std::string cell = "-";
      for (const auto& e : entries)
        if (e.n == n && e.label == l) {
          std::ostringstream c;
          c << std::fixed << std::setprecision(1) << e.log_ml << " (" << std::setprecision(2) << e.nse << ")";
          cell = c.str();
        }
      table << std::setw(22) << cell;
    }
    table << '\n';
  }
  std::cout << table.str();
  const std::string path = (fs::path(opt.out_dir) / "compare.txt").string();
  std::ofstream(path) << table.str();
  manifest.outputs.push_back(path);
  return 0;
}

int cmd_forecast(const Config& cfg, const CliOptions& opt, RunManifest& manifest) {
  Timer t;
  const Panel panel = load_panel(cfg, opt);
  RunConfig run = run_from_config(cfg, opt);
  manifest.seed = run.seed;
  const int horizon = static_cast<int>(cfg.get_int("forecast.horizon", 1));
  const long long path_draws = cfg.get_int("forecast.path_draws", 5000);
  const int refit_every = static_cast<int>(cfg.get_int("forecast.refit_every", 1));
  const VARData full = build_var_data(panel, run.p);
  int first_origin = static_cast<int>(cfg.get_int("forecast.first_origin", full.T / 2));

  ForecastResult result;
  ChainOutput chain;
  int last_fit = -1;
  for (int origin = first_origin; origin + horizon - 1 < full.T; ++origin) {
    if (last_fit < 0 || origin - last_fit >= refit_every) {
      Panel sub = panel;
      sub.values = panel.values.topRows(run.p + origin);
      const Eigen::VectorXd s2 = ar4_residual_variances(sub);
      const VARData data = build_var_data(sub, run.p);
      const PriorBundle priors = priors_from_config(cfg, s2, run.p);
      RunConfig rc = run;
      rc.seed = run.seed + static_cast<std::uint64_t>(origin);
      chain = run_chain(run.model, data, priors, rc);
      last_fit = origin;
    }
    RngStream rng(run.seed ^ 0x9E3779B97F4A7C15ULL, static_cast<std::uint64_t>(origin));
    const double lp = predictive_log_likelihood(chain, full, origin, horizon, path_draws, rng);
    result.origins.push_back(origin);
    result.per_origin.push_back(lp);
    result.sum_log_score += lp;
  }

  nlohmann::json j;
  j["criterion"] = "predictive";
  j["model"] = to_string(run.model);
  j["n"] = full.n;
  j["horizon"] = horizon;
  j["sum_log_score"] = result.sum_log_score;
  j["origins"] = result.origins;
  j["per_origin"] = result.per_origin;
  const std::string path = (fs::path(opt.out_dir) / "forecast.json").string();
  write_json(path, j);
  manifest.outputs.push_back(path);
  manifest.timings_seconds["forecast"] = t.seconds();
  return 0;
}

int cmd_mc(const Config& cfg, const CliOptions& opt, RunManifest& manifest) {
  Timer t;
  McRunConfig mc;
  mc.dgp = dgp_from_config(cfg, "mc.dgp");
  mc.replications = static_cast<int>(cfg.get_int("mc.replications", 20));
  mc.burn_in = static_cast<int>(cfg.get_int("mc.burn_in", 1000));
  mc.kept = static_cast<int>(cfg.get_int("mc.kept", 5000));
  mc.thin = static_cast<int>(cfg.get_int("mc.thin", 1));
  mc.is_draws = cfg.get_int("mc.is_draws", 5000);
  mc.seed = opt.seed_set ? opt.seed_override : static_cast<std::uint64_t>(cfg.get_int("mc.seed", 1));
  mc.threads = opt.threads;
  mc.kappa_fixed = cfg.get_double("mc.kappa_fixed", 0.04);
  manifest.seed = mc.seed;

  McResult result;
  const std::string mode = cfg.get_string("mc.mode", "models");
  if (mode == "factors") {
    std::vector<int> rs;
    for (const std::string& s : cfg.get_list("mc.candidate_r")) rs.push_back(std::stoi(s));
    if (rs.empty()) rs = {2, 3, 4};
    result = factor_count_study(mc, rs);
  } else {
    for (const std::string& s : cfg.get_list("mc.candidates")) {
      McCandidate cand;
      if (s.rfind("fsv", 0) == 0 && s.size() > 3) {
        cand.model = ModelTag::fsv;
        cand.r = std::stoi(s.substr(3));
      } else {
        cand.model = model_tag_from_string(s);
        cand.r = mc.dgp.r;
      }
      mc.candidates.push_back(cand);
    }
    if (mc.candidates.empty())
      mc.candidates = {{ModelTag::csv, mc.dgp.r}, {ModelTag::sv, mc.dgp.r}, {ModelTag::fsv, mc.dgp.r}};
    result = run_model_comparison(mc);
  }
  write_mc_outputs(result, opt.out_dir);
  manifest.outputs.push_back((fs::path(opt.out_dir) / "mc_results.csv").string());
  manifest.timings_seconds["mc"] = t.seconds();

  std::cout << "true-model win rate: " << result.true_model_win_rate() << " (failures: " << result.failures << ")\n";
  return result.failures > 0 ? 0 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian VAR stochastic-volatility model comparison"};
  app.require_subcommand(1);
  CliOptions opt;
  app.add_option("--config", opt.config_path, "run configuration file");
  app.add_option("--out", opt.out_dir, "output directory");
  std::uint64_t seed_opt = 0;
  auto* seed_flag = app.add_option("--seed", seed_opt, "override the configured seed");
  app.add_option("--threads", opt.threads, "worker threads");
  app.add_option("--model", opt.model_override, "override run.model");
  app.add_option("--preset", opt.preset_override, "override data.preset (7|15|30|custom)");

  const std::vector<std::string> commands = {"simulate", "estimate", "ml", "gd", "dic", "compare", "forecast", "mc"};
  for (const auto& name : commands) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  opt.seed_set = seed_flag->count() > 0;
  opt.seed_override = seed_opt;

  try {
    const Config cfg = opt.config_path.empty() ? Config() : Config::parse_file(opt.config_path);
    fs::create_directories(opt.out_dir);
    RunManifest manifest;
    manifest.command = app.get_subcommands().front()->get_name();
    manifest.config_digest = cfg.digest();
    manifest.code_version = kCodeVersion;

    Timer total;
    int rc = 0;
    const std::string& cmd = manifest.command;
    if (cmd == "simulate") rc = cmd_simulate(cfg, opt, manifest);
    else if (cmd == "estimate") rc = cmd_estimate(cfg, opt, manifest);
    else if (cmd == "ml") rc = cmd_ml(cfg, opt, manifest);
    else if (cmd == "gd") rc = cmd_gd(cfg, opt, manifest);
    else if (cmd == "dic") rc = cmd_dic(cfg, opt, manifest);
    else if (cmd == "compare") rc = cmd_compare(cfg, opt, manifest);
    else if (cmd == "forecast") rc = cmd_forecast(cfg, opt, manifest);
    else if (cmd == "mc") rc = cmd_mc(cfg, opt, manifest);
    manifest.timings_seconds["total"] = total.seconds();
    manifest.write((fs::path(opt.out_dir) / "manifest.json").string());
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IngestError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    std::cerr << "error: " << msg << '\n';
    if (msg.find("exceed the budget") != std::string::npos) return 4;
    return 3;
  }
}
