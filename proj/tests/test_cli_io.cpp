#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "bvarml/config.hpp"
#include "bvarml/csv_io.hpp"
#include "bvarml/manifest.hpp"
#include "bvarml/rng.hpp"
#include "bvarml/states.hpp"

using namespace bvarml;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli-io");

TEST_CASE("config parsing, typed getters and digest stability") {
  const std::string text = R"(
# run settings
[run]
model = "csv"
kept = 5000
seed = 42
flag = true

[prior]
mode = asymmetric
kappa_rate = 25.0

[compare]
files = ["a.json", "b.json"]
)";
  const Config cfg = Config::parse_string(text);
  CHECK(cfg.get_string("run.model") == "csv");
  CHECK(cfg.get_int("run.kept") == 5000);
  CHECK(cfg.get_bool("run.flag", false));
  CHECK(cfg.get_double("prior.kappa_rate") == doctest::Approx(25.0));
  CHECK(cfg.get_int("run.missing", 7) == 7);
  CHECK(cfg.get_list("compare.files") == std::vector<std::string>{"a.json", "b.json"});

  // digest is stable under key reordering
  const Config reordered = Config::parse_string(R"(
[prior]
kappa_rate = 25.0
mode = asymmetric
[compare]
files = ["a.json", "b.json"]
[run]
seed = 42
flag = true
kept = 5000
model = "csv"
)");
  CHECK(cfg.digest() == reordered.digest());
  const Config changed = Config::parse_string(text + "\n[extra]\nx = 1\n");
  CHECK(cfg.digest() != changed.digest());

  CHECK_THROWS_AS(Config::parse_string("novalue\n"), ConfigError);
  CHECK_THROWS_AS(cfg.get_int("run.model"), ConfigError);
}

namespace {

std::string write_temp_csv(const std::string& name, const std::string& contents) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << contents;
  return path.string();
}

}  // namespace

TEST_CASE("ingest_csv applies transforms, trims and validates") {
  const std::string path = write_temp_csv("bvarml_test_ingest.csv",
                                          "date,gdp,unemp\n"
                                          "1959-01-01,100,5.0\n"
                                          "1959-04-01,101,5.1\n"
                                          "1959-07-01,102,5.2\n"
                                          "1959-10-01,103,5.0\n");
  IngestSpec spec;
  spec.custom = {{"gdp", TransformCode::dlog400}, {"unemp", TransformCode::none}};
  const Panel panel = ingest_csv(path, spec);
  CHECK(panel.rows() == 3);  // one row lost to differencing
  CHECK(panel.cols() == 2);
  CHECK(panel.values(0, 0) == doctest::Approx(400.0 * std::log(101.0 / 100.0)));
  CHECK(panel.values(0, 1) == doctest::Approx(5.1));  // untransformed series passes through, trimmed

  // missing variable
  IngestSpec missing;
  missing.custom = {{"notthere", TransformCode::none}};
  CHECK_THROWS_AS(ingest_csv(path, missing), IngestError);

  // nonpositive value under a log transform names the variable
  const std::string bad = write_temp_csv("bvarml_test_bad.csv",
                                         "date,gdp\n"
                                         "1959-01-01,100\n"
                                         "1959-04-01,-1\n");
  IngestSpec bad_spec;
  bad_spec.custom = {{"gdp", TransformCode::dlog400}};
  CHECK_THROWS_AS(ingest_csv(bad, bad_spec), std::domain_error);

  // ragged row
  const std::string ragged = write_temp_csv("bvarml_test_ragged.csv",
                                            "date,a,b\n"
                                            "1959-01-01,1,2\n"
                                            "1959-04-01,1\n");
  IngestSpec rspec;
  rspec.custom = {{"a", TransformCode::none}, {"b", TransformCode::none}};
  CHECK_THROWS_AS(ingest_csv(ragged, rspec), IngestError);
}

TEST_CASE("preset ingestion selects the marked variables in table order") {
  // synthetic quarterly file covering 1959Q1-2019Q4: 244 rows
  std::ostringstream file;
  file << "date";
  const auto preset = panel_preset(7);
  for (const auto& v : preset) file << ',' << v.name;
  file << ",extra_column\n";
  RngStream rng(601);
  for (int t = 0; t < 244; ++t) {
    file << (1959 + t / 4) << "-" << (1 + 3 * (t % 4)) << "-01";
    for (const auto& v : preset) {
      if (v.transform == TransformCode::none)
        file << ',' << 5.0 + rng.normal();
      else
        file << ',' << 100.0 * std::exp(0.01 * t + 0.001 * rng.normal());
    }
    file << ',' << rng.normal() << '\n';
  }
  const std::string path = write_temp_csv("bvarml_test_preset.csv", file.str());
  IngestSpec spec;
  spec.preset = 7;
  const Panel panel = ingest_csv(path, spec);
  CHECK(panel.cols() == 7);
  CHECK(panel.rows() == 243);  // one difference lost on the log-transformed series
  CHECK(panel.names[0] == "real_gdp");
  CHECK(panel.names[2] == "unemployment_rate");
  CHECK(panel.names[6] == "treasury_10y");

  // round-trip: serialize the transformed panel and re-ingest with identity transforms
  const fs::path out = fs::temp_directory_path() / "bvarml_test_roundtrip.csv";
  write_panel_csv(out.string(), panel);
  IngestSpec identity;
  for (const auto& name : panel.names) identity.custom.push_back({name, TransformCode::none});
  const Panel back = ingest_csv(out.string(), identity);
  CHECK(back.rows() == panel.rows());
  CHECK((back.values - panel.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("chain draw file has one named column per parameter") {
  ChainOutput chain;
  chain.model = ModelTag::csv;
  CsvState s;
  s.A = Eigen::MatrixXd::Zero(3, 2);
  s.Sigma = Eigen::MatrixXd::Identity(2, 2);
  s.h = Eigen::VectorXd::Zero(5);
  s.phi = 0.9;
  s.sigma2 = 0.1;
  s.kappa = 0.04;
  chain.draws = std::vector<CsvState>{s, s};
  const fs::path path = fs::temp_directory_path() / "bvarml_test_draws.csv";
  write_chain_csv(path.string(), chain);

  std::ifstream in(path);
  std::string header, row1, row2, extra;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  const bool more = static_cast<bool>(std::getline(in, extra));
  CHECK_FALSE(more);
  const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ',') + 1; };
  // 6 A entries + 3 unique Sigma entries + 5 h + phi + sigma2 + kappa = 17
  CHECK(count(header) == 17);
  CHECK(count(row1) == 17);
  CHECK(header.find("A_1_1") != std::string::npos);
  CHECK(header.find("h_5") != std::string::npos);
  CHECK(header.find("kappa") != std::string::npos);
}

TEST_CASE("manifest serializes and records outputs") {
  RunManifest m;
  m.command = "ml";
  m.config_digest = 12345;
  m.seed = 7;
  m.code_version = kCodeVersion;
  m.timings_seconds["total"] = 1.5;
  m.outputs = {"a.json"};
  const std::string j = m.to_json();
  CHECK(j.find("\"command\": \"ml\"") != std::string::npos);
  CHECK(j.find("a.json") != std::string::npos);
}

#ifdef BVARML_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BVARML_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cli exit codes and the ml output schema") {
  const fs::path dir = fs::temp_directory_path() / "bvarml_cli_test";
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "run.toml";
  {
    std::ofstream cfg(cfg_path);
    cfg << "[data]\nsource = \"simulate\"\nmodel = \"csv\"\nn = 2\nT = 50\np = 1\nseed = 3\n"
        << "[run]\nmodel = \"csv\"\np = 1\nburn_in = 50\nkept = 300\nseed = 9\n"
        << "[ml]\nis_draws = 300\n";
  }
  // unknown model tag -> config error (exit 2)
  CHECK(run_cli("ml --config " + cfg_path.string() + " --model bogus --out " + (dir / "o1").string()) == 2);
  // missing config file -> exit 2
  CHECK(run_cli("ml --config /nonexistent.toml --out " + (dir / "o2").string()) == 2);

  // a successful run writes ml.json with the documented fields plus a manifest
  CHECK(run_cli("ml --config " + cfg_path.string() + " --out " + (dir / "o3").string()) == 0);
  std::ifstream in(dir / "o3" / "ml.json");
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"log_ml\"") != std::string::npos);
  CHECK(text.find("\"nse\"") != std::string::npos);
  CHECK(text.find("\"R\"") != std::string::npos);
  CHECK(fs::exists(dir / "o3" / "manifest.json"));
  CHECK(fs::exists(dir / "o3" / "is_family.json"));

  // byte-identical reruns with the same config + seed (timings live in the manifest only)
  CHECK(run_cli("ml --config " + cfg_path.string() + " --out " + (dir / "o4").string()) == 0);
  std::ifstream a(dir / "o3" / "ml.json"), b(dir / "o4" / "ml.json");
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("cli subcommands: simulate, estimate, gd, dic, forecast, mc, compare") {
  const fs::path dir = fs::temp_directory_path() / "bvarml_cli_suite";
  fs::remove_all(dir);
  fs::create_directories(dir);

  {
    std::ofstream cfg(dir / "sim.toml");
    cfg << "[simulate]\nmodel = \"csv\"\nn = 2\nT = 60\np = 1\nseed = 5\n";
  }
  CHECK(run_cli("simulate --config " + (dir / "sim.toml").string() + " --out " + (dir / "sim").string()) == 0);
  CHECK(fs::exists(dir / "sim" / "panel.csv"));
  CHECK(fs::exists(dir / "sim" / "truth.csv"));
  CHECK(fs::exists(dir / "sim" / "manifest.json"));

  {
    std::ofstream cfg(dir / "run.toml");
    cfg << "[data]\nsource = \"csv\"\npreset = \"custom\"\npath = \"" << (dir / "sim" / "panel.csv").string() << "\"\n"
        << "[data.transforms]\nv1 = \"none\"\nv2 = \"none\"\n"
        << "[run]\nmodel = \"csv\"\np = 1\nburn_in = 100\nkept = 400\nseed = 9\n"
        << "[ml]\nis_draws = 300\n[gd]\nvariant = \"gd2\"\n[dic]\nh_draws = 50\nmax_draws = 120\n"
        << "[forecast]\nhorizon = 1\npath_draws = 200\nfirst_origin = 55\nrefit_every = 10\n";
  }
  CHECK(run_cli("estimate --config " + (dir / "run.toml").string() + " --out " + (dir / "est").string()) == 0);
  CHECK(fs::exists(dir / "est" / "draws.csv"));
  CHECK(fs::exists(dir / "est" / "run_meta.json"));
  CHECK(run_cli("gd --config " + (dir / "run.toml").string() + " --out " + (dir / "gd").string()) == 0);
  CHECK(fs::exists(dir / "gd" / "gd.json"));
  CHECK(run_cli("dic --config " + (dir / "run.toml").string() + " --out " + (dir / "dic").string()) == 0);
  CHECK(fs::exists(dir / "dic" / "dic.json"));
  CHECK(run_cli("forecast --config " + (dir / "run.toml").string() + " --out " + (dir / "fc").string()) == 0);
  CHECK(fs::exists(dir / "fc" / "forecast.json"));

  {
    std::ofstream cfg(dir / "mc.toml");
    cfg << "[mc]\nmode = \"models\"\nreplications = 1\nburn_in = 60\nkept = 150\nis_draws = 150\nseed = 3\n"
        << "candidates = [\"var\", \"csv\"]\n"
        << "[mc.dgp]\nmodel = \"csv\"\nn = 2\nT = 50\np = 1\n";
  }
  CHECK(run_cli("mc --config " + (dir / "mc.toml").string() + " --out " + (dir / "mc").string()) == 0);
  CHECK(fs::exists(dir / "mc" / "mc_results.csv"));

  {
    std::ofstream ml1(dir / "ml1.json");
    ml1 << R"({"model":"csv","n":2,"log_ml":-100.5,"nse":0.1,"R":100,"ess":50})";
    std::ofstream ml2(dir / "ml2.json");
    ml2 << R"({"model":"sv","n":2,"log_ml":-98.2,"nse":0.3,"R":100,"ess":20})";
    std::ofstream cfg(dir / "cmp.toml");
    cfg << "[compare]\nfiles = [\"" << (dir / "ml1.json").string() << "\", \"" << (dir / "ml2.json").string()
        << "\"]\n";
  }
  CHECK(run_cli("compare --config " + (dir / "cmp.toml").string() + " --out " + (dir / "cmp").string()) == 0);
  std::ifstream table(dir / "cmp" / "compare.txt");
  std::string text((std::istreambuf_iterator<char>(table)), std::istreambuf_iterator<char>());
  CHECK(text.find("csv") != std::string::npos);
  CHECK(text.find("-98.2") != std::string::npos);
  CHECK(text.find("(0.30)") != std::string::npos);
}
#endif

TEST_SUITE_END();
