#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <fstream>

#include "cli.hpp"
#include "synthbal/artifacts.hpp"
#include "synthbal/io.hpp"
#include "synthbal/runner.hpp"

using namespace synthbal;
namespace fs = std::filesystem;

namespace {

// fresh scratch directory per test case
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("synthbal-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str(const std::string& name = "") const {
    return name.empty() ? path.string() : (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

SimulateOpts small_sim(const std::string& out_dir, double effect = 0.0) {
  SimulateOpts opts;
  opts.out_dir = out_dir;
  opts.leagues = 4;
  opts.teams = 8;
  opts.first_season = 1970;
  opts.last_season = 1984;
  opts.treated = "L01";
  opts.treatment_year = 1979;
  opts.effect = effect;
  opts.seed = 12;
  return opts;
}

std::string analysis_cfg_text() {
  return "outcome = dcb\n"
         "treated = L01\n"
         "treatment_year = 1979\n"
         "lag_gap = 2\n"
         "covariates = wins, draws, teams\n"
         "window = 1970-1984\n"
         "seed = 42\n";
}

int run_argv(std::vector<std::string> args) {
  std::vector<const char*> argv;
  argv.push_back("synthbal");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("number formatting is stable") {
  CHECK(fmt_fixed(0.123456) == "0.1235");
  CHECK(fmt_fixed(-0.00001) == "0.0000");  // sign dropped on a zero render
  CHECK(fmt_fixed(2.0) == "2.0000");
  CHECK(fmt_fixed(-1.5, 2) == "-1.50");
  CHECK(fmt_fixed(std::nan("")) == "nan");

  const double value = 0.1234567890123456789;
  CHECK(parse_double(fmt_g17(value), "x") == value);  // 17 digits round-trip
}

TEST_CASE("key-value files") {
  TempDir tmp;
  write_file(tmp.str("a.cfg"), "# comment\nkey = value\n\nother=  2  \n");
  const auto kv = read_kv_file(tmp.str("a.cfg"));
  REQUIRE(kv.size() == 2);
  CHECK(kv[0] == std::pair<std::string, std::string>{"key", "value"});
  CHECK(kv[1] == std::pair<std::string, std::string>{"other", "2"});

  write_file(tmp.str("b.cfg"), "not a pair\n");
  CHECK_THROWS_AS(read_kv_file(tmp.str("b.cfg")), Error);
}

TEST_CASE("analysis config parsing") {
  TempDir tmp;
  write_file(tmp.str("analysis.cfg"),
             "outcome = namsi_hat\n"
             "treated = ENG\n"
             "treatment_year = 1981\n"
             "donors = FRA, ESP, NED\n"
             "lag_gap = 3\n"
             "covariates = wins, teams\n"
             "window = 1963-1993\n"
             "seed = 7\n");
  const auto c = load_analysis_config(tmp.str("analysis.cfg"));
  CHECK(c.outcome == Outcome::namsi_hat);
  CHECK(c.treated == "ENG");
  CHECK(c.donors == std::vector<std::string>{"FRA", "ESP", "NED"});
  CHECK(c.lag_gap == 3);
  CHECK(c.cov_wins);
  CHECK_FALSE(c.cov_draws);
  CHECK(c.cov_teams);
  CHECK(c.window_first == 1963);
  CHECK(c.window_last == 1993);
  CHECK(c.seed == 7);

  write_file(tmp.str("bad.cfg"), "unknown_key = 1\n");
  CHECK_THROWS_WITH_AS(load_analysis_config(tmp.str("bad.cfg")),
                       doctest::Contains("unknown key"), Error);
  write_file(tmp.str("bad2.cfg"), "treatment_year = 1960\nwindow = 1963-1993\n");
  CHECK_THROWS_AS(load_analysis_config(tmp.str("bad2.cfg")), Error);
}

TEST_CASE("rule schedule files and defaults") {
  TempDir tmp;
  write_file(tmp.str("rules.cfg"), "ENG = 1981\nGER = 1995\n");
  const auto schedule = load_rule_schedule(tmp.str("rules.cfg"));
  CHECK(schedule.rule_for("ENG", 1981).win_points == 3);
  CHECK(schedule.rule_for("GER", 1994).win_points == 2);

  write_file(tmp.str("dup.cfg"), "ENG = 1981\nENG = 1982\n");
  CHECK_THROWS_WITH_AS(load_rule_schedule(tmp.str("dup.cfg")),
                       doctest::Contains("twice"), Error);

  const auto defaults = default_rule_schedule();
  CHECK(defaults.adoption_year.at("ENG") == 1981);
  CHECK(defaults.adoption_year.at("ITA") == 1994);
  CHECK(defaults.adoption_year.at("FRA") == 1994);
  CHECK(defaults.adoption_year.at("GER") == 1995);
  CHECK(defaults.adoption_year.at("ESP") == 1995);
  CHECK(defaults.adoption_year.at("NED") == 1995);
}

TEST_CASE("atomic writes leave no temp file behind") {
  TempDir tmp;
  write_text_atomic(tmp.str("x.txt"), "payload");
  CHECK(read_text(tmp.str("x.txt")) == "payload");
  CHECK_FALSE(fs::exists(tmp.str("x.txt.tmp")));
}

TEST_CASE("simulate then metrics pipeline") {
  TempDir tmp;
  Warnings warnings;
  run_simulate(small_sim(tmp.str("sim")), &warnings);
  CHECK(fs::exists(tmp.str("sim/matches.csv")));
  CHECK(fs::exists(tmp.str("sim/truth.json")));
  CHECK(fs::exists(tmp.str("sim/run_manifest.json")));

  MetricsOpts metrics;
  metrics.common.matches = tmp.str("sim/matches.csv");
  metrics.common.out_dir = tmp.str("metrics");
  run_metrics(metrics, &warnings);

  const Csv csv = read_csv_file(tmp.str("metrics/metrics.csv"));
  CHECK(csv.header.front() == "league_id");
  CHECK(csv.rows.size() == 4 * 15);  // leagues x seasons
  // every row re-parses numerically
  for (const auto& row : csv.rows) {
    (void)parse_double(row.at(5), "dcb");
    (void)parse_double(row.at(19), "avg_goals");
  }
}

TEST_CASE("scm artifacts are byte-identical across reruns") {
  TempDir tmp;
  run_simulate(small_sim(tmp.str("sim"), -0.3), nullptr);
  write_file(tmp.str("analysis.cfg"), analysis_cfg_text());

  CommonOpts opts;
  opts.matches = tmp.str("sim/matches.csv");
  opts.config = tmp.str("analysis.cfg");

  opts.out_dir = tmp.str("run-a");
  run_scm(opts, nullptr);
  opts.out_dir = tmp.str("run-b");
  run_scm(opts, nullptr);

  for (const char* name : {"weights.csv", "vweights.csv", "balance.csv",
                           "effects.csv", "summary.json", "run_manifest.json"}) {
    CHECK(read_text(tmp.str("run-a/") + name) == read_text(tmp.str("run-b/") + name));
  }
}

TEST_CASE("emitted tables round-trip through their readers") {
  TempDir tmp;
  run_simulate(small_sim(tmp.str("sim"), -0.3), nullptr);
  write_file(tmp.str("analysis.cfg"), analysis_cfg_text());

  CommonOpts opts;
  opts.matches = tmp.str("sim/matches.csv");
  opts.config = tmp.str("analysis.cfg");
  opts.out_dir = tmp.str("run");
  run_scm(opts, nullptr);

  const auto effects = read_effects_csv(tmp.str("run/effects.csv"));
  CHECK(effects.years.front() == 1970);
  CHECK(effects.years.back() == 1984);
  for (size_t i = 0; i < effects.years.size(); ++i) {
    CHECK(std::abs(effects.effect[i] -
                   (effects.actual[i] - effects.predicted[i])) <= 2e-4);
  }

  const auto weights = read_weights_csv(tmp.str("run/weights.csv"));
  REQUIRE(weights.size() == 3);
  double sum = 0.0;
  for (const auto& w : weights) sum += w.weight;
  CHECK(std::abs(sum - 1.0) <= 2e-4);  // 4-decimal rounding

  PlaceboOpts placebo;
  placebo.common = opts;
  placebo.common.out_dir = tmp.str("run");
  placebo.time_year = 1975;
  run_placebo(placebo, nullptr);
  const auto space = read_placebo_space_csv(tmp.str("run/placebo_space.csv"));
  CHECK(space.size() == 3);
  const auto time = read_placebo_time_csv(tmp.str("run/placebo_time.csv"));
  CHECK(time.pseudo_year == 1975);
  CHECK(time.eval_first == 1975);
  CHECK(time.eval_last == 1978);

  run_loo(opts, nullptr);
  const auto loo = read_loo_envelope_csv(tmp.str("run/loo_envelope.csv"));
  REQUIRE(!loo.empty());
  CHECK(loo.front().year == 1979);
  for (const auto& row : loo) {
    CHECK(row.min_effect <= row.max_effect + 1e-12);
  }
}

TEST_CASE("report bundles the run artifacts") {
  TempDir tmp;
  run_simulate(small_sim(tmp.str("sim"), -0.3), nullptr);
  write_file(tmp.str("analysis.cfg"), analysis_cfg_text());
  write_file(tmp.str("did.cfg"),
             "outcome = dcb\ntreated = L01\ntreatment_year = 1979\n"
             "covariates = wins, teams\nwindow = 1970-1984\n");

  CommonOpts opts;
  opts.matches = tmp.str("sim/matches.csv");
  opts.config = tmp.str("analysis.cfg");
  opts.out_dir = tmp.str("run");
  run_scm(opts, nullptr);
  run_loo(opts, nullptr);
  CommonOpts did_opts = opts;
  did_opts.config = tmp.str("did.cfg");
  run_did(did_opts, nullptr);

  ReportOpts report;
  report.run_dir = tmp.str("run");
  run_report(report, nullptr);

  const auto parsed = nlohmann::json::parse(read_text(tmp.str("run/report.json")));
  CHECK(parsed.contains("scm_summary"));
  CHECK(parsed.contains("did_estimates"));
  REQUIRE(parsed.contains("figures"));
  CHECK(parsed["figures"].contains("outcome_path"));
  CHECK(parsed["figures"].contains("treatment_gap"));
  CHECK(parsed["figures"].contains("loo_envelope"));
  CHECK(parsed["figures"]["outcome_path"].size() == 15);
  CHECK(parsed["tables"]["did"].size() == 8);  // 6 terms + r2 + observations

  ReportOpts empty;
  empty.run_dir = tmp.str("nothing-here");
  fs::create_directories(tmp.str("nothing-here"));
  CHECK_THROWS_AS(run_report(empty, nullptr), Error);
}

TEST_CASE("default donor pool excludes leagues treated inside the window") {
  TempDir tmp;
  run_simulate(small_sim(tmp.str("sim")), nullptr);
  write_file(tmp.str("analysis.cfg"), analysis_cfg_text());
  // L02 switches to 3 points mid-window: not a valid donor
  write_file(tmp.str("rules.cfg"), "L01 = 1979\nL02 = 1977\n");

  CommonOpts opts;
  opts.matches = tmp.str("sim/matches.csv");
  opts.config = tmp.str("analysis.cfg");
  opts.rules = tmp.str("rules.cfg");
  opts.out_dir = tmp.str("run");
  Warnings warnings;
  run_scm(opts, &warnings);

  const auto weights = read_weights_csv(tmp.str("run/weights.csv"));
  REQUIRE(weights.size() == 2);
  CHECK(weights[0].id == "L03");
  CHECK(weights[1].id == "L04");
  bool warned = false;
  for (const auto& w : warnings) {
    if (w.find("L02") != std::string::npos &&
        w.find("donor pool") != std::string::npos) {
      warned = true;
    }
  }
  CHECK(warned);
}

TEST_CASE("report copes with undefined index cells") {
  TempDir tmp;
  // an all-draw league-season leaves hhi_w undefined (nan in the CSV)
  std::string csv = std::string(kMatchesCsvHeader) + "\n";
  for (const char* pair : {"A,B", "B,A", "A,C", "C,A", "B,C", "C,B"}) {
    csv += "DRW,1970," + std::string(pair) + ",1,1\n";
  }
  write_file(tmp.str("m.csv"), csv);
  MetricsOpts metrics;
  metrics.common.matches = tmp.str("m.csv");
  metrics.common.out_dir = tmp.str("run");
  run_metrics(metrics, nullptr);

  const Csv table = read_csv_file(tmp.str("run/metrics.csv"));
  CHECK(table.rows.at(0).at(15) == "nan");  // hhi_w column

  ReportOpts report;
  report.run_dir = tmp.str("run");
  run_report(report, nullptr);
  const auto parsed = nlohmann::json::parse(read_text(tmp.str("run/report.json")));
  CHECK(parsed["tables"]["metrics"][0]["hhi_w"].is_null());
  CHECK(parsed["tables"]["metrics"][0]["dcb"] == 0.0);
}

TEST_CASE("ingest validates and normalizes") {
  TempDir tmp;
  write_file(tmp.str("m.csv"), std::string(kMatchesCsvHeader) +
                                   "\nENG,1981,A,B,2,0\nENG,1981,A,B,2,0\n"
                                   "ENG,1981,B,A,1,1\n");
  CommonOpts opts;
  opts.matches = tmp.str("m.csv");
  opts.out_dir = tmp.str("out");
  Warnings warnings;
  run_ingest(opts, &warnings);
  CHECK(fs::exists(tmp.str("out/matches_clean.csv")));
  const Csv coverage = read_csv_file(tmp.str("out/coverage.csv"));
  REQUIRE(coverage.rows.size() == 1);
  CHECK(coverage.rows[0][2] == "3");  // matches
  CHECK(coverage.rows[0][4] == "3");  // 3-point rule in force for ENG 1981
  REQUIRE(!warnings.empty());
  CHECK(warnings[0].find("duplicate") != std::string::npos);

  const auto manifest =
      nlohmann::json::parse(read_text(tmp.str("out/run_manifest.json")));
  CHECK(manifest["subcommand"] == "ingest");
  CHECK(manifest["warnings"].size() == 1);
}

TEST_CASE("matches path may come from the config file") {
  TempDir tmp;
  run_simulate(small_sim(tmp.str("sim")), nullptr);
  write_file(tmp.str("analysis.cfg"),
             analysis_cfg_text() + "matches = " + tmp.str("sim/matches.csv") + "\n");
  CommonOpts opts;
  opts.config = tmp.str("analysis.cfg");  // no --matches flag
  opts.out_dir = tmp.str("run");
  run_scm(opts, nullptr);
  CHECK(fs::exists(tmp.str("run/effects.csv")));
}

TEST_CASE("cli surface: exit codes and wiring") {
  TempDir tmp;
  CHECK(run_argv({"--help"}) == 0);
  CHECK(run_argv({"bogus-subcommand"}) != 0);
  CHECK(run_argv({"metrics", "--out", tmp.str("x")}) != 0);  // no matches file
  CHECK(run_argv({"metrics", "--matches", tmp.str("missing.csv"), "--out",
                  tmp.str("x")}) == 1);

  CHECK(run_argv({"simulate", "--out", tmp.str("sim"), "--leagues", "3",
                  "--teams", "6", "--first-season", "1970", "--last-season",
                  "1976", "--seed", "5"}) == 0);
  write_file(tmp.str("analysis.cfg"),
             "treated = L01\ntreatment_year = 1974\nlag_gap = 1\n"
             "window = 1970-1976\ncovariates = wins\n");
  CHECK(run_argv({"scm", "--matches", tmp.str("sim/matches.csv"), "--config",
                  tmp.str("analysis.cfg"), "--out", tmp.str("run"), "--seed",
                  "9"}) == 0);
  CHECK(fs::exists(tmp.str("run/effects.csv")));
  const auto manifest =
      nlohmann::json::parse(read_text(tmp.str("run/run_manifest.json")));
  CHECK(manifest["seed"] == 9);  // CLI override recorded
  CHECK(run_argv({"report", "--run", tmp.str("run")}) == 0);
  CHECK(fs::exists(tmp.str("run/report.json")));
}
