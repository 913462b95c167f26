#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "synthbal/runner.hpp"

namespace synthbal::cli {

namespace {

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  cmd->add_option("--matches", opts.matches,
                  "Matches CSV (header: league_id,season_start_year,"
                  "home_team,away_team,home_goals,away_goals)");
  auto* config = cmd->add_option("--config", opts.config,
                                 "Analysis config file (key = value)");
  if (config_required) config->required();
  cmd->add_option("--rules", opts.rules,
                  "Rule schedule file (league_id = adoption_year); "
                  "defaults to the six historical leagues");
  cmd->add_option("--out", opts.out_dir, "Output directory")->required();
  cmd->add_option("--seed", opts.seed, "Optimizer seed (overrides config)");
}

void print_warnings(const Warnings& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"synthbal: competitive-balance indices and synthetic-control "
               "estimation for football league panels"};
  app.require_subcommand(1);

  CommonOpts ingest_opts;
  auto* ingest = app.add_subcommand("ingest", "Validate and normalize a matches CSV");
  add_common(ingest, ingest_opts, false);

  MetricsOpts metrics_opts;
  auto* metrics = app.add_subcommand("metrics", "Per-season balance index table");
  add_common(metrics, metrics_opts.common, false);
  metrics->add_flag("--goals-per-match", metrics_opts.goals_per_match,
                    "Divide goals by matches instead of 2x matches");

  CommonOpts scm_opts;
  auto* scm = app.add_subcommand("scm", "Fit the synthetic control");
  add_common(scm, scm_opts, true);

  PlaceboOpts placebo_opts;
  auto* placebo = app.add_subcommand("placebo", "Placebo-in-space / in-time refits");
  add_common(placebo, placebo_opts.common, true);
  bool no_space = false;
  placebo->add_flag("--no-space", no_space, "Skip the placebo-in-space battery");
  placebo->add_option("--time-year", placebo_opts.time_year,
                      "Also refit at this pseudo treatment year");

  CommonOpts loo_opts;
  auto* loo = app.add_subcommand("loo", "Leave-one-out donor sensitivity");
  add_common(loo, loo_opts, true);

  CommonOpts did_opts;
  auto* did = app.add_subcommand("did", "Difference-in-differences regression");
  add_common(did, did_opts, true);

  SimulateOpts sim_opts;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic panel");
  simulate->add_option("--out", sim_opts.out_dir, "Output directory")->required();
  simulate->add_option("--leagues", sim_opts.leagues, "Number of leagues");
  simulate->add_option("--teams", sim_opts.teams, "Base league size");
  simulate->add_option("--first-season", sim_opts.first_season, "First season");
  simulate->add_option("--last-season", sim_opts.last_season, "Last season");
  simulate->add_option("--treated", sim_opts.treated, "Treated league id");
  simulate->add_option("--treatment-year", sim_opts.treatment_year,
                       "First treated season");
  simulate->add_option("--effect", sim_opts.effect,
                       "Dispersion shift injected into the treated league");
  simulate->add_option("--draw-propensity", sim_opts.draw_propensity,
                       "Draw probability at equal strengths");
  simulate->add_option("--strength-sd", sim_opts.strength_sd,
                       "Initial strength spread");
  simulate->add_option("--drift", sim_opts.drift, "Per-season strength drift");
  simulate->add_option("--common-factor", sim_opts.common_factor,
                       "Shared dispersion shock scale");
  simulate->add_option("--seed", sim_opts.seed, "Generator seed");

  ReportOpts report_opts;
  auto* report = app.add_subcommand("report", "Bundle run artifacts into one JSON");
  report->add_option("--run", report_opts.run_dir, "Run directory")->required();
  report->add_option("--out", report_opts.out_file,
                     "Report path (default <run>/report.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  Warnings warnings;
  try {
    if (*ingest) run_ingest(ingest_opts, &warnings);
    if (*metrics) run_metrics(metrics_opts, &warnings);
    if (*scm) run_scm(scm_opts, &warnings);
    if (*placebo) {
      placebo_opts.space = !no_space;
      run_placebo(placebo_opts, &warnings);
    }
    if (*loo) run_loo(loo_opts, &warnings);
    if (*did) run_did(did_opts, &warnings);
    if (*simulate) run_simulate(sim_opts, &warnings);
    if (*report) run_report(report_opts, &warnings);
  } catch (const Error& e) {
    print_warnings(warnings);
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    print_warnings(warnings);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  print_warnings(warnings);
  return 0;
}

}  // namespace synthbal::cli
