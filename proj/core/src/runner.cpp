#include "synthbal/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "synthbal/io.hpp"

namespace synthbal {

namespace {

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string join_list_str(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& i : items) {
    if (!out.empty()) out += ", ";
    out += i;
  }
  return out;
}

struct LoadedRun {
  AnalysisConfig config;
  RuleSchedule schedule;
  std::vector<MatchRecord> matches;
  std::string matches_path;
};

RuleSchedule schedule_for(const CommonOpts& opts) {
  return opts.rules.empty() ? default_rule_schedule()
                            : load_rule_schedule(opts.rules);
}

LoadedRun load_run(const CommonOpts& opts, Warnings* warnings,
                   bool config_required) {
  LoadedRun run;
  if (!opts.config.empty()) {
    run.config = load_analysis_config(opts.config);
  } else if (config_required) {
    throw Error("an analysis config file is required (--config)");
  }
  if (opts.seed) run.config.seed = *opts.seed;
  run.schedule = schedule_for(opts);
  run.matches_path = !opts.matches.empty() ? opts.matches : run.config.matches;
  if (run.matches_path.empty()) {
    throw Error("no matches file given (--matches or 'matches' config key)");
  }
  run.matches = parse_matches_file(run.matches_path, warnings);
  if (run.matches.empty()) throw Error(run.matches_path + ": no match rows");
  return run;
}

// Default donor pool: every league in the data other than the treated one
// whose 3-point adoption lies after the window (donors must stay untreated
// for the whole panel).
void resolve_donors(AnalysisConfig& config, const RuleSchedule& schedule,
                    const std::vector<MatchRecord>& matches,
                    Warnings* warnings) {
  if (!config.donors.empty()) return;
  std::set<std::string> leagues;
  for (const auto& m : matches) leagues.insert(m.league_id);
  for (const auto& league : leagues) {
    if (league == config.treated) continue;
    const auto it = schedule.adoption_year.find(league);
    if (it != schedule.adoption_year.end() && it->second <= config.window_last) {
      warn(warnings, "league " + league + " adopts the 3-point rule in " +
                         std::to_string(it->second) +
                         ", inside the window; excluded from the donor pool");
      continue;
    }
    config.donors.push_back(league);
  }
  if (config.donors.empty()) {
    throw Error("no untreated donor leagues available in the window");
  }
}

std::vector<std::pair<std::string, std::string>> manifest_config(
    const AnalysisConfig& c) {
  return {
      {"outcome", outcome_name(c.outcome)},
      {"treated", c.treated},
      {"treatment_year", std::to_string(c.treatment_year)},
      {"donors", join_list_str(c.donors)},
      {"lag_gap", std::to_string(c.lag_gap)},
      {"covariates", std::string(c.cov_wins ? "wins " : "") +
                         (c.cov_draws ? "draws " : "") +
                         (c.cov_teams ? "teams" : "")},
      {"window", std::to_string(c.window_first) + "-" +
                     std::to_string(c.window_last)},
      {"seed", std::to_string(c.seed)},
  };
}

void finish_manifest(const std::string& out_dir, RunManifest manifest,
                     Warnings* warnings) {
  if (warnings) manifest.warnings = *warnings;
  write_manifest_json(join_path(out_dir, "run_manifest.json"), manifest);
}

}  // namespace

AnalysisConfig load_analysis_config(const std::string& path) {
  AnalysisConfig c;
  bool donors_set = false;
  for (const auto& [key, value] : read_kv_file(path)) {
    if (key == "outcome") {
      c.outcome = parse_outcome(value);
    } else if (key == "treated") {
      c.treated = value;
    } else if (key == "treatment_year") {
      c.treatment_year = static_cast<int>(parse_int(value, path + ": treatment_year"));
    } else if (key == "donors") {
      c.donors = split_list(value);
      donors_set = true;
    } else if (key == "lag_gap") {
      c.lag_gap = static_cast<int>(parse_int(value, path + ": lag_gap"));
      if (c.lag_gap < 1) throw Error(path + ": lag_gap must be >= 1");
    } else if (key == "covariates") {
      c.cov_wins = c.cov_draws = c.cov_teams = false;
      for (const auto& name : split_list(value)) {
        if (name == "wins" || name == "avg_win_share") c.cov_wins = true;
        else if (name == "draws" || name == "avg_draw_share") c.cov_draws = true;
        else if (name == "teams" || name == "team_count") c.cov_teams = true;
        else throw Error(path + ": unknown covariate '" + name + "'");
      }
    } else if (key == "window") {
      const auto parts = split(value, '-');
      if (parts.size() != 2) {
        throw Error(path + ": window must be 'first-last', got '" + value + "'");
      }
      c.window_first = static_cast<int>(parse_int(parts[0], path + ": window"));
      c.window_last = static_cast<int>(parse_int(parts[1], path + ": window"));
    } else if (key == "matches") {
      c.matches = value;
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(parse_int(value, path + ": seed"));
    } else {
      throw Error(path + ": unknown key '" + key + "'");
    }
  }
  if (c.window_first >= c.window_last) {
    throw Error(path + ": window must span at least two seasons");
  }
  if (c.treatment_year <= c.window_first || c.treatment_year > c.window_last) {
    throw Error(path + ": treatment_year must lie inside the window with a"
                " non-empty pre-period");
  }
  (void)donors_set;
  return c;
}

RuleSchedule load_rule_schedule(const std::string& path) {
  RuleSchedule schedule;
  for (const auto& [league, year] : read_kv_file(path)) {
    if (schedule.adoption_year.count(league)) {
      throw Error(path + ": league '" + league + "' listed twice");
    }
    schedule.adoption_year[league] =
        static_cast<int>(parse_int(year, path + ": " + league));
  }
  return schedule;
}

std::vector<SeasonTable> tables_from_matches(
    const std::vector<MatchRecord>& matches, const RuleSchedule& schedule) {
  std::vector<SeasonTable> tables;
  for (const auto& [key, group] : group_by_league_season(matches)) {
    tables.push_back(
        build_season_table(group, schedule.rule_for(key.first, key.second)));
  }
  return tables;
}

PanelDataset panel_for_analysis(const std::vector<MatchRecord>& matches,
                                const AnalysisConfig& config,
                                const RuleSchedule& schedule,
                                Warnings* warnings) {
  // restrict to the window and to treated + donors (all leagues if donors
  // are defaulted)
  std::set<std::string> keep;
  if (!config.donors.empty()) {
    keep.insert(config.treated);
    keep.insert(config.donors.begin(), config.donors.end());
  }
  std::vector<MatchRecord> filtered;
  for (const auto& m : matches) {
    if (m.season_start_year < config.window_first ||
        m.season_start_year > config.window_last) {
      continue;
    }
    if (!keep.empty() && !keep.count(m.league_id)) continue;
    filtered.push_back(m);
  }
  if (filtered.empty()) {
    throw Error("no matches inside window " + std::to_string(config.window_first) +
                "-" + std::to_string(config.window_last));
  }

  // every league must cover the whole window
  std::set<std::string> leagues;
  std::set<std::pair<std::string, int>> cells;
  for (const auto& m : filtered) {
    leagues.insert(m.league_id);
    cells.insert({m.league_id, m.season_start_year});
  }
  std::vector<std::string> gaps;
  for (const auto& league : leagues) {
    for (int y = config.window_first; y <= config.window_last; ++y) {
      if (!cells.count({league, y})) gaps.push_back(league + " " + std::to_string(y));
    }
  }
  if (!gaps.empty()) {
    std::string msg = "window " + std::to_string(config.window_first) + "-" +
                      std::to_string(config.window_last) +
                      " has missing league-seasons:";
    for (const auto& g : gaps) msg += " " + g;
    throw Error(msg);
  }
  if (!leagues.count(config.treated)) {
    throw Error("treated league '" + config.treated + "' absent from the data");
  }

  return build_panel(tables_from_matches(filtered, schedule), config.outcome,
                     schedule, warnings);
}

ScmConfig scm_config_from(const AnalysisConfig& config,
                          const PanelDataset& panel) {
  ScmConfig scm;
  scm.treated = config.treated;
  scm.treatment_year = config.treatment_year;
  scm.donors = config.donors;
  if (scm.donors.empty()) {
    for (const auto& u : panel.units) {
      if (u != config.treated) scm.donors.push_back(u);
    }
  }
  scm.predictors.lag_gap = config.lag_gap;
  scm.predictors.include_avg_wins = config.cov_wins;
  scm.predictors.include_avg_draws = config.cov_draws;
  scm.predictors.include_team_count = config.cov_teams;
  scm.search.seed = config.seed;
  return scm;
}

void run_ingest(const CommonOpts& opts, Warnings* warnings) {
  if (opts.out_dir.empty()) throw Error("an output directory is required (--out)");
  LoadedRun run = load_run(opts, warnings, /*config_required=*/false);
  ensure_directory(opts.out_dir);

  const auto tables = tables_from_matches(run.matches, run.schedule);
  write_matches_csv(join_path(opts.out_dir, "matches_clean.csv"), run.matches);
  write_coverage_csv(join_path(opts.out_dir, "coverage.csv"), tables);

  RunManifest manifest;
  manifest.subcommand = "ingest";
  manifest.seed = run.config.seed;
  manifest.config = {{"matches", run.matches_path}};
  manifest.inputs = {run.matches_path};
  manifest.outputs = {"matches_clean.csv", "coverage.csv"};
  finish_manifest(opts.out_dir, manifest, warnings);
}

void run_metrics(const MetricsOpts& opts, Warnings* warnings) {
  if (opts.common.out_dir.empty()) throw Error("an output directory is required (--out)");
  LoadedRun run = load_run(opts.common, warnings, /*config_required=*/false);
  ensure_directory(opts.common.out_dir);

  std::vector<MetricsRow> rows;
  for (const auto& [key, group] : group_by_league_season(run.matches)) {
    const PointsRule rule = run.schedule.rule_for(key.first, key.second);
    const SeasonTable table = build_season_table(group, rule);
    MetricsRow row;
    row.league_id = key.first;
    row.season_start_year = key.second;
    row.win_points = rule.win_points;
    row.team_count = table.team_count();
    row.matches = table.total_matches();
    row.indices = compute_balance_indices(table, rule, warnings);
    if (opts.goals_per_match) {
      row.indices.avg_goals_per_team_match = avg_goals_from_table(table, false);
    }
    rows.push_back(std::move(row));
  }
  write_metrics_csv(join_path(opts.common.out_dir, "metrics.csv"), rows);

  RunManifest manifest;
  manifest.subcommand = "metrics";
  manifest.seed = run.config.seed;
  manifest.config = {{"matches", run.matches_path},
                     {"goals_divisor", opts.goals_per_match ? "per_match"
                                                            : "per_team_match"}};
  manifest.inputs = {run.matches_path};
  manifest.outputs = {"metrics.csv"};
  finish_manifest(opts.common.out_dir, manifest, warnings);
}

void run_scm(const CommonOpts& opts, Warnings* warnings) {
  if (opts.out_dir.empty()) throw Error("an output directory is required (--out)");
  LoadedRun run = load_run(opts, warnings, /*config_required=*/true);
  resolve_donors(run.config, run.schedule, run.matches, warnings);
  ensure_directory(opts.out_dir);

  const PanelDataset panel =
      panel_for_analysis(run.matches, run.config, run.schedule, warnings);
  const ScmConfig config = scm_config_from(run.config, panel);
  const ScmFit fit = fit_scm(panel, config, warnings);

  write_weights_csv(join_path(opts.out_dir, "weights.csv"), fit);
  write_vweights_csv(join_path(opts.out_dir, "vweights.csv"), fit);
  write_balance_csv(join_path(opts.out_dir, "balance.csv"), fit);
  write_effects_csv(join_path(opts.out_dir, "effects.csv"), fit);
  write_scm_summary_json(join_path(opts.out_dir, "summary.json"), fit,
                         run.config.outcome);

  RunManifest manifest;
  manifest.subcommand = "scm";
  manifest.seed = run.config.seed;
  AnalysisConfig resolved = run.config;
  resolved.donors = config.donors;
  manifest.config = manifest_config(resolved);
  manifest.config.emplace_back("matches", run.matches_path);
  manifest.inputs = {run.matches_path};
  if (!opts.config.empty()) manifest.inputs.push_back(opts.config);
  manifest.outputs = {"weights.csv", "vweights.csv", "balance.csv",
                      "effects.csv", "summary.json"};
  finish_manifest(opts.out_dir, manifest, warnings);
}

void run_placebo(const PlaceboOpts& opts, Warnings* warnings) {
  if (opts.common.out_dir.empty()) throw Error("an output directory is required (--out)");
  LoadedRun run = load_run(opts.common, warnings, /*config_required=*/true);
  resolve_donors(run.config, run.schedule, run.matches, warnings);
  ensure_directory(opts.common.out_dir);

  const PanelDataset panel =
      panel_for_analysis(run.matches, run.config, run.schedule, warnings);
  const ScmConfig config = scm_config_from(run.config, panel);

  RunManifest manifest;
  manifest.subcommand = "placebo";
  manifest.seed = run.config.seed;
  AnalysisConfig resolved = run.config;
  resolved.donors = config.donors;
  manifest.config = manifest_config(resolved);
  manifest.inputs = {run.matches_path};

  if (opts.space) {
    const auto results = placebo_in_space(panel, config, warnings);
    write_placebo_space_csv(join_path(opts.common.out_dir, "placebo_space.csv"),
                            results);
    manifest.outputs.push_back("placebo_space.csv");
  }
  if (opts.time_year) {
    const auto result = placebo_in_time(panel, config, *opts.time_year, warnings);
    write_placebo_time_csv(join_path(opts.common.out_dir, "placebo_time.csv"),
                           result);
    manifest.config.emplace_back("pseudo_year", std::to_string(*opts.time_year));
    manifest.outputs.push_back("placebo_time.csv");
  }
  if (manifest.outputs.empty()) {
    throw Error("placebo: nothing to do (enable --space and/or --time-year)");
  }
  finish_manifest(opts.common.out_dir, manifest, warnings);
}

void run_loo(const CommonOpts& opts, Warnings* warnings) {
  if (opts.out_dir.empty()) throw Error("an output directory is required (--out)");
  LoadedRun run = load_run(opts, warnings, /*config_required=*/true);
  resolve_donors(run.config, run.schedule, run.matches, warnings);
  ensure_directory(opts.out_dir);

  const PanelDataset panel =
      panel_for_analysis(run.matches, run.config, run.schedule, warnings);
  const ScmConfig config = scm_config_from(run.config, panel);
  const ScmFit base = fit_scm(panel, config, warnings);
  const LooResult result = leave_one_out(panel, config, base, warnings);

  write_loo_envelope_csv(join_path(opts.out_dir, "loo_envelope.csv"), result);

  RunManifest manifest;
  manifest.subcommand = "loo";
  manifest.seed = run.config.seed;
  AnalysisConfig resolved = run.config;
  resolved.donors = config.donors;
  manifest.config = manifest_config(resolved);
  manifest.inputs = {run.matches_path};
  manifest.outputs = {"loo_envelope.csv"};
  finish_manifest(opts.out_dir, manifest, warnings);
}

void run_did(const CommonOpts& opts, Warnings* warnings) {
  if (opts.out_dir.empty()) throw Error("an output directory is required (--out)");
  LoadedRun run = load_run(opts, warnings, /*config_required=*/true);
  resolve_donors(run.config, run.schedule, run.matches, warnings);
  ensure_directory(opts.out_dir);

  const PanelDataset panel =
      panel_for_analysis(run.matches, run.config, run.schedule, warnings);
  DidOptions options;
  options.include_avg_wins = run.config.cov_wins;
  options.include_avg_draws = run.config.cov_draws;
  options.include_team_count = run.config.cov_teams;
  const DidFit fit =
      fit_did(panel, run.config.treated, run.config.treatment_year, options);

  write_did_csv(join_path(opts.out_dir, "did.csv"), fit);
  write_did_json(join_path(opts.out_dir, "did.json"), fit);

  RunManifest manifest;
  manifest.subcommand = "did";
  manifest.seed = run.config.seed;
  manifest.config = manifest_config(run.config);
  manifest.inputs = {run.matches_path};
  manifest.outputs = {"did.csv", "did.json"};
  finish_manifest(opts.out_dir, manifest, warnings);
}

void run_simulate(const SimulateOpts& opts, Warnings* warnings) {
  if (opts.out_dir.empty()) throw Error("an output directory is required (--out)");
  if (opts.leagues < 2) throw Error("simulate: need at least 2 leagues");
  ensure_directory(opts.out_dir);

  PanelScenario scenario;
  scenario.treated = opts.treated;
  scenario.treatment_year = opts.treatment_year;
  scenario.treated_effect = opts.effect;
  scenario.common_factor = opts.common_factor;
  scenario.seed = opts.seed;
  for (int i = 0; i < opts.leagues; ++i) {
    LeagueScenario league;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "L%02d", i + 1);
    league.league_id = buf;
    league.team_count = opts.teams + 2 * (i % 3);  // heterogeneous league sizes
    league.strength_sd = opts.strength_sd;
    league.draw_propensity = opts.draw_propensity;
    league.strength_drift = opts.drift;
    league.first_season = opts.first_season;
    league.last_season = opts.last_season;
    league.seed = 0;  // derived from the panel seed
    scenario.leagues.push_back(std::move(league));
  }

  const PanelRun run = generate_panel_scenario(scenario);
  write_matches_csv(join_path(opts.out_dir, "matches.csv"), run.matches);
  write_truth_json(join_path(opts.out_dir, "truth.json"), run.truth);

  RunManifest manifest;
  manifest.subcommand = "simulate";
  manifest.seed = opts.seed;
  manifest.config = {
      {"leagues", std::to_string(opts.leagues)},
      {"teams", std::to_string(opts.teams)},
      {"window", std::to_string(opts.first_season) + "-" +
                     std::to_string(opts.last_season)},
      {"treated", opts.treated},
      {"treatment_year", std::to_string(opts.treatment_year)},
      {"effect", fmt_g17(opts.effect)},
      {"draw_propensity", fmt_g17(opts.draw_propensity)},
      {"strength_sd", fmt_g17(opts.strength_sd)},
      {"drift", fmt_g17(opts.drift)},
      {"common_factor", fmt_g17(opts.common_factor)},
  };
  manifest.outputs = {"matches.csv", "truth.json"};
  finish_manifest(opts.out_dir, manifest, warnings);
}

void run_report(const ReportOpts& opts, Warnings* warnings) {
  if (opts.run_dir.empty()) throw Error("a run directory is required (--run)");
  const std::string out = opts.out_file.empty()
                              ? join_path(opts.run_dir, "report.json")
                              : opts.out_file;
  write_text_atomic(out, build_report_json(opts.run_dir));
  (void)warnings;
}

}  // namespace synthbal
