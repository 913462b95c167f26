#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "synthbal/artifacts.hpp"

namespace synthbal {

// Mirror of the declarative analysis config file (key = value):
//   outcome, treated, treatment_year, donors, lag_gap, covariates,
//   window (first-last), matches (optional path), seed.
struct AnalysisConfig {
  Outcome outcome = Outcome::dcb;
  std::string treated = "ENG";
  int treatment_year = 1981;
  std::vector<std::string> donors;  // empty = every other league in the data
  int lag_gap = 2;
  bool cov_wins = true;
  bool cov_draws = true;
  bool cov_teams = true;
  int window_first = 1963;
  int window_last = 1993;
  std::string matches;  // optional; CLI flag overrides
  std::uint64_t seed = 42;
};

AnalysisConfig load_analysis_config(const std::string& path);

// Rule schedule file: one "league_id = adoption_year" per line.
RuleSchedule load_rule_schedule(const std::string& path);

struct CommonOpts {
  std::string matches;   // matches CSV; may instead come from the config file
  std::string config;    // analysis config path
  std::string rules;     // rule schedule path; empty = paper defaults
  std::string out_dir;
  std::optional<std::uint64_t> seed;  // overrides the config seed
};

void run_ingest(const CommonOpts& opts, Warnings* warnings = nullptr);

struct MetricsOpts {
  CommonOpts common;
  bool goals_per_match = false;  // default is goals per team per match
};
void run_metrics(const MetricsOpts& opts, Warnings* warnings = nullptr);

void run_scm(const CommonOpts& opts, Warnings* warnings = nullptr);

struct PlaceboOpts {
  CommonOpts common;
  bool space = true;
  std::optional<int> time_year;
};
void run_placebo(const PlaceboOpts& opts, Warnings* warnings = nullptr);

void run_loo(const CommonOpts& opts, Warnings* warnings = nullptr);
void run_did(const CommonOpts& opts, Warnings* warnings = nullptr);

struct SimulateOpts {
  std::string out_dir;
  int leagues = 6;
  int teams = 14;  // league sizes cycle through {teams, teams+2, teams+4}
  int first_season = 1963;
  int last_season = 1993;
  std::string treated = "L01";
  int treatment_year = 1981;
  double effect = 0.0;
  double draw_propensity = 0.35;
  double strength_sd = 0.5;
  double drift = 0.05;
  double common_factor = 0.2;
  std::uint64_t seed = 1;
};
void run_simulate(const SimulateOpts& opts, Warnings* warnings = nullptr);

struct ReportOpts {
  std::string run_dir;
  std::string out_file;  // default: <run_dir>/report.json
};
void run_report(const ReportOpts& opts, Warnings* warnings = nullptr);

// Shared pipeline helpers (also used by tests).
std::vector<SeasonTable> tables_from_matches(
    const std::vector<MatchRecord>& matches, const RuleSchedule& schedule);
PanelDataset panel_for_analysis(const std::vector<MatchRecord>& matches,
                                const AnalysisConfig& config,
                                const RuleSchedule& schedule,
                                Warnings* warnings = nullptr);
ScmConfig scm_config_from(const AnalysisConfig& config,
                          const PanelDataset& panel);

}  // namespace synthbal
