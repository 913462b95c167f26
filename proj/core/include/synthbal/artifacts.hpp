#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "synthbal/did.hpp"
#include "synthbal/inference.hpp"
#include "synthbal/metrics.hpp"
#include "synthbal/scm.hpp"
#include "synthbal/simgen.hpp"

namespace synthbal {

// Emitted file formats. CSV values are fixed to 4 decimals, JSON numbers to
// 17 significant digits; every table is re-parseable by the readers below.

struct MetricsRow {
  std::string league_id;
  int season_start_year = 0;
  int win_points = 0;
  int team_count = 0;
  int matches = 0;
  BalanceIndices indices;
};

void write_matches_csv(const std::string& path,
                       const std::vector<MatchRecord>& matches);
void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows);
void write_coverage_csv(const std::string& path,
                        const std::vector<SeasonTable>& tables);
void write_weights_csv(const std::string& path, const ScmFit& fit);
void write_vweights_csv(const std::string& path, const ScmFit& fit);
void write_balance_csv(const std::string& path, const ScmFit& fit);
void write_effects_csv(const std::string& path, const ScmFit& fit);
void write_scm_summary_json(const std::string& path, const ScmFit& fit,
                            Outcome outcome);
void write_placebo_space_csv(const std::string& path,
                             const std::vector<PlaceboResult>& results);
void write_placebo_time_csv(const std::string& path, const PlaceboResult& result);
void write_loo_envelope_csv(const std::string& path, const LooResult& result);
void write_did_csv(const std::string& path, const DidFit& fit);
void write_did_json(const std::string& path, const DidFit& fit);
void write_truth_json(const std::string& path, const SimTruth& truth);

struct EffectsTable {
  std::vector<int> years;
  std::vector<double> actual;
  std::vector<double> predicted;
  std::vector<double> effect;
};
EffectsTable read_effects_csv(const std::string& path);

struct WeightRow {
  std::string id;
  double weight = 0.0;
};
std::vector<WeightRow> read_weights_csv(const std::string& path);

std::vector<LooEnvelopeRow> read_loo_envelope_csv(const std::string& path);

struct PlaceboSpaceRow {
  std::string pseudo_treated;
  double ate = 0.0;
  double pre_rmse = 0.0;
};
std::vector<PlaceboSpaceRow> read_placebo_space_csv(const std::string& path);

struct PlaceboTimeRow {
  int pseudo_year = 0;
  int eval_first = 0;
  int eval_last = 0;
  double ate = 0.0;
  double pre_rmse = 0.0;
};
PlaceboTimeRow read_placebo_time_csv(const std::string& path);

// Every run drops one of these next to its artifacts.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> config;  // resolved, ordered
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
};
void write_manifest_json(const std::string& path, const RunManifest& manifest);

// Consolidated report: bundles whatever tables exist in the run directory
// plus the figure-shaped series (year/actual/synthetic, year/gap,
// year/min/max). Errors when the directory holds none of the known files.
std::string build_report_json(const std::string& run_dir);

}  // namespace synthbal
