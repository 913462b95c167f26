#pragma once

#include <string>
#include <vector>

#include "synthbal/league.hpp"
#include "synthbal/metrics.hpp"

namespace synthbal {

enum class Outcome { dcb, namsi_hat, avg_goals };

std::string outcome_name(Outcome o);           // "dcb", "namsi_hat", "avg_goals"
Outcome parse_outcome(const std::string& name);
std::string outcome_label(Outcome o);          // "DCB", "NAMSI_HAT", "AVG_GOALS"

// Rectangular leagues x seasons grid of the chosen outcome plus the three
// season covariates. Row-major storage: cell (unit u, season s) sits at
// u * seasons.size() + s.
struct PanelDataset {
  std::vector<std::string> units;
  std::vector<int> seasons;  // strictly increasing
  Outcome outcome = Outcome::dcb;
  std::vector<double> outcome_values;
  std::vector<double> cov_win_share;
  std::vector<double> cov_draw_share;
  std::vector<double> cov_team_count;

  int n_units() const { return static_cast<int>(units.size()); }
  int n_seasons() const { return static_cast<int>(seasons.size()); }
  int unit_index(const std::string& id) const;  // -1 when absent
  int season_index(int year) const;             // -1 when absent

  double outcome_at(int unit, int season) const {
    return outcome_values[static_cast<size_t>(unit) * seasons.size() + season];
  }
  double& outcome_at(int unit, int season) {
    return outcome_values[static_cast<size_t>(unit) * seasons.size() + season];
  }

  void validate() const;
};

// Treatment-anchored lag specification plus covariate toggles. Lag years
// start at the first pre-period year and step by lag_gap while strictly
// before the treatment year.
struct PredictorSpec {
  int lag_gap = 2;  // the paper's specifications use 1, 2, 3 or 5
  bool include_avg_wins = true;
  bool include_avg_draws = true;
  bool include_team_count = true;
};

// X1 (treated) and X0 (donors) stacked per predictor row. Lag rows are
// point-in-time outcome values; covariate rows are pre-period means.
struct PredictorBlock {
  std::vector<std::string> labels;     // e.g. "DCB(1969)", "avg_win_share"
  std::vector<double> treated;         // X1, one entry per row
  std::vector<double> donor_values;    // X0 row-major, rows() x cols()
  std::vector<std::string> donor_ids;  // column order = donor list order

  int rows() const { return static_cast<int>(labels.size()); }
  int cols() const { return static_cast<int>(donor_ids.size()); }
  double donor_at(int row, int col) const {
    return donor_values[static_cast<size_t>(row) * donor_ids.size() + col];
  }
};

// Lag years {first, first+gap, ...} strictly before treatment_year.
std::vector<int> lag_years(int first_year, int treatment_year, int gap);

// Assemble a rectangular panel from season tables. Each cell is computed
// under the points rule in force for that league-season per `schedule`;
// missing league-seasons are an error listing every gap.
PanelDataset build_panel(const std::vector<SeasonTable>& tables, Outcome outcome,
                         const RuleSchedule& schedule,
                         Warnings* warnings = nullptr);

// Donor list defaults to every non-treated unit in panel order. X0 columns
// follow the donor list, so weights read off by position.
PredictorBlock build_predictors(const PanelDataset& panel,
                                const std::string& treated, int treatment_year,
                                const PredictorSpec& spec,
                                const std::vector<std::string>& donors = {});

}  // namespace synthbal
