#include "synthbal/panel.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace synthbal {

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::dcb: return "dcb";
    case Outcome::namsi_hat: return "namsi_hat";
    case Outcome::avg_goals: return "avg_goals";
  }
  throw Error("unknown outcome");
}

Outcome parse_outcome(const std::string& name) {
  if (name == "dcb") return Outcome::dcb;
  if (name == "namsi_hat") return Outcome::namsi_hat;
  if (name == "avg_goals") return Outcome::avg_goals;
  throw Error("unknown outcome '" + name + "' (expected dcb, namsi_hat or avg_goals)");
}

std::string outcome_label(Outcome o) {
  switch (o) {
    case Outcome::dcb: return "DCB";
    case Outcome::namsi_hat: return "NAMSI_HAT";
    case Outcome::avg_goals: return "AVG_GOALS";
  }
  throw Error("unknown outcome");
}

int PanelDataset::unit_index(const std::string& id) const {
  auto it = std::find(units.begin(), units.end(), id);
  return it == units.end() ? -1 : static_cast<int>(it - units.begin());
}

int PanelDataset::season_index(int year) const {
  auto it = std::find(seasons.begin(), seasons.end(), year);
  return it == seasons.end() ? -1 : static_cast<int>(it - seasons.begin());
}

void PanelDataset::validate() const {
  if (units.empty() || seasons.empty()) throw Error("panel: empty axis");
  for (size_t i = 1; i < seasons.size(); ++i) {
    if (seasons[i] <= seasons[i - 1]) {
      throw Error("panel: seasons must be strictly increasing");
    }
  }
  const size_t cells = units.size() * seasons.size();
  if (outcome_values.size() != cells || cov_win_share.size() != cells ||
      cov_draw_share.size() != cells || cov_team_count.size() != cells) {
    throw Error("panel: incomplete rectangle");
  }
  std::set<std::string> ids(units.begin(), units.end());
  if (ids.size() != units.size()) throw Error("panel: duplicate unit ids");
}

std::vector<int> lag_years(int first_year, int treatment_year, int gap) {
  if (gap < 1) throw Error("lag gap must be >= 1");
  std::vector<int> years;
  for (int y = first_year; y < treatment_year; y += gap) years.push_back(y);
  return years;
}

namespace {

double outcome_value(const SeasonTable& scored, Outcome outcome,
                     const PointsRule& rule) {
  switch (outcome) {
    case Outcome::dcb: return dcb(scored, rule);
    case Outcome::namsi_hat: return namsi_hat(scored);
    case Outcome::avg_goals: return avg_goals_from_table(scored);
  }
  throw Error("unknown outcome");
}

}  // namespace

PanelDataset build_panel(const std::vector<SeasonTable>& tables, Outcome outcome,
                         const RuleSchedule& schedule, Warnings* warnings) {
  if (tables.empty()) throw Error("build_panel: no season tables");

  std::set<std::string> unit_set;
  std::set<int> season_set;
  std::map<LeagueSeasonKey, const SeasonTable*> by_key;
  for (const auto& t : tables) {
    unit_set.insert(t.league_id);
    season_set.insert(t.season_start_year);
    auto [it, inserted] = by_key.try_emplace({t.league_id, t.season_start_year}, &t);
    if (!inserted) {
      throw Error("build_panel: duplicate table for " + t.league_id + " " +
                  std::to_string(t.season_start_year));
    }
  }

  PanelDataset panel;
  panel.units.assign(unit_set.begin(), unit_set.end());
  panel.outcome = outcome;
  for (int y = *season_set.begin(); y <= *season_set.rbegin(); ++y) {
    panel.seasons.push_back(y);
  }

  std::vector<std::string> gaps;
  for (const auto& unit : panel.units) {
    for (int year : panel.seasons) {
      if (!by_key.count({unit, year})) {
        gaps.push_back(unit + " " + std::to_string(year));
      }
    }
  }
  if (!gaps.empty()) {
    std::string msg = "build_panel: missing league-seasons:";
    for (const auto& g : gaps) msg += " " + g;
    throw Error(msg);
  }

  const size_t cells = panel.units.size() * panel.seasons.size();
  panel.outcome_values.resize(cells);
  panel.cov_win_share.resize(cells);
  panel.cov_draw_share.resize(cells);
  panel.cov_team_count.resize(cells);

  for (size_t u = 0; u < panel.units.size(); ++u) {
    for (size_t s = 0; s < panel.seasons.size(); ++s) {
      const SeasonTable& raw = *by_key.at({panel.units[u], panel.seasons[s]});
      const PointsRule rule = schedule.rule_for(raw.league_id, raw.season_start_year);
      const SeasonTable scored = raw.rule == rule ? raw : raw.with_rule(rule);
      const size_t cell = u * panel.seasons.size() + s;
      panel.outcome_values[cell] = outcome_value(scored, outcome, rule);
      const auto cov = season_covariates(scored);
      panel.cov_win_share[cell] = cov.avg_win_share;
      panel.cov_draw_share[cell] = cov.avg_draw_share;
      panel.cov_team_count[cell] = cov.team_count;
      if (scored.team_count() < 2) {
        warn(warnings, "degenerate season " + raw.league_id + " " +
                           std::to_string(raw.season_start_year));
      }
    }
  }
  panel.validate();
  return panel;
}

PredictorBlock build_predictors(const PanelDataset& panel,
                                const std::string& treated, int treatment_year,
                                const PredictorSpec& spec,
                                const std::vector<std::string>& donors) {
  panel.validate();
  const int treated_idx = panel.unit_index(treated);
  if (treated_idx < 0) throw Error("treated unit '" + treated + "' not in panel");

  const int first_year = panel.seasons.front();
  if (treatment_year <= first_year || treatment_year > panel.seasons.back()) {
    throw Error("treatment year " + std::to_string(treatment_year) +
                " leaves no pre-period inside the panel window " +
                std::to_string(first_year) + "-" +
                std::to_string(panel.seasons.back()));
  }

  std::vector<std::string> donor_ids = donors;
  if (donor_ids.empty()) {
    for (const auto& u : panel.units) {
      if (u != treated) donor_ids.push_back(u);
    }
  }
  if (donor_ids.empty()) throw Error("no donors available");
  std::vector<int> donor_idx;
  for (const auto& d : donor_ids) {
    const int idx = panel.unit_index(d);
    if (idx < 0) throw Error("donor '" + d + "' not in panel");
    if (d == treated) throw Error("treated unit '" + d + "' cannot be a donor");
    donor_idx.push_back(idx);
  }

  PredictorBlock block;
  block.donor_ids = donor_ids;

  const std::string label = outcome_label(panel.outcome);
  auto add_row = [&](const std::string& name, double x1,
                     const std::vector<double>& x0) {
    block.labels.push_back(name);
    block.treated.push_back(x1);
    block.donor_values.insert(block.donor_values.end(), x0.begin(), x0.end());
  };

  for (int year : lag_years(first_year, treatment_year, spec.lag_gap)) {
    const int s = panel.season_index(year);
    std::vector<double> x0;
    x0.reserve(donor_idx.size());
    for (int d : donor_idx) x0.push_back(panel.outcome_at(d, s));
    add_row(label + "(" + std::to_string(year) + ")",
            panel.outcome_at(treated_idx, s), x0);
  }

  // pre-period means of each covariate
  auto pre_mean = [&](const std::vector<double>& values, int unit) {
    double sum = 0.0;
    int n = 0;
    for (size_t s = 0; s < panel.seasons.size(); ++s) {
      if (panel.seasons[s] >= treatment_year) break;
      sum += values[static_cast<size_t>(unit) * panel.seasons.size() + s];
      ++n;
    }
    return sum / n;
  };
  auto add_cov = [&](const std::string& name, const std::vector<double>& values) {
    std::vector<double> x0;
    x0.reserve(donor_idx.size());
    for (int d : donor_idx) x0.push_back(pre_mean(values, d));
    add_row(name, pre_mean(values, treated_idx), x0);
  };
  if (spec.include_avg_wins) add_cov("avg_win_share", panel.cov_win_share);
  if (spec.include_avg_draws) add_cov("avg_draw_share", panel.cov_draw_share);
  if (spec.include_team_count) add_cov("team_count", panel.cov_team_count);

  if (block.labels.empty()) throw Error("predictor block is empty");
  return block;
}

}  // namespace synthbal
