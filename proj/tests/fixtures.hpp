#pragma once

// Hand-built seasons and panels shared across test files.

#include <functional>
#include <string>
#include <vector>

#include "synthbal/panel.hpp"

namespace fixtures {

// every fixture drawn g-g
inline std::vector<synthbal::MatchRecord> all_draw_season(
    int k, const std::string& league = "X", int season = 1970, int goals = 0) {
  std::vector<synthbal::MatchRecord> matches;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      matches.push_back({league, season, "T" + std::to_string(i),
                         "T" + std::to_string(j), goals, goals});
    }
  }
  return matches;
}

// fully hierarchical: team i beats team j (i < j) home and away
inline std::vector<synthbal::MatchRecord> cascade_season(
    int k, const std::string& league = "X", int season = 1970) {
  std::vector<synthbal::MatchRecord> matches;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const bool home_wins = i < j;
      matches.push_back({league, season, "T" + std::to_string(i),
                         "T" + std::to_string(j), home_wins ? 1 : 0,
                         home_wins ? 0 : 1});
    }
  }
  return matches;
}

// the home side always wins: every team ends on w = 0.5 with no draws
inline std::vector<synthbal::MatchRecord> balanced_season(
    int k, const std::string& league = "X", int season = 1970) {
  std::vector<synthbal::MatchRecord> matches;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      matches.push_back({league, season, "T" + std::to_string(i),
                         "T" + std::to_string(j), 2, 1});
    }
  }
  return matches;
}

// direct panel construction for estimator tests
inline synthbal::PanelDataset make_panel(
    const std::vector<std::string>& units, int first_season, int last_season,
    const std::function<double(int unit, int year)>& outcome,
    synthbal::Outcome name = synthbal::Outcome::dcb) {
  synthbal::PanelDataset panel;
  panel.units = units;
  for (int y = first_season; y <= last_season; ++y) panel.seasons.push_back(y);
  panel.outcome = name;
  const size_t cells = units.size() * panel.seasons.size();
  panel.outcome_values.resize(cells);
  panel.cov_win_share.assign(cells, 0.35);
  panel.cov_draw_share.assign(cells, 0.27);
  panel.cov_team_count.assign(cells, 20.0);
  for (size_t u = 0; u < units.size(); ++u) {
    for (size_t s = 0; s < panel.seasons.size(); ++s) {
      panel.outcome_values[u * panel.seasons.size() + s] =
          outcome(static_cast<int>(u), panel.seasons[s]);
    }
  }
  panel.validate();
  return panel;
}

}  // namespace fixtures
