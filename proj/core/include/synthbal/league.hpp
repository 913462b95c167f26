#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "synthbal/common.hpp"

namespace synthbal {

// One played fixture. season_start_year identifies the season by its starting
// calendar year ("1981" = season 1981-82).
struct MatchRecord {
  std::string league_id;
  int season_start_year = 0;
  std::string home_team;
  std::string away_team;
  int home_goals = 0;
  int away_goals = 0;

  bool operator==(const MatchRecord&) const = default;
};

// Points awarded per result; win > draw > loss is enforced.
struct PointsRule {
  int win_points = 2;
  int draw_points = 1;
  int loss_points = 0;

  void validate() const;
  bool operator==(const PointsRule&) const = default;
};

PointsRule two_point_rule();    // 2-1-0
PointsRule three_point_rule();  // 3-1-0

// league_id -> first season_start_year played under the 3-point rule.
// Leagues absent from the map stay on the 2-point rule.
struct RuleSchedule {
  std::map<std::string, int> adoption_year;

  PointsRule rule_for(const std::string& league_id, int season_start_year) const;
};

// ENG=1981, ITA=1994, FRA=1994, GER=1995, ESP=1995, NED=1995
RuleSchedule default_rule_schedule();

struct TeamRow {
  std::string team;
  int matches_played = 0;
  int wins = 0;
  int draws = 0;
  int losses = 0;
  int goals_for = 0;
  int goals_against = 0;
  int points = 0;
};

// Standings for one league-season. Rows are kept in team-identifier order so
// identical inputs always produce identical tables. Incomplete round robins
// are fine: every quantity is defined from realized fixtures.
struct SeasonTable {
  std::string league_id;
  int season_start_year = 0;
  PointsRule rule;
  std::vector<TeamRow> rows;

  int team_count() const { return static_cast<int>(rows.size()); }
  long long total_points() const;
  int total_matches() const;  // each played match counted once
  long long total_goals() const;
  int total_wins() const;
  int total_draws() const;  // summed per team (2 per drawn match)

  std::vector<double> points_shares() const;  // s_k, sums to 1
  std::vector<double> win_shares() const;     // w_k = wins_k / m_k
  std::vector<double> draw_shares() const;    // d_k = draws_k / m_k

  // Same counts re-scored under another points rule.
  SeasonTable with_rule(const PointsRule& new_rule) const;

  void validate() const;  // aggregate invariants; throws Error
};

// "league_id,season_start_year,home_team,away_team,home_goals,away_goals"
extern const char kMatchesCsvHeader[];

// Parse the matches CSV. Malformed rows throw with line and field named;
// duplicate fixtures within a season produce a warning but are retained.
std::vector<MatchRecord> parse_matches(std::istream& in, Warnings* warnings = nullptr);
std::vector<MatchRecord> parse_matches_file(const std::string& path,
                                            Warnings* warnings = nullptr);

// All records must share one league and season; at least one match.
SeasonTable build_season_table(const std::vector<MatchRecord>& matches,
                               const PointsRule& rule);

struct SeasonCovariates {
  double avg_win_share = 0.0;   // mean over teams of wins_k / m_k
  double avg_draw_share = 0.0;  // mean over teams of draws_k / m_k
  int team_count = 0;
};

SeasonCovariates season_covariates(const SeasonTable& table);

using LeagueSeasonKey = std::pair<std::string, int>;

// Deterministic grouping (ordered by league then season).
std::map<LeagueSeasonKey, std::vector<MatchRecord>> group_by_league_season(
    const std::vector<MatchRecord>& matches);

}  // namespace synthbal
