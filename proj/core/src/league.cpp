#include "synthbal/league.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "synthbal/io.hpp"

namespace synthbal {

const char kMatchesCsvHeader[] =
    "league_id,season_start_year,home_team,away_team,home_goals,away_goals";

void PointsRule::validate() const {
  if (!(win_points > draw_points && draw_points > loss_points)) {
    throw Error("points rule requires win > draw > loss, got " +
                std::to_string(win_points) + "/" + std::to_string(draw_points) +
                "/" + std::to_string(loss_points));
  }
  if (loss_points < 0) throw Error("loss points must be non-negative");
}

PointsRule two_point_rule() { return PointsRule{2, 1, 0}; }
PointsRule three_point_rule() { return PointsRule{3, 1, 0}; }

PointsRule RuleSchedule::rule_for(const std::string& league_id,
                                  int season_start_year) const {
  auto it = adoption_year.find(league_id);
  if (it != adoption_year.end() && season_start_year >= it->second) {
    return three_point_rule();
  }
  return two_point_rule();
}

RuleSchedule default_rule_schedule() {
  RuleSchedule s;
  s.adoption_year = {{"ENG", 1981}, {"ITA", 1994}, {"FRA", 1994},
                     {"GER", 1995}, {"ESP", 1995}, {"NED", 1995}};
  return s;
}

long long SeasonTable::total_points() const {
  long long p = 0;
  for (const auto& r : rows) p += r.points;
  return p;
}

int SeasonTable::total_matches() const {
  int m = 0;
  for (const auto& r : rows) m += r.matches_played;
  return m / 2;
}

long long SeasonTable::total_goals() const {
  long long g = 0;
  for (const auto& r : rows) g += r.goals_for;
  return g;
}

int SeasonTable::total_wins() const {
  int w = 0;
  for (const auto& r : rows) w += r.wins;
  return w;
}

int SeasonTable::total_draws() const {
  int d = 0;
  for (const auto& r : rows) d += r.draws;
  return d;
}

std::vector<double> SeasonTable::points_shares() const {
  const double total = static_cast<double>(total_points());
  if (total <= 0) throw Error("points shares undefined: total points is zero");
  std::vector<double> s;
  s.reserve(rows.size());
  for (const auto& r : rows) s.push_back(static_cast<double>(r.points) / total);
  return s;
}

std::vector<double> SeasonTable::win_shares() const {
  std::vector<double> w;
  w.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.matches_played <= 0) {
      throw Error("team '" + r.team + "' has no played matches");
    }
    w.push_back(static_cast<double>(r.wins) / r.matches_played);
  }
  return w;
}

std::vector<double> SeasonTable::draw_shares() const {
  std::vector<double> d;
  d.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.matches_played <= 0) {
      throw Error("team '" + r.team + "' has no played matches");
    }
    d.push_back(static_cast<double>(r.draws) / r.matches_played);
  }
  return d;
}

SeasonTable SeasonTable::with_rule(const PointsRule& new_rule) const {
  new_rule.validate();
  SeasonTable t = *this;
  t.rule = new_rule;
  for (auto& r : t.rows) {
    r.points = new_rule.win_points * r.wins + new_rule.draw_points * r.draws +
               new_rule.loss_points * r.losses;
  }
  return t;
}

void SeasonTable::validate() const {
  if (rows.size() < 2) {
    throw Error(league_id + " " + std::to_string(season_start_year) +
                ": a season table needs at least two teams");
  }
  int wins = 0, draws = 0, losses = 0;
  for (const auto& r : rows) {
    if (r.wins + r.draws + r.losses != r.matches_played) {
      throw Error("team '" + r.team + "': wins+draws+losses != matches played");
    }
    wins += r.wins;
    draws += r.draws;
    losses += r.losses;
  }
  if (wins != losses) throw Error("total wins != total losses");
  if (draws % 2 != 0) throw Error("per-team draw count must be even in total");
  if (rule == two_point_rule() &&
      total_points() != 2LL * total_matches()) {
    throw Error("2-point rule: total points must equal twice the match count");
  }
  if (total_points() > 0) {
    double sum = 0;
    for (double s : points_shares()) sum += s;
    if (std::abs(sum - 1.0) > 1e-12) {
      throw Error("points shares do not sum to 1");
    }
  }
}

namespace {

int parse_goals(const std::string& text, int lineno, const char* field) {
  long long v;
  try {
    v = parse_int(text, field);
  } catch (const Error&) {
    throw Error("line " + std::to_string(lineno) + ": " + field +
                ": not a non-negative integer: '" + text + "'");
  }
  if (v < 0) {
    throw Error("line " + std::to_string(lineno) + ": " + field +
                ": not a non-negative integer: '" + text + "'");
  }
  if (v > 1000) {
    throw Error("line " + std::to_string(lineno) + ": " + field +
                ": implausible goal count: '" + text + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

std::vector<MatchRecord> parse_matches(std::istream& in, Warnings* warnings) {
  std::string line;
  if (!std::getline(in, line)) throw Error("matches csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMatchesCsvHeader) {
    throw Error(std::string("matches csv: bad header, expected '") +
                kMatchesCsvHeader + "'");
  }

  std::vector<MatchRecord> records;
  std::set<std::tuple<std::string, int, std::string, std::string>> seen;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != 6) {
      throw Error("line " + std::to_string(lineno) + ": expected 6 fields, got " +
                  std::to_string(fields.size()));
    }
    MatchRecord rec;
    rec.league_id = trim(fields[0]);
    if (rec.league_id.empty()) {
      throw Error("line " + std::to_string(lineno) + ": league_id: empty");
    }
    try {
      rec.season_start_year =
          static_cast<int>(parse_int(fields[1], "season_start_year"));
    } catch (const Error&) {
      throw Error("line " + std::to_string(lineno) +
                  ": season_start_year: not an integer: '" + fields[1] + "'");
    }
    rec.home_team = trim(fields[2]);
    rec.away_team = trim(fields[3]);
    if (rec.home_team.empty() || rec.away_team.empty()) {
      throw Error("line " + std::to_string(lineno) + ": empty team identifier");
    }
    if (rec.home_team == rec.away_team) {
      throw Error("line " + std::to_string(lineno) +
                  ": home_team equals away_team: '" + rec.home_team + "'");
    }
    rec.home_goals = parse_goals(fields[4], lineno, "home_goals");
    rec.away_goals = parse_goals(fields[5], lineno, "away_goals");

    auto key = std::make_tuple(rec.league_id, rec.season_start_year,
                               rec.home_team, rec.away_team);
    if (!seen.insert(key).second) {
      warn(warnings, "line " + std::to_string(lineno) + ": duplicate fixture " +
                         rec.home_team + " vs " + rec.away_team + " (" +
                         rec.league_id + " " +
                         std::to_string(rec.season_start_year) + "), retained");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<MatchRecord> parse_matches_file(const std::string& path,
                                            Warnings* warnings) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  try {
    return parse_matches(in, warnings);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

SeasonTable build_season_table(const std::vector<MatchRecord>& matches,
                               const PointsRule& rule) {
  rule.validate();
  if (matches.empty()) throw Error("cannot build a season table from zero matches");

  const std::string& league = matches.front().league_id;
  const int season = matches.front().season_start_year;
  for (const auto& m : matches) {
    if (m.league_id != league || m.season_start_year != season) {
      throw Error("mixed league/season in one table: " + league + " " +
                  std::to_string(season) + " vs " + m.league_id + " " +
                  std::to_string(m.season_start_year));
    }
    if (m.home_team == m.away_team) {
      throw Error("match with identical teams: '" + m.home_team + "'");
    }
    if (m.home_goals < 0 || m.away_goals < 0) {
      throw Error("negative goals in match " + m.home_team + " vs " + m.away_team);
    }
  }

  std::map<std::string, TeamRow> table;  // ordered: determinism by team id
  auto row = [&table](const std::string& team) -> TeamRow& {
    auto [it, inserted] = table.try_emplace(team);
    if (inserted) it->second.team = team;
    return it->second;
  };

  for (const auto& m : matches) {
    TeamRow& home = row(m.home_team);
    TeamRow& away = row(m.away_team);
    home.matches_played++;
    away.matches_played++;
    home.goals_for += m.home_goals;
    home.goals_against += m.away_goals;
    away.goals_for += m.away_goals;
    away.goals_against += m.home_goals;
    if (m.home_goals > m.away_goals) {
      home.wins++;
      away.losses++;
    } else if (m.home_goals < m.away_goals) {
      away.wins++;
      home.losses++;
    } else {
      home.draws++;
      away.draws++;
    }
  }

  SeasonTable out;
  out.league_id = league;
  out.season_start_year = season;
  out.rule = rule;
  out.rows.reserve(table.size());
  for (auto& [team, r] : table) {
    r.points = rule.win_points * r.wins + rule.draw_points * r.draws +
               rule.loss_points * r.losses;
    out.rows.push_back(std::move(r));
  }
  out.validate();
  return out;
}

SeasonCovariates season_covariates(const SeasonTable& table) {
  if (table.rows.empty()) throw Error("season covariates: empty table");
  SeasonCovariates cov;
  cov.team_count = table.team_count();
  double w = 0, d = 0;
  for (const auto& r : table.rows) {
    if (r.matches_played <= 0) {
      throw Error("team '" + r.team + "' has no played matches");
    }
    w += static_cast<double>(r.wins) / r.matches_played;
    d += static_cast<double>(r.draws) / r.matches_played;
  }
  cov.avg_win_share = w / cov.team_count;
  cov.avg_draw_share = d / cov.team_count;
  return cov;
}

std::map<LeagueSeasonKey, std::vector<MatchRecord>> group_by_league_season(
    const std::vector<MatchRecord>& matches) {
  std::map<LeagueSeasonKey, std::vector<MatchRecord>> groups;
  for (const auto& m : matches) {
    groups[{m.league_id, m.season_start_year}].push_back(m);
  }
  return groups;
}

}  // namespace synthbal
