#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "synthbal/league.hpp"

using namespace synthbal;

namespace {

std::vector<MatchRecord> parse_str(const std::string& text,
                                   Warnings* warnings = nullptr) {
  std::istringstream in(text);
  return parse_matches(in, warnings);
}

const TeamRow& row_of(const SeasonTable& t, const std::string& team) {
  for (const auto& r : t.rows) {
    if (r.team == team) return r;
  }
  REQUIRE(false);
  return t.rows.front();
}

}  // namespace

TEST_CASE("matches csv: header-only input parses to an empty list") {
  CHECK(parse_str(std::string(kMatchesCsvHeader) + "\n").empty());
}

TEST_CASE("matches csv: one row maps fields directly") {
  const auto records =
      parse_str(std::string(kMatchesCsvHeader) + "\nENG,1981,Arsenal,Spurs,2,0\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0].league_id == "ENG");
  CHECK(records[0].season_start_year == 1981);
  CHECK(records[0].home_team == "Arsenal");
  CHECK(records[0].away_team == "Spurs");
  CHECK(records[0].home_goals == 2);
  CHECK(records[0].away_goals == 0);
}

TEST_CASE("matches csv: malformed rows name the line and field") {
  const std::string header(kMatchesCsvHeader);
  CHECK_THROWS_WITH_AS(parse_str(header + "\nENG,1981,A,B,2,-1\n"),
                       doctest::Contains("line 2"), Error);
  CHECK_THROWS_WITH_AS(parse_str(header + "\nENG,1981,A,B,2,-1\n"),
                       doctest::Contains("away_goals"), Error);
  CHECK_THROWS_WITH_AS(parse_str(header + "\nENG,1981,A,B,x,0\n"),
                       doctest::Contains("home_goals"), Error);
  CHECK_THROWS_WITH_AS(parse_str(header + "\nENG,1981,A,B,2\n"),
                       doctest::Contains("expected 6 fields"), Error);
  CHECK_THROWS_WITH_AS(parse_str(header + "\nENG,1981,A,A,2,0\n"),
                       doctest::Contains("home_team equals away_team"), Error);
  CHECK_THROWS_AS(parse_str("league,season\nENG,1981\n"), Error);
}

TEST_CASE("matches csv: CRLF line endings parse cleanly") {
  const auto records = parse_str(std::string(kMatchesCsvHeader) +
                                 "\r\nENG,1981,A,B,2,0\r\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0].away_team == "B");
  CHECK(records[0].home_goals == 2);
}

TEST_CASE("matches csv: duplicate fixtures warn but are retained") {
  Warnings warnings;
  const auto records = parse_str(std::string(kMatchesCsvHeader) +
                                     "\nENG,1981,A,B,2,0\nENG,1981,A,B,1,1\n",
                                 &warnings);
  CHECK(records.size() == 2);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("duplicate fixture") != std::string::npos);
}

TEST_CASE("season table: all-draw double round robin under the 2-point rule") {
  const auto table =
      build_season_table(fixtures::all_draw_season(3), two_point_rule());
  CHECK(table.team_count() == 3);
  for (const auto& r : table.rows) {
    CHECK(r.matches_played == 4);
    CHECK(r.draws == 4);
    CHECK(r.points == 4);
  }
  for (double s : table.points_shares()) {
    CHECK(s == doctest::Approx(1.0 / 3).epsilon(1e-14));
  }
}

TEST_CASE("season table: 3-team cascade points and shares") {
  const auto matches = fixtures::cascade_season(3);
  REQUIRE(matches.size() == 6);

  const auto two = build_season_table(matches, two_point_rule());
  CHECK(row_of(two, "T0").points == 8);
  CHECK(row_of(two, "T1").points == 4);
  CHECK(row_of(two, "T2").points == 0);
  const auto shares2 = two.points_shares();
  CHECK(shares2[0] == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(shares2[1] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(shares2[2] == 0.0);

  // same season under 3 points per win: points change, shares do not
  const auto three = build_season_table(matches, three_point_rule());
  CHECK(row_of(three, "T0").points == 12);
  CHECK(row_of(three, "T1").points == 6);
  CHECK(row_of(three, "T2").points == 0);
  const auto shares3 = three.points_shares();
  for (size_t i = 0; i < shares3.size(); ++i) {
    CHECK(shares3[i] == doctest::Approx(shares2[i]).epsilon(1e-14));
  }
}

TEST_CASE("season table: rejects empty and mixed inputs") {
  CHECK_THROWS_AS(build_season_table({}, two_point_rule()), Error);

  auto mixed = fixtures::all_draw_season(3, "ENG", 1980);
  mixed.push_back({"GER", 1980, "T0", "T1", 1, 1});
  CHECK_THROWS_WITH_AS(build_season_table(mixed, two_point_rule()),
                       doctest::Contains("mixed league/season"), Error);

  auto mixed_season = fixtures::all_draw_season(3, "ENG", 1980);
  mixed_season.push_back({"ENG", 1981, "T0", "T1", 1, 1});
  CHECK_THROWS_AS(build_season_table(mixed_season, two_point_rule()), Error);
}

TEST_CASE("points rule validation") {
  CHECK_THROWS_AS((PointsRule{1, 1, 0}.validate()), Error);
  CHECK_THROWS_AS((PointsRule{3, 0, 1}.validate()), Error);
  CHECK_NOTHROW((PointsRule{3, 1, 0}.validate()));
}

TEST_CASE("season covariates") {
  const auto draws =
      build_season_table(fixtures::all_draw_season(3), two_point_rule());
  auto cov = season_covariates(draws);
  CHECK(cov.avg_win_share == 0.0);
  CHECK(cov.avg_draw_share == 1.0);
  CHECK(cov.team_count == 3);

  const auto cascade =
      build_season_table(fixtures::cascade_season(3), two_point_rule());
  cov = season_covariates(cascade);
  // mean of win shares (1, 0.5, 0)
  CHECK(cov.avg_win_share == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cov.avg_draw_share == 0.0);
  CHECK(cov.team_count == 3);
}

TEST_CASE("season table construction is deterministic") {
  const auto matches = oracle::random_season_matches(99, 8, 0.3);
  const auto a = build_season_table(matches, two_point_rule());
  const auto b = build_season_table(matches, two_point_rule());
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].team == b.rows[i].team);
    CHECK(a.rows[i].points == b.rows[i].points);
    CHECK(a.rows[i].goals_for == b.rows[i].goals_for);
  }
}

TEST_CASE("points conservation over random seasons") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto matches = oracle::random_season_matches(seed, 2 + seed % 7, 0.25);
    const auto two = build_season_table(matches, two_point_rule());
    CHECK(two.total_points() == 2LL * two.total_matches());

    const auto three = build_season_table(matches, three_point_rule());
    const long long drawn = three.total_draws() / 2;
    CHECK(three.total_points() == 3LL * three.total_matches() - drawn);
  }
}

TEST_CASE("share vector is permutation-equivariant in team labels") {
  const auto matches = oracle::random_season_matches(7, 6, 0.3);
  std::vector<MatchRecord> relabeled = matches;
  const std::map<std::string, std::string> rename = {
      {"T0", "zeta"}, {"T1", "alpha"}, {"T2", "mid"},
      {"T3", "beta"}, {"T4", "omega"}, {"T5", "kappa"}};
  for (auto& m : relabeled) {
    m.home_team = rename.at(m.home_team);
    m.away_team = rename.at(m.away_team);
  }
  auto original = build_season_table(matches, two_point_rule());
  auto renamed = build_season_table(relabeled, two_point_rule());

  for (const auto& [from, to] : rename) {
    CHECK(row_of(original, from).points == row_of(renamed, to).points);
  }
  auto s1 = original.points_shares();
  auto s2 = renamed.points_shares();
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  CHECK(s1 == s2);
}

TEST_CASE("with_rule rescoring keeps counts and swaps points") {
  const auto matches = oracle::random_season_matches(3, 5, 0.4);
  const auto two = build_season_table(matches, two_point_rule());
  const auto three = two.with_rule(three_point_rule());
  for (size_t i = 0; i < two.rows.size(); ++i) {
    CHECK(three.rows[i].wins == two.rows[i].wins);
    CHECK(three.rows[i].points ==
          3 * two.rows[i].wins + two.rows[i].draws);
  }
}

TEST_CASE("rule schedule: in-force rule per league-season") {
  const auto schedule = default_rule_schedule();
  CHECK(schedule.rule_for("ENG", 1980) == two_point_rule());
  CHECK(schedule.rule_for("ENG", 1981) == three_point_rule());
  CHECK(schedule.rule_for("GER", 1993) == two_point_rule());
  CHECK(schedule.rule_for("FRA", 1994) == three_point_rule());
  CHECK(schedule.rule_for("UNKNOWN", 2000) == two_point_rule());
}
