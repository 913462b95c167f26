#include "synthbal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace synthbal {

double hhi(const std::vector<double>& shares) {
  if (shares.empty()) throw Error("hhi: empty share vector");
  double sum = 0.0, sq = 0.0;
  for (double s : shares) {
    if (s < 0.0) throw Error("hhi: negative share");
    sum += s;
    sq += s * s;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error("hhi: shares sum to " + std::to_string(sum) + ", expected 1");
  }
  return sq;
}

double hhi_from_counts(const std::vector<long long>& counts) {
  if (counts.empty()) throw Error("hhi: empty count vector");
  long long total = 0;
  long long sq = 0;
  for (long long c : counts) {
    if (c < 0) throw Error("hhi: negative count");
    total += c;
    sq += c * c;
  }
  if (total == 0) throw Error("hhi: all counts are zero");
  return static_cast<double>(sq) /
         (static_cast<double>(total) * static_cast<double>(total));
}

double cascade_hhi_max(int team_count) {
  if (team_count < 2) throw Error("hhi bounds require at least 2 teams");
  const double k = team_count;
  return 2.0 * (2.0 * k - 1.0) / (3.0 * k * (k - 1.0));
}

namespace {

// Max HHI over every outcome assignment of the K-team double round robin.
// K(K-1) fixtures, 3 outcomes each; K=4 is 3^12 = 531441 cases.
double enumerate_hhi_max(int k, const PointsRule& rule) {
  struct Fixture {
    int home, away;
  };
  std::vector<Fixture> fixtures;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) fixtures.push_back({i, j});

  const int m = static_cast<int>(fixtures.size());
  std::vector<int> outcome(m, 0);  // 0 home win, 1 draw, 2 away win
  std::vector<long long> points(k, 0);
  double best = 0.0;

  while (true) {
    std::fill(points.begin(), points.end(), 0);
    for (int f = 0; f < m; ++f) {
      const auto [h, a] = fixtures[f];
      switch (outcome[f]) {
        case 0:
          points[h] += rule.win_points;
          points[a] += rule.loss_points;
          break;
        case 1:
          points[h] += rule.draw_points;
          points[a] += rule.draw_points;
          break;
        default:
          points[h] += rule.loss_points;
          points[a] += rule.win_points;
          break;
      }
    }
    best = std::max(best, hhi_from_counts(points));

    int pos = 0;
    while (pos < m && outcome[pos] == 2) outcome[pos++] = 0;
    if (pos == m) break;
    outcome[pos]++;
  }
  return best;
}

double checked_sqrt_ratio(double num, double den, const char* what) {
  if (den <= 0.0) throw Error(std::string(what) + ": degenerate denominator");
  const double ratio = num / den;
  if (ratio < 0.0) return 0.0;
  return std::sqrt(ratio);
}

// Sum of squared deviations with the terms sorted before accumulation, so
// numerator and denominator of ratio indices round identically when they
// contain the same multiset of terms (exact 0 / 1 at the benchmarks).
double sum_sq_dev(std::vector<double> values, double center) {
  for (double& v : values) {
    const double d = v - center;
    v = d * d;
  }
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0);
}

double uniform_match_count(const SeasonTable& table, Warnings* warnings) {
  int min_m = table.rows.front().matches_played;
  int max_m = min_m;
  long long sum = 0;
  for (const auto& r : table.rows) {
    min_m = std::min(min_m, r.matches_played);
    max_m = std::max(max_m, r.matches_played);
    sum += r.matches_played;
  }
  if (min_m == max_m) return static_cast<double>(min_m);
  const double mean = static_cast<double>(sum) / table.team_count();
  warn(warnings, table.league_id + " " + std::to_string(table.season_start_year) +
                     ": non-uniform per-team match counts (" +
                     std::to_string(min_m) + ".." + std::to_string(max_m) +
                     "); using mean m = " + std::to_string(mean));
  return mean;
}

// Win shares of the fully predictable double round robin, rank j = 1..K.
std::vector<double> full_predictability_shares(int k) {
  std::vector<double> w(k);
  for (int j = 1; j <= k; ++j) {
    w[j - 1] = static_cast<double>(k - j) / static_cast<double>(k - 1);
  }
  return w;
}

}  // namespace

HhiBounds hhi_bounds(int team_count, const PointsRule& rule) {
  return hhi_bounds(team_count, rule,
                    team_count <= 4 ? BoundsMethod::exhaustive
                                    : BoundsMethod::cascade_formula);
}

HhiBounds hhi_bounds(int team_count, const PointsRule& rule, BoundsMethod method) {
  if (team_count < 2) throw Error("hhi bounds require at least 2 teams");
  rule.validate();
  HhiBounds b;
  b.team_count = team_count;
  b.rule = rule;
  b.method = method;
  b.hhi_min = 1.0 / team_count;
  if (method == BoundsMethod::exhaustive) {
    if (team_count > 4) {
      throw Error("exhaustive hhi bounds are limited to K <= 4");
    }
    b.hhi_max = enumerate_hhi_max(team_count, rule);
  } else {
    b.hhi_max = cascade_hhi_max(team_count);
  }
  return b;
}

double dcb(const SeasonTable& table, const PointsRule& rule) {
  const int k = table.team_count();
  if (k < 2) throw Error("dcb requires at least 2 teams");
  const SeasonTable scored = table.rule == rule ? table : table.with_rule(rule);
  if (scored.total_points() <= 0) throw Error("dcb: total points is zero");

  std::vector<long long> points;
  points.reserve(scored.rows.size());
  for (const auto& r : scored.rows) points.push_back(r.points);

  const double hhi_value = hhi_from_counts(points);
  const double lo = 1.0 / k;
  const double hi = cascade_hhi_max(k);
  const double raw = (hhi_value - lo) / (hi - lo);
  if (raw < -1e-9 || raw > 1.0 + 1e-9) {
    throw Error(table.league_id + " " + std::to_string(table.season_start_year) +
                ": normalized HHI " + std::to_string(raw) +
                " outside [0,1]: bounds violation (cascade hhi_max is not the"
                " maximum for this configuration)");
  }
  return std::sqrt(std::clamp(raw, 0.0, 1.0));
}

double sigma(const SeasonTable& table) {
  if (table.team_count() < 2) throw Error("sigma requires at least 2 teams");
  const auto w = table.win_shares();  // throws on zero-match teams
  return std::sqrt(sum_sq_dev(w, 0.5) / table.team_count());
}

double sigma_hat(const SeasonTable& table) {
  if (table.team_count() < 2) throw Error("sigma_hat requires at least 2 teams");
  const auto w = table.win_shares();
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
  return std::sqrt(sum_sq_dev(w, mean) / table.team_count());
}

double r_index(const SeasonTable& table, Warnings* warnings) {
  const double s = sigma(table);
  const double m = uniform_match_count(table, warnings);
  return s / (0.5 / std::sqrt(m));
}

double r_hat(const SeasonTable& table, Warnings* warnings) {
  const double s = sigma_hat(table);
  const double m = uniform_match_count(table, warnings);
  return s / (0.5 / std::sqrt(m));
}

double namsi(const SeasonTable& table) {
  const int k = table.team_count();
  if (k < 2) throw Error("namsi requires at least 2 teams");
  const auto w = table.win_shares();
  const double num = sum_sq_dev(w, 0.5);
  const double den = sum_sq_dev(full_predictability_shares(k), 0.5);
  return checked_sqrt_ratio(num, den, "namsi");
}

double namsi_hat(const SeasonTable& table) {
  const int k = table.team_count();
  if (k < 2) throw Error("namsi_hat requires at least 2 teams");
  const auto w = table.win_shares();
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
  const double num = sum_sq_dev(w, mean);
  const double den = sum_sq_dev(full_predictability_shares(k), mean);
  return checked_sqrt_ratio(num, den, "namsi_hat");
}

double mean_win_share(const SeasonTable& table) {
  const auto w = table.win_shares();
  return std::accumulate(w.begin(), w.end(), 0.0) / w.size();
}

namespace {

double hhi_over(const SeasonTable& table, int TeamRow::*count,
                const char* what) {
  std::vector<long long> counts;
  counts.reserve(table.rows.size());
  long long total = 0;
  for (const auto& r : table.rows) {
    counts.push_back(r.*count);
    total += r.*count;
  }
  if (total == 0) {
    throw Error(std::string(what) + " undefined: season total is zero");
  }
  return hhi_from_counts(counts);
}

}  // namespace

double hhi_w(const SeasonTable& table) {
  return hhi_over(table, &TeamRow::wins, "hhi_w");
}

double ahhi_w(const SeasonTable& table) {
  return hhi_w(table) - 1.0 / table.team_count();
}

double hhi_d(const SeasonTable& table) {
  return hhi_over(table, &TeamRow::draws, "hhi_d");
}

double ahhi_d(const SeasonTable& table) {
  return hhi_d(table) - 1.0 / table.team_count();
}

double avg_goals_per_team_match(const std::vector<MatchRecord>& season_matches,
                                bool per_team) {
  if (season_matches.empty()) throw Error("avg goals: empty season");
  long long goals = 0;
  for (const auto& m : season_matches) goals += m.home_goals + m.away_goals;
  const double divisor =
      (per_team ? 2.0 : 1.0) * static_cast<double>(season_matches.size());
  return static_cast<double>(goals) / divisor;
}

double avg_goals_from_table(const SeasonTable& table, bool per_team) {
  const int matches = table.total_matches();
  if (matches <= 0) throw Error("avg goals: empty season");
  const double divisor = (per_team ? 2.0 : 1.0) * matches;
  return static_cast<double>(table.total_goals()) / divisor;
}

BalanceIndices compute_balance_indices(const SeasonTable& table,
                                       const PointsRule& rule,
                                       Warnings* warnings) {
  const SeasonTable scored = table.rule == rule ? table : table.with_rule(rule);
  BalanceIndices out;
  const int k = scored.team_count();

  std::vector<long long> points;
  points.reserve(scored.rows.size());
  for (const auto& r : scored.rows) points.push_back(r.points);
  out.hhi = hhi_from_counts(points);
  out.hhi_min = 1.0 / k;
  out.hhi_max = cascade_hhi_max(k);
  out.dcb = dcb(scored, rule);

  out.sigma = sigma(scored);
  out.r = r_index(scored, warnings);
  out.sigma_hat = sigma_hat(scored);
  out.r_hat = r_hat(scored, nullptr);  // same warning as r
  out.namsi = namsi(scored);
  out.namsi_hat = namsi_hat(scored);

  if (scored.total_wins() > 0) {
    out.hhi_w = hhi_w(scored);
    out.ahhi_w = ahhi_w(scored);
  }
  if (scored.total_draws() > 0) {
    out.hhi_d = hhi_d(scored);
    out.ahhi_d = ahhi_d(scored);
  }

  out.avg_goals_per_team_match = avg_goals_from_table(scored);
  const auto cov = season_covariates(scored);
  out.mean_win_share = cov.avg_win_share;
  out.mean_draw_share = cov.avg_draw_share;
  return out;
}

}  // namespace synthbal
