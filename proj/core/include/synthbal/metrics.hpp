#pragma once

#include <optional>
#include <string>
#include <vector>

#include "synthbal/league.hpp"

namespace synthbal {

enum class BoundsMethod { exhaustive, cascade_formula };

// HHI concentration bounds for a K-team double round robin.
// hhi_min is 1/K exactly (the all-draw season).
struct HhiBounds {
  double hhi_min = 0.0;
  double hhi_max = 0.0;
  int team_count = 0;
  PointsRule rule;
  BoundsMethod method = BoundsMethod::cascade_formula;
};

// Sum of squared shares. Shares must be non-negative and sum to 1 (1e-9).
double hhi(const std::vector<double>& shares);

// HHI from integer counts: sum(c_i^2) / (sum c_i)^2 evaluated with a single
// floating division, so degenerate seasons (all-draw, cascade) land on the
// bounds bit-exactly.
double hhi_from_counts(const std::vector<long long>& counts);

// HHI of the fully hierarchical (cascade) double round robin:
// 2(2K-1) / (3K(K-1)). Independent of the points rule because cascade shares
// are. Used as the operative hhi_max in DCB.
double cascade_hhi_max(int team_count);

// K <= 4 enumerates all 3^(K(K-1)) outcome assignments under `rule`;
// larger K falls back to the cascade closed form. Note the enumerated
// maximum exceeds the cascade value under the 3-point rule (a leader plus
// an all-drawing tail concentrates shares further); DCB deliberately uses
// the cascade form so the index stays comparable across rules.
HhiBounds hhi_bounds(int team_count, const PointsRule& rule);
HhiBounds hhi_bounds(int team_count, const PointsRule& rule, BoundsMethod method);

// sqrt of min-max normalized HHI of points shares, in [0,1]. The table is
// re-scored under `rule` first. A normalized value outside [-1e-9, 1+1e-9]
// throws a bounds-violation Error; inside, it is clamped.
double dcb(const SeasonTable& table, const PointsRule& rule);

// Win-share dispersion around the no-draw benchmark 0.5:
// sqrt( sum_k (w_k - 0.5)^2 / K ) with w_k = wins_k / m_k.
double sigma(const SeasonTable& table);

// sigma relative to the one-match binomial sd: sigma / (0.5/sqrt(m)).
// Non-uniform per-team match counts fall back to the mean m with a warning.
double r_index(const SeasonTable& table, Warnings* warnings = nullptr);

// Variants centered on the realized mean win share instead of 0.5.
double sigma_hat(const SeasonTable& table);
double r_hat(const SeasonTable& table, Warnings* warnings = nullptr);

// Win-share dispersion normalized by the full-predictability benchmark,
// in [0,1].
double namsi(const SeasonTable& table);
double namsi_hat(const SeasonTable& table);

// HHI over shares of total wins (resp. draws); adjusted forms subtract 1/K.
// Undefined (Error) when the season has no wins (resp. no draws).
double hhi_w(const SeasonTable& table);
double ahhi_w(const SeasonTable& table);
double hhi_d(const SeasonTable& table);
double ahhi_d(const SeasonTable& table);

// Goals per team per match: total goals / (2 * matches). Pass
// per_team = false for plain goals per match.
double avg_goals_per_team_match(const std::vector<MatchRecord>& season_matches,
                                bool per_team = true);
double avg_goals_from_table(const SeasonTable& table, bool per_team = true);

// Mean win share over teams (the sigma-hat / NAMSI-hat center).
double mean_win_share(const SeasonTable& table);

struct BalanceIndices {
  double dcb = 0.0;
  double hhi = 0.0;
  double hhi_min = 0.0;
  double hhi_max = 0.0;
  double sigma = 0.0;
  double r = 0.0;
  double sigma_hat = 0.0;
  double r_hat = 0.0;
  double namsi = 0.0;
  double namsi_hat = 0.0;
  std::optional<double> hhi_w;  // absent on an all-draw season
  std::optional<double> ahhi_w;
  std::optional<double> hhi_d;  // absent on a draw-free season
  std::optional<double> ahhi_d;
  double avg_goals_per_team_match = 0.0;
  double mean_win_share = 0.0;
  double mean_draw_share = 0.0;
};

// One call computing the full index family for a season under `rule`.
BalanceIndices compute_balance_indices(const SeasonTable& table,
                                       const PointsRule& rule,
                                       Warnings* warnings = nullptr);

}  // namespace synthbal
