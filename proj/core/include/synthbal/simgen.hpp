#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "synthbal/panel.hpp"

namespace synthbal {

// One simulated league. Match outcomes follow a three-way model: the draw
// weight decays with the (scaled) strength difference and the remaining
// mass splits logistically, so stronger teams win more and equal teams draw
// at rate draw_propensity. Everything is a pure function of the seed.
struct LeagueScenario {
  std::string league_id = "SIM";
  int team_count = 14;
  std::vector<double> strengths;  // empty: drawn N(0, strength_sd) from seed
  double strength_sd = 0.5;
  double draw_propensity = 0.35;  // draw probability at equal strengths
  double strength_drift = 0.05;   // per-season random-walk sd
  int first_season = 1963;
  int last_season = 1993;
  std::uint64_t seed = 1;
};

// Donor + treated leagues sharing a per-season dispersion shock. The treated
// effect is an additive shift to the treated league's dispersion scale from
// the treatment year onward, so it propagates to outcomes only through the
// full match -> table -> index pipeline.
struct PanelScenario {
  std::vector<LeagueScenario> leagues;
  std::string treated;  // empty: no treated unit (pure null panel)
  int treatment_year = 1981;
  double treated_effect = 0.0;
  double common_factor = 0.2;  // sd of the shared dispersion shock
  Outcome outcome = Outcome::dcb;
  RuleSchedule schedule;  // default: every league on the 2-point rule
  std::uint64_t seed = 1;
};

struct SimTruth {
  std::string treated;
  int treatment_year = 0;
  double nominal_effect = 0.0;   // generator-level shift as configured
  double realized_effect = 0.0;  // mean paired-seed outcome difference, post
  std::vector<int> post_years;
  std::vector<double> per_year_realized;
  std::uint64_t seed = 0;
  std::string outcome_model;  // generated-data metadata
};

struct PanelRun {
  PanelDataset panel;
  std::vector<MatchRecord> matches;
  SimTruth truth;
};

// Full double round robin for one season; byte-identical across runs for a
// fixed (seed, season, fixture).
std::vector<MatchRecord> generate_season(const LeagueScenario& scenario,
                                         int season);
std::vector<MatchRecord> generate_league(const LeagueScenario& scenario);

// Builds every league-season, pushes it through the real table/index path,
// and measures the realized treated effect against a twin run of the same
// seed with the effect switched off.
PanelRun generate_panel_scenario(const PanelScenario& scenario);

// Outcome-level construction for estimator validation: donor leagues are
// simulated match-by-match, the treated unit is a known convex combination
// of donor outcomes plus noise, with an additive post-period effect.
struct CombinationScenario {
  std::vector<LeagueScenario> donors;  // >= 2
  std::vector<double> weights;         // convex, aligned with donors
  std::string treated_id = "TREATED";
  double noise_sd = 0.005;
  double effect = 0.0;
  int treatment_year = 1981;
  double common_factor = 0.2;
  Outcome outcome = Outcome::dcb;
  std::uint64_t seed = 1;
};

struct CombinationRun {
  PanelDataset panel;
  SimTruth truth;
};

CombinationRun generate_combination_panel(const CombinationScenario& scenario);

}  // namespace synthbal
