#pragma once

// Simulation scenarios shared between the unit and acceptance suites.

#include <cstdio>
#include <string>

#include "synthbal/simgen.hpp"

namespace scenarios {

// Three exchangeable donors, treated = 0.6 D1 + 0.4 D2 (+ noise, + shift).
inline synthbal::CombinationScenario combination(std::uint64_t seed,
                                                 double effect) {
  synthbal::CombinationScenario sc;
  for (int i = 0; i < 3; ++i) {
    synthbal::LeagueScenario league;
    league.league_id = "D" + std::to_string(i + 1);
    league.team_count = 12;
    league.strength_sd = 0.5;
    league.draw_propensity = 0.3;
    league.strength_drift = 0.06;
    league.first_season = 1963;
    league.last_season = 1993;
    league.seed = 0;
    sc.donors.push_back(std::move(league));
  }
  sc.weights = {0.6, 0.4, 0.0};
  sc.noise_sd = 0.004;
  sc.effect = effect;
  sc.treatment_year = 1981;
  sc.common_factor = 0.25;
  sc.seed = seed;
  return sc;
}

// Six leagues over the 1963-1993 window, shared dispersion shock, no effect.
inline synthbal::PanelScenario null_panel(std::uint64_t seed) {
  synthbal::PanelScenario sc;
  for (int i = 0; i < 6; ++i) {
    synthbal::LeagueScenario league;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "L%02d", i + 1);
    league.league_id = buf;
    league.team_count = 10 + 2 * (i % 3);
    league.strength_sd = 0.45;
    league.draw_propensity = 0.3;
    league.strength_drift = 0.06;
    league.first_season = 1963;
    league.last_season = 1993;
    league.seed = 0;
    sc.leagues.push_back(std::move(league));
  }
  sc.treated = "L01";
  sc.treatment_year = 1981;
  sc.treated_effect = 0.0;
  sc.common_factor = 0.2;
  sc.seed = seed;
  return sc;
}

}  // namespace scenarios
