#include "synthbal/simgen.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>

#include "synthbal/rng.hpp"

namespace synthbal {

namespace {

constexpr std::uint64_t kInitTag = 0x11;
constexpr std::uint64_t kDriftTag = 0x22;
constexpr std::uint64_t kMatchTag = 0x33;
constexpr std::uint64_t kCommonTag = 0x44;
constexpr std::uint64_t kNoiseTag = 0x55;

const char kOutcomeModelDoc[] =
    "three-way match model: p(draw) = draw_propensity * exp(-h^2/2), "
    "remaining mass split logistically in h = scale * (strength_home - "
    "strength_away); winner goals = loser + 1 + Poisson(0.25 + 0.35|h|), "
    "loser/draw goals Poisson(0.75/0.9); strengths follow a seeded "
    "per-season random walk";

void validate_scenario(const LeagueScenario& sc) {
  if (sc.team_count < 2) throw Error("league scenario needs at least 2 teams");
  if (!sc.strengths.empty() &&
      sc.strengths.size() != static_cast<size_t>(sc.team_count)) {
    throw Error("strength vector length must equal team_count");
  }
  if (sc.draw_propensity < 0.0 || sc.draw_propensity > 1.0) {
    throw Error("draw_propensity must lie in [0,1]");
  }
  if (sc.first_season > sc.last_season) throw Error("empty season range");
  if (sc.league_id.empty()) throw Error("league scenario needs an id");
}

std::string team_name(const LeagueScenario& sc, int index) {
  // zero-padded so identifier order equals index order
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d", index + 1);
  return sc.league_id + "_T" + buf;
}

std::vector<double> strengths_at(const LeagueScenario& sc, int season) {
  std::vector<double> s;
  if (sc.strengths.empty()) {
    Rng rng(derive_seed(sc.seed, hash_str(sc.league_id), kInitTag));
    s.resize(sc.team_count);
    for (double& x : s) x = rng.normal(0.0, sc.strength_sd);
  } else {
    s = sc.strengths;
  }
  for (int year = sc.first_season + 1; year <= season; ++year) {
    Rng rng(derive_seed(sc.seed, hash_str(sc.league_id), kDriftTag,
                        static_cast<std::uint64_t>(year)));
    for (double& x : s) x += sc.strength_drift * rng.normal();
  }
  return s;
}

MatchRecord play_match(const LeagueScenario& sc, int season, int home, int away,
                       double h, Rng& rng) {
  MatchRecord m;
  m.league_id = sc.league_id;
  m.season_start_year = season;
  m.home_team = team_name(sc, home);
  m.away_team = team_name(sc, away);

  const double p_draw = sc.draw_propensity * std::exp(-0.5 * h * h);
  const double p_home = (1.0 - p_draw) / (1.0 + std::exp(-h));
  const double u = rng.uniform();

  if (u < p_home) {
    const int loser = rng.poisson(0.75);
    const int margin = 1 + rng.poisson(0.25 + 0.35 * std::abs(h));
    m.home_goals = loser + margin;
    m.away_goals = loser;
  } else if (u < p_home + p_draw) {
    const int g = rng.poisson(0.9);
    m.home_goals = g;
    m.away_goals = g;
  } else {
    const int loser = rng.poisson(0.75);
    const int margin = 1 + rng.poisson(0.25 + 0.35 * std::abs(h));
    m.home_goals = loser;
    m.away_goals = loser + margin;
  }
  return m;
}

std::vector<MatchRecord> generate_season_scaled(const LeagueScenario& sc,
                                                int season, double scale) {
  validate_scenario(sc);
  if (season < sc.first_season || season > sc.last_season) {
    throw Error("season " + std::to_string(season) + " outside scenario range");
  }
  const auto strengths = strengths_at(sc, season);
  std::vector<MatchRecord> matches;
  matches.reserve(static_cast<size_t>(sc.team_count) * (sc.team_count - 1));
  for (int i = 0; i < sc.team_count; ++i) {
    for (int j = 0; j < sc.team_count; ++j) {
      if (i == j) continue;
      Rng rng(derive_seed(sc.seed, hash_str(sc.league_id), kMatchTag,
                          static_cast<std::uint64_t>(season),
                          static_cast<std::uint64_t>(i) * sc.team_count + j));
      const double h = scale * (strengths[i] - strengths[j]);
      matches.push_back(play_match(sc, season, i, j, h, rng));
    }
  }
  return matches;
}

double common_scale(const PanelScenario& spec, int season) {
  Rng rng(derive_seed(spec.seed, kCommonTag, static_cast<std::uint64_t>(season)));
  return std::max(0.02, 1.0 + spec.common_factor * rng.normal());
}

PanelDataset build_panel_from(const PanelScenario& spec,
                              const std::vector<MatchRecord>& matches) {
  std::vector<SeasonTable> tables;
  for (auto& [key, group] : group_by_league_season(matches)) {
    tables.push_back(
        build_season_table(group, spec.schedule.rule_for(key.first, key.second)));
  }
  return build_panel(tables, spec.outcome, spec.schedule);
}

std::vector<MatchRecord> generate_all_matches(const PanelScenario& spec,
                                              double effect) {
  std::vector<MatchRecord> matches;
  for (const auto& league : spec.leagues) {
    LeagueScenario sc = league;
    if (sc.seed == 0) sc.seed = derive_seed(spec.seed, hash_str(sc.league_id));
    for (int season = sc.first_season; season <= sc.last_season; ++season) {
      double scale = common_scale(spec, season);
      if (sc.league_id == spec.treated && season >= spec.treatment_year) {
        scale = std::max(0.02, scale + effect);
      }
      auto season_matches = generate_season_scaled(sc, season, scale);
      matches.insert(matches.end(), season_matches.begin(), season_matches.end());
    }
  }
  return matches;
}

}  // namespace

std::vector<MatchRecord> generate_season(const LeagueScenario& scenario,
                                         int season) {
  return generate_season_scaled(scenario, season, 1.0);
}

std::vector<MatchRecord> generate_league(const LeagueScenario& scenario) {
  std::vector<MatchRecord> matches;
  for (int season = scenario.first_season; season <= scenario.last_season;
       ++season) {
    auto m = generate_season(scenario, season);
    matches.insert(matches.end(), m.begin(), m.end());
  }
  return matches;
}

PanelRun generate_panel_scenario(const PanelScenario& scenario) {
  if (scenario.leagues.size() < 2) {
    throw Error("panel scenario needs at least 2 leagues");
  }
  if (!scenario.treated.empty()) {
    const bool found = std::any_of(
        scenario.leagues.begin(), scenario.leagues.end(),
        [&](const LeagueScenario& l) { return l.league_id == scenario.treated; });
    if (!found) {
      throw Error("treated league '" + scenario.treated + "' not in scenario");
    }
  } else if (scenario.treated_effect != 0.0) {
    throw Error("treated_effect set but no treated league named");
  }

  PanelRun run;
  run.matches = generate_all_matches(scenario, scenario.treated_effect);
  run.panel = build_panel_from(scenario, run.matches);

  SimTruth& truth = run.truth;
  truth.treated = scenario.treated;
  truth.treatment_year = scenario.treatment_year;
  truth.nominal_effect = scenario.treated_effect;
  truth.seed = scenario.seed;
  truth.outcome_model = kOutcomeModelDoc;

  if (!scenario.treated.empty()) {
    for (int year : run.panel.seasons) {
      if (year >= scenario.treatment_year) truth.post_years.push_back(year);
    }
    if (scenario.treated_effect == 0.0) {
      truth.per_year_realized.assign(truth.post_years.size(), 0.0);
      truth.realized_effect = 0.0;
    } else {
      // twin untreated run, same seed: only the treated league's
      // post-treatment outcomes can differ
      const PanelDataset twin =
          build_panel_from(scenario, generate_all_matches(scenario, 0.0));
      const int u = run.panel.unit_index(scenario.treated);
      const int tu = twin.unit_index(scenario.treated);
      double sum = 0.0;
      for (int year : truth.post_years) {
        const double d = run.panel.outcome_at(u, run.panel.season_index(year)) -
                         twin.outcome_at(tu, twin.season_index(year));
        truth.per_year_realized.push_back(d);
        sum += d;
      }
      truth.realized_effect = sum / static_cast<double>(truth.post_years.size());
    }
  }
  return run;
}

CombinationRun generate_combination_panel(const CombinationScenario& scenario) {
  if (scenario.donors.size() < 2) {
    throw Error("combination scenario needs at least 2 donors");
  }
  if (scenario.weights.size() != scenario.donors.size()) {
    throw Error("combination scenario: one weight per donor required");
  }
  double wsum = 0.0;
  for (double w : scenario.weights) {
    if (w < 0.0) throw Error("combination weights must be non-negative");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9) {
    throw Error("combination weights must sum to 1");
  }

  PanelScenario donors_only;
  donors_only.leagues = scenario.donors;
  donors_only.common_factor = scenario.common_factor;
  donors_only.outcome = scenario.outcome;
  donors_only.seed = scenario.seed;
  donors_only.treatment_year = scenario.treatment_year;
  const PanelDataset donor_panel = generate_panel_scenario(donors_only).panel;

  const int n_seasons = donor_panel.n_seasons();
  PanelDataset panel = donor_panel;
  panel.units.push_back(scenario.treated_id);
  panel.outcome_values.resize(panel.units.size() * n_seasons);
  panel.cov_win_share.resize(panel.units.size() * n_seasons);
  panel.cov_draw_share.resize(panel.units.size() * n_seasons);
  panel.cov_team_count.resize(panel.units.size() * n_seasons);

  const size_t treated_offset = (panel.units.size() - 1) * n_seasons;
  for (int s = 0; s < n_seasons; ++s) {
    double outcome = 0.0, win = 0.0, draw = 0.0, teams = 0.0;
    for (size_t d = 0; d < scenario.donors.size(); ++d) {
      const int idx = donor_panel.unit_index(scenario.donors[d].league_id);
      const size_t cell = static_cast<size_t>(idx) * n_seasons + s;
      outcome += scenario.weights[d] * donor_panel.outcome_values[cell];
      win += scenario.weights[d] * donor_panel.cov_win_share[cell];
      draw += scenario.weights[d] * donor_panel.cov_draw_share[cell];
      teams += scenario.weights[d] * donor_panel.cov_team_count[cell];
    }
    Rng rng(derive_seed(scenario.seed, kNoiseTag,
                        static_cast<std::uint64_t>(panel.seasons[s])));
    outcome += scenario.noise_sd * rng.normal();
    if (panel.seasons[s] >= scenario.treatment_year) outcome += scenario.effect;
    panel.outcome_values[treated_offset + s] = outcome;
    panel.cov_win_share[treated_offset + s] = win;
    panel.cov_draw_share[treated_offset + s] = draw;
    panel.cov_team_count[treated_offset + s] = teams;
  }
  panel.validate();

  CombinationRun run;
  run.panel = std::move(panel);
  run.truth.treated = scenario.treated_id;
  run.truth.treatment_year = scenario.treatment_year;
  run.truth.nominal_effect = scenario.effect;
  run.truth.seed = scenario.seed;
  run.truth.outcome_model = std::string(kOutcomeModelDoc) +
                            "; treated = convex combination of donor outcomes "
                            "plus noise and an additive post-period shift";
  for (int year : run.panel.seasons) {
    if (year >= scenario.treatment_year) {
      run.truth.post_years.push_back(year);
      // additive at the outcome level with shared noise: the paired-seed
      // difference is the shift itself
      run.truth.per_year_realized.push_back(scenario.effect);
    }
  }
  run.truth.realized_effect = scenario.effect;
  return run;
}

}  // namespace synthbal
