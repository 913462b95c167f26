#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "scenarios.hpp"
#include "synthbal/inference.hpp"
#include "synthbal/simgen.hpp"

using namespace synthbal;

namespace {

ScmConfig base_config() {
  ScmConfig config;
  config.treated = "TREATED";
  config.treatment_year = 1981;
  return config;
}

}  // namespace

TEST_CASE("placebo-in-space: effects cluster at zero away from the treated unit") {
  const auto run = generate_combination_panel(scenarios::combination(61, -0.05));
  const auto config = base_config();
  const auto fit = fit_scm(run.panel, config);
  const auto placebos = placebo_in_space(run.panel, config);

  REQUIRE(placebos.size() == 3);
  for (const auto& p : placebos) {
    // pools exclude both the pseudo-treated unit and the real treated one
    CHECK(std::find(p.donors.begin(), p.donors.end(), "TREATED") == p.donors.end());
    CHECK(std::find(p.donors.begin(), p.donors.end(), p.pseudo_treated) ==
          p.donors.end());
    CHECK(p.donors.size() == 2);
    CHECK(std::abs(p.ate) <= 0.04);
    REQUIRE(p.years.size() == p.effects.size());
  }
  CHECK(std::abs(fit.ate - (-0.05)) <= 0.02);
}

TEST_CASE("placebo-in-space is centered on exchangeable panels") {
  std::vector<double> ates;
  for (std::uint64_t seed = 101; seed <= 108; ++seed) {
    const auto run = generate_panel_scenario(scenarios::null_panel(seed));
    ScmConfig config;
    config.treated = "L01";
    config.treatment_year = 1981;
    for (const auto& p : placebo_in_space(run.panel, config)) {
      ates.push_back(p.ate);
    }
  }
  REQUIRE(ates.size() == 40);
  double mean = 0.0;
  for (double a : ates) mean += a;
  mean /= static_cast<double>(ates.size());
  double ss = 0.0;
  for (double a : ates) ss += (a - mean) * (a - mean);
  const double se = std::sqrt(ss / (static_cast<double>(ates.size()) - 1)) /
                    std::sqrt(static_cast<double>(ates.size()));
  CHECK(std::abs(mean) <= 2.0 * se);
}

TEST_CASE("placebo-in-space needs a real pool") {
  const auto panel = fixtures::make_panel({"T", "A"}, 1970, 1985,
                                          [](int u, int y) {
                                            return 0.3 + 0.01 * u +
                                                   0.002 * (y % 5);
                                          });
  ScmConfig config;
  config.treated = "T";
  config.treatment_year = 1980;
  CHECK_THROWS_AS(placebo_in_space(panel, config), Error);
}

TEST_CASE("placebo-in-time: boundaries are rejected") {
  const auto run = generate_combination_panel(scenarios::combination(71, 0.0));
  const auto config = base_config();
  CHECK_THROWS_AS(placebo_in_time(run.panel, config, 1981), Error);  // = treatment
  CHECK_THROWS_AS(placebo_in_time(run.panel, config, 1990), Error);
  CHECK_THROWS_AS(placebo_in_time(run.panel, config, 1963), Error);  // = first
  CHECK_NOTHROW(placebo_in_time(run.panel, config, 1964));           // first + 1
}

TEST_CASE("placebo-in-time: truncated evaluation window") {
  const auto run = generate_combination_panel(scenarios::combination(81, -0.05));
  const auto config = base_config();
  const auto result = placebo_in_time(run.panel, config, 1969);

  REQUIRE(result.pseudo_year.has_value());
  CHECK(*result.pseudo_year == 1969);
  REQUIRE(result.eval_window.has_value());
  CHECK(result.eval_window->first == 1969);
  CHECK(result.eval_window->second == 1980);

  // ate equals the mean effect over the truncated window
  double sum = 0.0;
  int n = 0;
  for (size_t i = 0; i < result.years.size(); ++i) {
    if (result.years[i] >= 1969 && result.years[i] <= 1980) {
      sum += result.effects[i];
      ++n;
    }
  }
  CHECK(n == 12);
  CHECK(result.ate == doctest::Approx(sum / n).epsilon(1e-12));
  // the window ends before the real treatment, so the shift stays invisible
  CHECK(std::abs(result.ate) <= 0.03);
}

TEST_CASE("leave-one-out: dropping the dominant donor degrades the fit") {
  const auto run = generate_combination_panel(scenarios::combination(91, -0.05));
  const auto config = base_config();
  const auto base = fit_scm(run.panel, config);
  const auto loo = leave_one_out(run.panel, config, base);

  // only positively weighted donors get dropped
  for (const auto& refit : loo.refits) {
    const auto it = std::find(base.donors.begin(), base.donors.end(), refit.dropped);
    REQUIRE(it != base.donors.end());
    CHECK(base.donor_weights.values[it - base.donors.begin()] > 1e-8);
  }

  const auto dropped_a =
      std::find_if(loo.refits.begin(), loo.refits.end(),
                   [](const LooRefit& r) { return r.dropped == "D1"; });
  REQUIRE(dropped_a != loo.refits.end());
  CHECK(dropped_a->fit.pre_rmse >= base.pre_rmse);

  // envelope brackets every refit effect in every post year
  REQUIRE(!loo.envelope.empty());
  for (const auto& row : loo.envelope) {
    CHECK(row.min_effect <= row.max_effect + 1e-15);
    for (const auto& refit : loo.refits) {
      const auto pos = std::find(refit.fit.years.begin(), refit.fit.years.end(),
                                 row.year);
      REQUIRE(pos != refit.fit.years.end());
      const double effect = refit.fit.gaps[pos - refit.fit.years.begin()];
      CHECK(effect >= row.min_effect - 1e-12);
      CHECK(effect <= row.max_effect + 1e-12);
    }
    CHECK(row.year >= base.treatment_year);
  }

  // every refit still satisfies the fit invariants
  for (const auto& refit : loo.refits) {
    double sum = 0.0;
    int n = 0;
    for (size_t i = 0; i < refit.fit.years.size(); ++i) {
      if (refit.fit.years[i] >= 1981) {
        sum += refit.fit.gaps[i];
        ++n;
      }
    }
    CHECK(refit.fit.ate == doctest::Approx(sum / n).epsilon(1e-12));
  }
}

TEST_CASE("leave-one-out: single dominant donor is flagged") {
  // treated tracks donor A almost exactly
  const auto panel = fixtures::make_panel(
      {"T", "A", "B", "C"}, 1970, 1990, [](int unit, int year) {
        const double base = 0.35 + 0.03 * std::sin(0.5 * (year - 1970));
        if (unit == 0 || unit == 1) return base;
        if (unit == 2) return base + 0.1 + 0.012 * (year % 3);
        return base - 0.08 + 0.01 * (year % 4);
      });
  ScmConfig config;
  config.treated = "T";
  config.treatment_year = 1982;
  config.predictors.lag_gap = 1;
  config.predictors.include_avg_wins = false;
  config.predictors.include_avg_draws = false;
  config.predictors.include_team_count = false;

  Warnings warnings;
  const auto base = fit_scm(panel, config);
  REQUIRE(base.donor_weights.values[0] > 0.99);
  const auto loo = leave_one_out(panel, config, base, &warnings);
  CHECK(loo.single_donor_flagged);
  REQUIRE(loo.refits.size() == 1);

  // the refit path departs from the base path
  double departure = 0.0;
  for (const auto& row : loo.envelope) {
    departure += std::abs(row.min_effect - row.base_effect);
  }
  CHECK(departure > 1e-4);
}

TEST_CASE("leave-one-out: empty pool after the drop is skipped with a warning") {
  const auto panel = fixtures::make_panel(
      {"T", "A"}, 1970, 1990, [](int unit, int year) {
        return 0.3 + 0.02 * unit + 0.01 * std::sin(0.8 * (year - 1970));
      });
  ScmConfig config;
  config.treated = "T";
  config.treatment_year = 1982;
  config.donors = {"A"};
  config.predictors.lag_gap = 1;
  config.predictors.include_avg_wins = false;
  config.predictors.include_avg_draws = false;
  config.predictors.include_team_count = false;

  Warnings warnings;
  const auto base = fit_scm(panel, config);
  const auto loo = leave_one_out(panel, config, base, &warnings);
  CHECK(loo.single_donor_flagged);
  CHECK(loo.refits.empty());
  bool skipped = false;
  for (const auto& w : warnings) {
    if (w.find("skipped") != std::string::npos) skipped = true;
  }
  CHECK(skipped);
}
