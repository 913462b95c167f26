#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synthbal/scm.hpp"

namespace synthbal {

// One placebo refit: treatment reassigned to a donor league (space) or to an
// earlier year (time). Time placebos evaluate the effect only over
// [pseudo_year, true treatment year - 1].
struct PlaceboResult {
  std::string pseudo_treated;
  std::optional<int> pseudo_year;
  std::vector<std::string> donors;  // pool actually used by the refit
  std::vector<int> years;
  std::vector<double> effects;
  double ate = 0.0;
  double pre_rmse = 0.0;
  std::optional<std::pair<int, int>> eval_window;
};

// Refit once per donor, each time with that donor as pseudo-treated and the
// remaining donors as pool. The truly treated unit never enters a pool (its
// post-treatment outcomes would contaminate the controls).
std::vector<PlaceboResult> placebo_in_space(const PanelDataset& panel,
                                            const ScmConfig& config,
                                            Warnings* warnings = nullptr);

// Full re-optimization at pseudo_year; requires
// first_season < pseudo_year < treatment_year.
PlaceboResult placebo_in_time(const PanelDataset& panel, const ScmConfig& config,
                              int pseudo_year, Warnings* warnings = nullptr);

struct LooRefit {
  std::string dropped;
  ScmFit fit;
};

struct LooEnvelopeRow {
  int year = 0;
  double base_effect = 0.0;
  double min_effect = 0.0;
  double max_effect = 0.0;
};

struct LooResult {
  std::vector<LooRefit> refits;
  std::vector<LooEnvelopeRow> envelope;  // post-period years
  bool single_donor_flagged = false;
};

// Drop each positively weighted donor of the base fit in turn and refit.
// The envelope brackets the refit effects (not the base path) per year.
LooResult leave_one_out(const PanelDataset& panel, const ScmConfig& config,
                        const ScmFit& base, Warnings* warnings = nullptr);

}  // namespace synthbal
