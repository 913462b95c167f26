#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "synthbal/panel.hpp"

namespace synthbal {

// Diagonal predictor weights, non-negative and normalized to sum 1.
struct VWeights {
  std::vector<std::string> labels;
  std::vector<double> values;
};

// Donor weights on the simplex plus the attained quadratic objective.
struct DonorWeights {
  std::vector<double> values;
  double objective = 0.0;
};

// Multi-start derivative-free search settings for the outer V problem.
// The start set is: equal weights, one one-hot start per predictor, and
// `random_starts` seeded draws; everything is deterministic given `seed`.
struct VSearchParams {
  std::uint64_t seed = 42;
  int random_starts = 6;
  int max_evals_per_start = 600;
};

struct ScmConfig {
  std::string treated;
  int treatment_year = 0;
  std::vector<std::string> donors;  // empty = every non-treated panel unit
  PredictorSpec predictors;
  VSearchParams search;
};

// One row of the pre-treatment covariate balance table. Biases are
// fractions of the treated value ((synthetic - treated) / treated).
struct BalanceRow {
  std::string predictor;
  double v_weight = 0.0;
  double treated_value = 0.0;
  double synthetic_value = 0.0;
  double control_bias = 0.0;
  double donor_pool_average = 0.0;
  double donor_pool_bias = 0.0;
};

struct ScmFit {
  std::string treated;
  int treatment_year = 0;
  std::vector<std::string> donors;
  DonorWeights donor_weights;  // aligned with `donors`
  VWeights v_weights;          // aligned with predictor labels
  std::vector<int> years;      // full panel window
  std::vector<double> actual;     // Y1
  std::vector<double> synthetic;  // Y1* = Y0 G*
  std::vector<double> gaps;       // Y1 - Y1*
  double ate = 0.0;       // mean gap over seasons >= treatment_year
  double pre_rmse = 0.0;  // over seasons < treatment_year
  std::vector<BalanceRow> balance;
  std::uint64_t seed = 0;
};

// Minimize (x1 - X0 g)' diag(v) (x1 - X0 g) over the simplex
// {g >= 0, sum g = 1}. Deterministic; support enumeration for small donor
// pools plus accelerated projected gradient, then an exact polish on the
// active support. Ties resolve toward the weight vector nearest uniform.
DonorWeights solve_inner(const std::vector<double>& x1,
                         const std::vector<double>& x0_row_major, int n_donors,
                         const std::vector<double>& v);
DonorWeights solve_inner(const PredictorBlock& block,
                         const std::vector<double>& v);

// Outer search: pick V minimizing the pre-treatment outcome RMSE of the
// synthetic path induced by G*(V). Ties within 1e-10 go to the V closest
// to equal weights.
std::pair<VWeights, DonorWeights> optimize_v(const PanelDataset& panel,
                                             const std::string& treated,
                                             int treatment_year,
                                             const PredictorBlock& block,
                                             const VSearchParams& params = {},
                                             Warnings* warnings = nullptr);

ScmFit fit_scm(const PanelDataset& panel, const ScmConfig& config,
               Warnings* warnings = nullptr);

}  // namespace synthbal
