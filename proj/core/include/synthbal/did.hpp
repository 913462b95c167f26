#pragma once

#include <string>
#include <vector>

#include "synthbal/panel.hpp"

namespace synthbal {

// OLS with HC1 (degrees-of-freedom scaled) heteroskedasticity-robust
// standard errors. p-values are normal-approximation two-sided.
struct OlsFit {
  std::vector<std::string> names;
  std::vector<double> estimates;
  std::vector<double> robust_se;
  double r_squared = 0.0;
  int n_observations = 0;
  int n_parameters = 0;
};

// X is row-major n x k. Throws on rank deficiency, naming the collinear
// columns.
OlsFit fit_ols_hc1(const std::vector<double>& x_row_major, int n_cols,
                   const std::vector<double>& y,
                   const std::vector<std::string>& names);

struct DidOptions {
  bool include_avg_wins = true;
  bool include_avg_draws = true;
  bool include_team_count = true;
};

struct DidCoef {
  std::string name;
  double estimate = 0.0;
  double robust_se = 0.0;
  double z = 0.0;
  double p = 1.0;
};

struct DidFit {
  std::vector<DidCoef> coefficients;
  double r_squared = 0.0;
  int n_observations = 0;
  std::string vcov = "HC1";
};

// Outcome on time dummy (season >= treatment year), treatment dummy,
// their interaction, optional season covariates, and a constant, over every
// league-season cell of the panel.
DidFit fit_did(const PanelDataset& panel, const std::string& treated,
               int treatment_year, const DidOptions& options = {});

// "***" p<0.01, "**" p<0.05, "*" p<0.1, "" otherwise.
std::string significance_stars(double p);

}  // namespace synthbal
