#include "synthbal/did.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace synthbal {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace

std::string significance_stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

OlsFit fit_ols_hc1(const std::vector<double>& x_row_major, int n_cols,
                   const std::vector<double>& y,
                   const std::vector<std::string>& names) {
  if (n_cols < 1) throw Error("ols: need at least one regressor");
  if (names.size() != static_cast<size_t>(n_cols)) {
    throw Error("ols: one name per column required");
  }
  const int n = static_cast<int>(y.size());
  if (x_row_major.size() != static_cast<size_t>(n) * n_cols) {
    throw Error("ols: design matrix does not match y");
  }
  if (n <= n_cols) throw Error("ols: more parameters than observations");

  MatrixXd x(n, n_cols);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n_cols; ++j) {
      x(i, j) = x_row_major[static_cast<size_t>(i) * n_cols + j];
    }
  }
  VectorXd yv = Eigen::Map<const VectorXd>(y.data(), n);

  Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < n_cols) {
    // pivot order puts the dependent columns last
    std::string collinear;
    const auto perm = qr.colsPermutation().indices();
    for (int j = qr.rank(); j < n_cols; ++j) {
      if (!collinear.empty()) collinear += ", ";
      collinear += names[perm[j]];
    }
    throw Error("ols: design matrix is rank deficient; collinear columns: " +
                collinear);
  }

  const VectorXd beta = qr.solve(yv);
  const VectorXd residuals = yv - x * beta;

  const MatrixXd xtx = x.transpose() * x;
  const Eigen::LDLT<MatrixXd> xtx_ldlt(xtx);
  MatrixXd meat = MatrixXd::Zero(n_cols, n_cols);
  for (int i = 0; i < n; ++i) {
    const double e2 = residuals[i] * residuals[i];
    meat.noalias() += e2 * (x.row(i).transpose() * x.row(i));
  }
  const double hc1 = static_cast<double>(n) / (n - n_cols);
  const MatrixXd bread_meat = xtx_ldlt.solve(meat);
  const MatrixXd vcov = hc1 * xtx_ldlt.solve(bread_meat.transpose()).transpose();

  OlsFit fit;
  fit.names = names;
  fit.estimates.assign(beta.data(), beta.data() + n_cols);
  for (int j = 0; j < n_cols; ++j) {
    fit.robust_se.push_back(std::sqrt(std::max(vcov(j, j), 0.0)));
  }
  const double mean = yv.mean();
  double tss = 0.0;
  for (int i = 0; i < n; ++i) tss += (yv[i] - mean) * (yv[i] - mean);
  const double rss = residuals.squaredNorm();
  fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;
  fit.n_observations = n;
  fit.n_parameters = n_cols;
  return fit;
}

DidFit fit_did(const PanelDataset& panel, const std::string& treated,
               int treatment_year, const DidOptions& options) {
  panel.validate();
  if (panel.n_units() < 2) throw Error("did: need at least two units");
  const int treated_idx = panel.unit_index(treated);
  if (treated_idx < 0) throw Error("treated unit '" + treated + "' not in panel");
  if (treatment_year <= panel.seasons.front() ||
      treatment_year > panel.seasons.back()) {
    throw Error("did: treatment year outside the panel window");
  }

  std::vector<std::string> names = {"time_dummy", "time_x_treatment", "treatment"};
  if (options.include_avg_wins) names.push_back("avg_win_share");
  if (options.include_avg_draws) names.push_back("avg_draw_share");
  if (options.include_team_count) names.push_back("team_count");
  names.push_back("constant");
  const int k = static_cast<int>(names.size());

  const int n = panel.n_units() * panel.n_seasons();
  std::vector<double> x;
  x.reserve(static_cast<size_t>(n) * k);
  std::vector<double> y;
  y.reserve(n);

  for (int u = 0; u < panel.n_units(); ++u) {
    for (int s = 0; s < panel.n_seasons(); ++s) {
      const size_t cell = static_cast<size_t>(u) * panel.n_seasons() + s;
      const double time_dummy = panel.seasons[s] >= treatment_year ? 1.0 : 0.0;
      const double treat = u == treated_idx ? 1.0 : 0.0;
      y.push_back(panel.outcome_values[cell]);
      x.push_back(time_dummy);
      x.push_back(time_dummy * treat);
      x.push_back(treat);
      if (options.include_avg_wins) x.push_back(panel.cov_win_share[cell]);
      if (options.include_avg_draws) x.push_back(panel.cov_draw_share[cell]);
      if (options.include_team_count) x.push_back(panel.cov_team_count[cell]);
      x.push_back(1.0);
    }
  }

  const OlsFit ols = fit_ols_hc1(x, k, y, names);
  DidFit fit;
  fit.r_squared = ols.r_squared;
  fit.n_observations = ols.n_observations;
  for (int j = 0; j < k; ++j) {
    DidCoef c;
    c.name = ols.names[j];
    c.estimate = ols.estimates[j];
    c.robust_se = ols.robust_se[j];
    c.z = c.robust_se > 0.0 ? c.estimate / c.robust_se : 0.0;
    c.p = c.robust_se > 0.0 ? normal_two_sided_p(c.z) : 1.0;
    fit.coefficients.push_back(c);
  }
  return fit;
}

}  // namespace synthbal
