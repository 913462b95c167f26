#include "synthbal/inference.hpp"

#include <algorithm>
#include <cmath>

namespace synthbal {

namespace {

std::vector<std::string> resolve_donors(const PanelDataset& panel,
                                        const ScmConfig& config) {
  if (!config.donors.empty()) return config.donors;
  std::vector<std::string> donors;
  for (const auto& u : panel.units) {
    if (u != config.treated) donors.push_back(u);
  }
  return donors;
}

PlaceboResult from_fit(const ScmFit& fit) {
  PlaceboResult r;
  r.pseudo_treated = fit.treated;
  r.donors = fit.donors;
  r.years = fit.years;
  r.effects = fit.gaps;
  r.ate = fit.ate;
  r.pre_rmse = fit.pre_rmse;
  return r;
}

}  // namespace

std::vector<PlaceboResult> placebo_in_space(const PanelDataset& panel,
                                            const ScmConfig& config,
                                            Warnings* warnings) {
  const auto donors = resolve_donors(panel, config);
  if (donors.size() < 2) {
    throw Error("placebo-in-space needs at least 2 donors");
  }
  std::vector<PlaceboResult> results;
  for (const auto& pseudo : donors) {
    ScmConfig placebo = config;
    placebo.treated = pseudo;
    placebo.donors.clear();
    for (const auto& d : donors) {
      if (d != pseudo) placebo.donors.push_back(d);
    }
    results.push_back(from_fit(fit_scm(panel, placebo, warnings)));
  }
  return results;
}

PlaceboResult placebo_in_time(const PanelDataset& panel, const ScmConfig& config,
                              int pseudo_year, Warnings* warnings) {
  const int first = panel.seasons.front();
  if (pseudo_year <= first || pseudo_year >= config.treatment_year) {
    throw Error("pseudo treatment year " + std::to_string(pseudo_year) +
                " must lie strictly inside the pre-period (" +
                std::to_string(first) + ", " +
                std::to_string(config.treatment_year) + "); it must leave at"
                " least 2 pre-period seasons including itself");
  }

  ScmConfig shifted = config;
  shifted.treatment_year = pseudo_year;
  const ScmFit fit = fit_scm(panel, shifted, warnings);

  PlaceboResult r = from_fit(fit);
  r.pseudo_year = pseudo_year;
  // evaluation window truncated before the real treatment
  const int eval_last = config.treatment_year - 1;
  r.eval_window = {pseudo_year, eval_last};
  double sum = 0.0;
  int n = 0;
  for (size_t i = 0; i < fit.years.size(); ++i) {
    if (fit.years[i] >= pseudo_year && fit.years[i] <= eval_last) {
      sum += fit.gaps[i];
      ++n;
    }
  }
  if (n == 0) throw Error("placebo-in-time: empty evaluation window");
  r.ate = sum / n;
  return r;
}

LooResult leave_one_out(const PanelDataset& panel, const ScmConfig& config,
                        const ScmFit& base, Warnings* warnings) {
  constexpr double kPositive = 1e-8;

  std::vector<std::string> positive;
  for (size_t i = 0; i < base.donors.size(); ++i) {
    if (base.donor_weights.values[i] > kPositive) {
      positive.push_back(base.donors[i]);
    }
  }
  if (positive.empty()) throw Error("leave-one-out: base fit has no positive donor weight");

  LooResult out;
  out.single_donor_flagged = positive.size() == 1;
  if (out.single_donor_flagged) {
    warn(warnings, "leave-one-out: base fit concentrates on a single donor (" +
                       positive.front() + ")");
  }

  for (const auto& dropped : positive) {
    ScmConfig refit_config = config;
    refit_config.donors.clear();
    for (const auto& d : base.donors) {
      if (d != dropped) refit_config.donors.push_back(d);
    }
    if (refit_config.donors.empty()) {
      warn(warnings, "leave-one-out: dropping " + dropped +
                         " empties the donor pool; refit skipped");
      continue;
    }
    out.refits.push_back({dropped, fit_scm(panel, refit_config, warnings)});
  }

  for (size_t i = 0; i < base.years.size(); ++i) {
    if (base.years[i] < base.treatment_year) continue;
    LooEnvelopeRow row;
    row.year = base.years[i];
    row.base_effect = base.gaps[i];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& refit : out.refits) {
      lo = std::min(lo, refit.fit.gaps[i]);
      hi = std::max(hi, refit.fit.gaps[i]);
    }
    if (out.refits.empty()) lo = hi = row.base_effect;
    row.min_effect = lo;
    row.max_effect = hi;
    out.envelope.push_back(row);
  }
  return out;
}

}  // namespace synthbal
