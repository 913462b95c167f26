#include "synthbal/artifacts.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "synthbal/io.hpp"

namespace synthbal {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string opt_fixed(const std::optional<double>& v) {
  return v ? fmt_fixed(*v) : "nan";
}

// JSON rendering with %.17g floats; nlohmann's default shortest-round-trip
// printer would be fine too, but this pins the byte format explicitly.
void render_json(const ordered_json& j, std::string& out, int indent) {
  const std::string pad(static_cast<size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + ordered_json(it.key()).dump() + ": ";
        render_json(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        render_json(item, out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case ordered_json::value_t::number_float: {
      const double v = j.get<double>();
      // JSON has no NaN/Inf literals; follow the usual null convention
      out += std::isfinite(v) ? fmt_g17(v) : "null";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

void write_json_atomic(const std::string& path, const ordered_json& j) {
  std::string text;
  render_json(j, text, 0);
  text += "\n";
  write_text_atomic(path, text);
}

double field_double(const std::vector<std::string>& row, size_t idx,
                    const std::string& path) {
  if (idx >= row.size()) throw Error(path + ": short row");
  return parse_double(row[idx], path);
}

int field_int(const std::vector<std::string>& row, size_t idx,
              const std::string& path) {
  if (idx >= row.size()) throw Error(path + ": short row");
  return static_cast<int>(parse_int(row[idx], path));
}

void expect_header(const Csv& csv, const std::string& expected,
                   const std::string& path) {
  std::string got;
  for (size_t i = 0; i < csv.header.size(); ++i) {
    if (i) got += ",";
    got += csv.header[i];
  }
  if (got != expected) {
    throw Error(path + ": unexpected header '" + got + "', expected '" +
                expected + "'");
  }
}

}  // namespace

void write_matches_csv(const std::string& path,
                       const std::vector<MatchRecord>& matches) {
  std::string out = kMatchesCsvHeader;
  out += "\n";
  for (const auto& m : matches) {
    out += m.league_id + "," + std::to_string(m.season_start_year) + "," +
           m.home_team + "," + m.away_team + "," +
           std::to_string(m.home_goals) + "," + std::to_string(m.away_goals) +
           "\n";
  }
  write_text_atomic(path, out);
}

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows) {
  std::string out =
      "league_id,season_start_year,win_points,team_count,matches,dcb,hhi,"
      "hhi_min,hhi_max,sigma,r,sigma_hat,r_hat,namsi,namsi_hat,hhi_w,ahhi_w,"
      "hhi_d,ahhi_d,avg_goals_per_team_match,mean_win_share,mean_draw_share\n";
  for (const auto& r : rows) {
    const auto& i = r.indices;
    out += r.league_id + "," + std::to_string(r.season_start_year) + "," +
           std::to_string(r.win_points) + "," + std::to_string(r.team_count) +
           "," + std::to_string(r.matches) + "," + fmt_fixed(i.dcb) + "," +
           fmt_fixed(i.hhi) + "," + fmt_fixed(i.hhi_min) + "," +
           fmt_fixed(i.hhi_max) + "," + fmt_fixed(i.sigma) + "," +
           fmt_fixed(i.r) + "," + fmt_fixed(i.sigma_hat) + "," +
           fmt_fixed(i.r_hat) + "," + fmt_fixed(i.namsi) + "," +
           fmt_fixed(i.namsi_hat) + "," + opt_fixed(i.hhi_w) + "," +
           opt_fixed(i.ahhi_w) + "," + opt_fixed(i.hhi_d) + "," +
           opt_fixed(i.ahhi_d) + "," + fmt_fixed(i.avg_goals_per_team_match) +
           "," + fmt_fixed(i.mean_win_share) + "," +
           fmt_fixed(i.mean_draw_share) + "\n";
  }
  write_text_atomic(path, out);
}

void write_coverage_csv(const std::string& path,
                        const std::vector<SeasonTable>& tables) {
  std::string out = "league_id,season_start_year,matches,teams,win_points\n";
  for (const auto& t : tables) {
    out += t.league_id + "," + std::to_string(t.season_start_year) + "," +
           std::to_string(t.total_matches()) + "," +
           std::to_string(t.team_count()) + "," +
           std::to_string(t.rule.win_points) + "\n";
  }
  write_text_atomic(path, out);
}

void write_weights_csv(const std::string& path, const ScmFit& fit) {
  std::string out = "donor,weight\n";
  for (size_t i = 0; i < fit.donors.size(); ++i) {
    out += fit.donors[i] + "," + fmt_fixed(fit.donor_weights.values[i]) + "\n";
  }
  write_text_atomic(path, out);
}

void write_vweights_csv(const std::string& path, const ScmFit& fit) {
  std::string out = "predictor,v_weight\n";
  for (size_t i = 0; i < fit.v_weights.labels.size(); ++i) {
    out += fit.v_weights.labels[i] + "," + fmt_fixed(fit.v_weights.values[i]) +
           "\n";
  }
  write_text_atomic(path, out);
}

void write_balance_csv(const std::string& path, const ScmFit& fit) {
  std::string out =
      "predictor,v_weight,treated,synthetic,control_bias_pct,"
      "donor_pool_average,donor_pool_bias_pct\n";
  for (const auto& row : fit.balance) {
    out += row.predictor + "," + fmt_fixed(row.v_weight) + "," +
           fmt_fixed(row.treated_value) + "," + fmt_fixed(row.synthetic_value) +
           "," + fmt_fixed(100.0 * row.control_bias, 2) + "," +
           fmt_fixed(row.donor_pool_average) + "," +
           fmt_fixed(100.0 * row.donor_pool_bias, 2) + "\n";
  }
  write_text_atomic(path, out);
}

void write_effects_csv(const std::string& path, const ScmFit& fit) {
  std::string out = "year,actual,predicted,effect\n";
  for (size_t i = 0; i < fit.years.size(); ++i) {
    out += std::to_string(fit.years[i]) + "," + fmt_fixed(fit.actual[i]) + "," +
           fmt_fixed(fit.synthetic[i]) + "," + fmt_fixed(fit.gaps[i]) + "\n";
  }
  write_text_atomic(path, out);
}

void write_scm_summary_json(const std::string& path, const ScmFit& fit,
                            Outcome outcome) {
  ordered_json j;
  j["outcome"] = outcome_name(outcome);
  j["treated"] = fit.treated;
  j["treatment_year"] = fit.treatment_year;
  j["ate"] = fit.ate;
  j["pre_rmse"] = fit.pre_rmse;
  j["seed"] = fit.seed;
  ordered_json donors = ordered_json::object();
  for (size_t i = 0; i < fit.donors.size(); ++i) {
    donors[fit.donors[i]] = fit.donor_weights.values[i];
  }
  j["donor_weights"] = donors;
  ordered_json v = ordered_json::object();
  for (size_t i = 0; i < fit.v_weights.labels.size(); ++i) {
    v[fit.v_weights.labels[i]] = fit.v_weights.values[i];
  }
  j["v_weights"] = v;
  j["inner_objective"] = fit.donor_weights.objective;
  j["window"] = ordered_json::array({fit.years.front(), fit.years.back()});
  write_json_atomic(path, j);
}

void write_placebo_space_csv(const std::string& path,
                             const std::vector<PlaceboResult>& results) {
  std::string out = "pseudo_treated,ate,pre_rmse\n";
  for (const auto& r : results) {
    out += r.pseudo_treated + "," + fmt_fixed(r.ate) + "," +
           fmt_fixed(r.pre_rmse) + "\n";
  }
  write_text_atomic(path, out);
}

void write_placebo_time_csv(const std::string& path,
                            const PlaceboResult& result) {
  std::string out = "pseudo_year,eval_first,eval_last,ate,pre_rmse\n";
  const auto window = result.eval_window.value_or(std::pair<int, int>{0, 0});
  out += std::to_string(result.pseudo_year.value_or(0)) + "," +
         std::to_string(window.first) + "," + std::to_string(window.second) +
         "," + fmt_fixed(result.ate) + "," + fmt_fixed(result.pre_rmse) + "\n";
  write_text_atomic(path, out);
}

void write_loo_envelope_csv(const std::string& path, const LooResult& result) {
  std::string out = "year,base_effect,min_effect,max_effect\n";
  for (const auto& row : result.envelope) {
    out += std::to_string(row.year) + "," + fmt_fixed(row.base_effect) + "," +
           fmt_fixed(row.min_effect) + "," + fmt_fixed(row.max_effect) + "\n";
  }
  write_text_atomic(path, out);
}

void write_did_csv(const std::string& path, const DidFit& fit) {
  std::string out = "term,estimate,robust_se,significance\n";
  for (const auto& c : fit.coefficients) {
    out += c.name + "," + fmt_fixed(c.estimate) + "," + fmt_fixed(c.robust_se) +
           "," + significance_stars(c.p) + "\n";
  }
  out += "r_squared," + fmt_fixed(fit.r_squared) + ",,\n";
  out += "observations," + std::to_string(fit.n_observations) + ",,\n";
  write_text_atomic(path, out);
}

void write_did_json(const std::string& path, const DidFit& fit) {
  ordered_json j;
  j["vcov"] = fit.vcov;
  j["n_observations"] = fit.n_observations;
  j["r_squared"] = fit.r_squared;
  ordered_json coefs = ordered_json::array();
  for (const auto& c : fit.coefficients) {
    ordered_json row;
    row["name"] = c.name;
    row["estimate"] = c.estimate;
    row["robust_se"] = c.robust_se;
    row["z"] = c.z;
    row["p"] = c.p;
    row["significance"] = significance_stars(c.p);
    coefs.push_back(row);
  }
  j["coefficients"] = coefs;
  write_json_atomic(path, j);
}

void write_truth_json(const std::string& path, const SimTruth& truth) {
  ordered_json j;
  j["treated"] = truth.treated;
  j["treatment_year"] = truth.treatment_year;
  j["nominal_effect"] = truth.nominal_effect;
  j["realized_effect"] = truth.realized_effect;
  ordered_json per_year = ordered_json::array();
  for (size_t i = 0; i < truth.post_years.size(); ++i) {
    ordered_json row;
    row["year"] = truth.post_years[i];
    row["realized"] =
        i < truth.per_year_realized.size() ? truth.per_year_realized[i] : 0.0;
    per_year.push_back(row);
  }
  j["per_year_realized"] = per_year;
  j["seed"] = truth.seed;
  j["outcome_model"] = truth.outcome_model;
  write_json_atomic(path, j);
}

EffectsTable read_effects_csv(const std::string& path) {
  const Csv csv = read_csv_file(path);
  expect_header(csv, "year,actual,predicted,effect", path);
  EffectsTable t;
  for (const auto& row : csv.rows) {
    t.years.push_back(field_int(row, 0, path));
    t.actual.push_back(field_double(row, 1, path));
    t.predicted.push_back(field_double(row, 2, path));
    t.effect.push_back(field_double(row, 3, path));
  }
  return t;
}

std::vector<WeightRow> read_weights_csv(const std::string& path) {
  const Csv csv = read_csv_file(path);
  if (csv.header.size() != 2) throw Error(path + ": expected 2 columns");
  std::vector<WeightRow> rows;
  for (const auto& row : csv.rows) {
    rows.push_back({row.at(0), field_double(row, 1, path)});
  }
  return rows;
}

std::vector<LooEnvelopeRow> read_loo_envelope_csv(const std::string& path) {
  const Csv csv = read_csv_file(path);
  expect_header(csv, "year,base_effect,min_effect,max_effect", path);
  std::vector<LooEnvelopeRow> rows;
  for (const auto& row : csv.rows) {
    LooEnvelopeRow r;
    r.year = field_int(row, 0, path);
    r.base_effect = field_double(row, 1, path);
    r.min_effect = field_double(row, 2, path);
    r.max_effect = field_double(row, 3, path);
    rows.push_back(r);
  }
  return rows;
}

std::vector<PlaceboSpaceRow> read_placebo_space_csv(const std::string& path) {
  const Csv csv = read_csv_file(path);
  expect_header(csv, "pseudo_treated,ate,pre_rmse", path);
  std::vector<PlaceboSpaceRow> rows;
  for (const auto& row : csv.rows) {
    rows.push_back(
        {row.at(0), field_double(row, 1, path), field_double(row, 2, path)});
  }
  return rows;
}

PlaceboTimeRow read_placebo_time_csv(const std::string& path) {
  const Csv csv = read_csv_file(path);
  expect_header(csv, "pseudo_year,eval_first,eval_last,ate,pre_rmse", path);
  if (csv.rows.size() != 1) throw Error(path + ": expected exactly one row");
  PlaceboTimeRow r;
  r.pseudo_year = field_int(csv.rows[0], 0, path);
  r.eval_first = field_int(csv.rows[0], 1, path);
  r.eval_last = field_int(csv.rows[0], 2, path);
  r.ate = field_double(csv.rows[0], 3, path);
  r.pre_rmse = field_double(csv.rows[0], 4, path);
  return r;
}

void write_manifest_json(const std::string& path, const RunManifest& manifest) {
  ordered_json j;
  j["subcommand"] = manifest.subcommand;
  j["seed"] = manifest.seed;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : manifest.config) cfg[k] = v;
  j["config"] = cfg;
  j["inputs"] = manifest.inputs;
  j["outputs"] = manifest.outputs;
  j["warnings"] = manifest.warnings;
  write_json_atomic(path, j);
}

namespace {

// CSV -> array of row objects, numeric where the field parses as a number
ordered_json csv_to_json(const std::string& path) {
  const Csv csv = read_csv_file(path);
  ordered_json rows = ordered_json::array();
  for (const auto& row : csv.rows) {
    ordered_json obj = ordered_json::object();
    for (size_t i = 0; i < csv.header.size() && i < row.size(); ++i) {
      const std::string& cell = row[i];
      try {
        size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used == cell.size() && !cell.empty()) {
          obj[csv.header[i]] = v;
          continue;
        }
      } catch (...) {
      }
      obj[csv.header[i]] = cell;
    }
    rows.push_back(obj);
  }
  return rows;
}

bool file_present(const std::filesystem::path& p) {
  std::error_code ec;
  return std::filesystem::exists(p, ec);
}

}  // namespace

std::string build_report_json(const std::string& run_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(run_dir);
  ordered_json report;
  report["run_dir"] = run_dir;
  ordered_json tables = ordered_json::object();
  ordered_json figures = ordered_json::object();
  bool any = false;

  if (file_present(dir / "summary.json")) {
    report["scm_summary"] = ordered_json::parse(read_text((dir / "summary.json").string()));
    any = true;
  }
  if (file_present(dir / "balance.csv")) {
    tables["balance"] = csv_to_json((dir / "balance.csv").string());
    any = true;
  }
  if (file_present(dir / "weights.csv")) {
    tables["donor_weights"] = csv_to_json((dir / "weights.csv").string());
    any = true;
  }
  if (file_present(dir / "vweights.csv")) {
    tables["v_weights"] = csv_to_json((dir / "vweights.csv").string());
    any = true;
  }
  if (file_present(dir / "effects.csv")) {
    const EffectsTable t = read_effects_csv((dir / "effects.csv").string());
    tables["effects"] = csv_to_json((dir / "effects.csv").string());
    ordered_json path_series = ordered_json::array();
    ordered_json gap_series = ordered_json::array();
    for (size_t i = 0; i < t.years.size(); ++i) {
      ordered_json p;
      p["year"] = t.years[i];
      p["actual"] = t.actual[i];
      p["synthetic"] = t.predicted[i];
      path_series.push_back(p);
      ordered_json g;
      g["year"] = t.years[i];
      g["effect"] = t.effect[i];
      gap_series.push_back(g);
    }
    figures["outcome_path"] = path_series;
    figures["treatment_gap"] = gap_series;
    any = true;
  }
  if (file_present(dir / "loo_envelope.csv")) {
    const auto rows = read_loo_envelope_csv((dir / "loo_envelope.csv").string());
    tables["loo_envelope"] = csv_to_json((dir / "loo_envelope.csv").string());
    ordered_json series = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json e;
      e["year"] = r.year;
      e["min"] = r.min_effect;
      e["max"] = r.max_effect;
      series.push_back(e);
    }
    figures["loo_envelope"] = series;
    any = true;
  }
  if (file_present(dir / "placebo_space.csv")) {
    tables["placebo_space"] = csv_to_json((dir / "placebo_space.csv").string());
    any = true;
  }
  if (file_present(dir / "placebo_time.csv")) {
    tables["placebo_time"] = csv_to_json((dir / "placebo_time.csv").string());
    any = true;
  }
  if (file_present(dir / "did.csv")) {
    tables["did"] = csv_to_json((dir / "did.csv").string());
    any = true;
  }
  if (file_present(dir / "did.json")) {
    report["did_estimates"] = ordered_json::parse(read_text((dir / "did.json").string()));
    any = true;
  }
  if (file_present(dir / "metrics.csv")) {
    tables["metrics"] = csv_to_json((dir / "metrics.csv").string());
    any = true;
  }
  if (file_present(dir / "truth.json")) {
    report["truth"] = ordered_json::parse(read_text((dir / "truth.json").string()));
    any = true;
  }

  if (!any) {
    throw Error("report: no known artifacts found in " + run_dir);
  }
  report["tables"] = tables;
  report["figures"] = figures;

  std::string text;
  render_json(report, text, 0);
  text += "\n";
  return text;
}

}  // namespace synthbal
