#include "synthbal/scm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "synthbal/rng.hpp"

namespace synthbal {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Euclidean projection onto the probability simplex (sort-based).
VectorXd project_simplex(const VectorXd& y) {
  const int n = static_cast<int>(y.size());
  std::vector<double> u(y.data(), y.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (int i = 0; i < n; ++i) {
    cumsum += u[i];
    const double t = (cumsum - 1.0) / (i + 1);
    if (u[i] - t > 0.0) tau = t;
  }
  VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = std::max(y[i] - tau, 0.0);
  return x;
}

struct Quadratic {
  MatrixXd q;  // X0' V X0
  VectorXd b;  // X0' V x1
  double c = 0.0;  // x1' V x1

  double value(const VectorXd& g) const {
    return (g.dot(q * g) - 2.0 * b.dot(g)) + c;
  }
  VectorXd gradient(const VectorXd& g) const { return 2.0 * (q * g - b); }
};

double distance_to_uniform(const VectorXd& g) {
  const double u = 1.0 / g.size();
  double d = 0.0;
  for (int i = 0; i < g.size(); ++i) d += (g[i] - u) * (g[i] - u);
  return d;
}

struct Candidate {
  VectorXd g;
  double value = std::numeric_limits<double>::infinity();
};

void consider(Candidate& best, const Quadratic& f, VectorXd g) {
  for (int i = 0; i < g.size(); ++i) g[i] = std::max(g[i], 0.0);
  const double sum = g.sum();
  if (sum <= 0.0) return;
  g /= sum;
  const double value = f.value(g);
  if (value < best.value - 1e-14 ||
      (value <= best.value + 1e-14 &&
       distance_to_uniform(g) < distance_to_uniform(best.g) - 1e-14)) {
    best.g = g;
    best.value = value;
  }
}

// Minimize over the affine hull of a support: KKT system with the sum
// constraint. LU first for speed; anything singular or shaky falls back to
// the rank-revealing min-norm solve, which is also the canonical choice on
// flat objectives.
bool solve_support(const Quadratic& f, const std::vector<int>& support,
                   VectorXd& out, bool force_min_norm = false) {
  const int s = static_cast<int>(support.size());
  MatrixXd kkt(s + 1, s + 1);
  VectorXd rhs(s + 1);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) kkt(i, j) = 2.0 * f.q(support[i], support[j]);
    kkt(i, s) = 1.0;
    kkt(s, i) = 1.0;
    rhs[i] = 2.0 * f.b[support[i]];
  }
  kkt(s, s) = 0.0;
  rhs[s] = 1.0;

  VectorXd sol;
  bool ok = false;
  if (!force_min_norm) {
    sol = kkt.partialPivLu().solve(rhs);
    const double scale = 1.0 + rhs.cwiseAbs().maxCoeff() + kkt.cwiseAbs().maxCoeff();
    ok = sol.allFinite() &&
         (kkt * sol - rhs).cwiseAbs().maxCoeff() <= 1e-10 * scale;
  }
  if (!ok) {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(kkt);
    sol = cod.solve(rhs);
    if (!sol.allFinite()) return false;
  }
  out = VectorXd::Zero(f.q.rows());
  for (int i = 0; i < s; ++i) out[support[i]] = sol[i];
  return true;
}

void enumerate_supports(const Quadratic& f, int n, Candidate& best) {
  std::vector<int> support;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if ((mask & (mask - 1)) == 0) continue;  // vertices are seeded separately
    support.clear();
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) support.push_back(i);
    }
    VectorXd g;
    if (!solve_support(f, support, g)) continue;
    if (g.minCoeff() < -1e-9) continue;  // leaves the face; smaller supports cover it
    consider(best, f, g);
  }
}

void fista(const Quadratic& f, VectorXd g, int iterations, Candidate& best) {
  double lipschitz = 2.0 * f.q.selfadjointView<Eigen::Lower>()
                               .eigenvalues()
                               .cwiseAbs()
                               .maxCoeff();
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    consider(best, f, g);
    return;
  }
  const double step = 1.0 / lipschitz;
  VectorXd y = g;
  double t = 1.0;
  double prev = f.value(g);
  for (int it = 0; it < iterations; ++it) {
    const VectorXd g_next = project_simplex(y - step * f.gradient(y));
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = g_next + ((t - 1.0) / t_next) * (g_next - g);
    g = g_next;
    t = t_next;
    const double cur = f.value(g);
    if (cur > prev) {  // adaptive restart
      y = g;
      t = 1.0;
    }
    prev = cur;
  }
  consider(best, f, g);
}

// canonical min-norm re-solve on the active support; collapses flat-optimum
// ties to a scale-stable point
void polish_support(const Quadratic& f, Candidate& best) {
  const int n = static_cast<int>(best.g.size());
  std::vector<int> support;
  for (int i = 0; i < n; ++i) {
    if (best.g[i] > 1e-11) support.push_back(i);
  }
  if (support.empty()) return;
  VectorXd refined;
  if (!solve_support(f, support, refined, /*force_min_norm=*/true)) return;
  if (refined.minCoeff() < -1e-10) return;
  consider(best, f, refined);
}

}  // namespace

namespace {

// `thorough` adds the projected-gradient refinement pass; the support
// enumeration alone is already exact away from degenerate ties, so the
// outer search uses the fast path and the final answer the thorough one.
DonorWeights solve_inner_impl(const std::vector<double>& x1,
                              const std::vector<double>& x0_row_major,
                              int n_donors, const std::vector<double>& v,
                              bool thorough) {
  const int rows = static_cast<int>(x1.size());
  if (n_donors < 1) throw Error("solve_inner: need at least one donor");
  if (rows < 1) throw Error("solve_inner: need at least one predictor row");
  if (x0_row_major.size() != static_cast<size_t>(rows) * n_donors) {
    throw Error("solve_inner: X0 dimensions do not match X1");
  }
  if (v.size() != static_cast<size_t>(rows)) {
    throw Error("solve_inner: V length does not match predictor count");
  }
  double v_total = 0.0;
  for (double w : v) {
    if (w < 0.0 || !std::isfinite(w)) throw Error("solve_inner: V entries must be non-negative");
    v_total += w;
  }

  MatrixXd x0(rows, n_donors);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < n_donors; ++j) {
      x0(i, j) = x0_row_major[static_cast<size_t>(i) * n_donors + j];
    }
  }
  VectorXd target = Eigen::Map<const VectorXd>(x1.data(), rows);
  // the argmin is invariant to the scale of V; normalizing here makes the
  // computation (and its floating-point path) scale-stable too
  VectorXd weights = Eigen::Map<const VectorXd>(v.data(), rows);
  if (v_total > 0.0) weights /= v_total;

  Quadratic f;
  f.q = x0.transpose() * weights.asDiagonal() * x0;
  f.b = x0.transpose() * (weights.asDiagonal() * target);
  f.c = target.dot(weights.asDiagonal() * target);

  Candidate best;
  best.g = VectorXd::Constant(n_donors, 1.0 / n_donors);
  best.value = f.value(best.g);

  if (n_donors == 1) {
    DonorWeights out;
    out.values = {1.0};
    out.objective =
        std::max(f.value(VectorXd::Ones(1)), 0.0) * (v_total > 0.0 ? v_total : 1.0);
    return out;
  }

  for (int i = 0; i < n_donors; ++i) {
    consider(best, f, VectorXd::Unit(n_donors, i));
  }
  if (n_donors <= 12) {
    enumerate_supports(f, n_donors, best);
    if (thorough) fista(f, best.g, 400, best);
  } else {
    fista(f, best.g, thorough ? 4000 : 1000, best);
  }
  if (thorough) polish_support(f, best);

  DonorWeights out;
  out.values.assign(best.g.data(), best.g.data() + n_donors);
  out.objective = std::max(best.value, 0.0) * (v_total > 0.0 ? v_total : 1.0);

  double sum = 0.0;
  for (double g : out.values) {
    if (g < -1e-9) throw Error("solve_inner: infeasible weight");
    sum += g;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error("solve_inner: weights do not sum to 1");
  return out;
}

}  // namespace

DonorWeights solve_inner(const std::vector<double>& x1,
                         const std::vector<double>& x0_row_major, int n_donors,
                         const std::vector<double>& v) {
  return solve_inner_impl(x1, x0_row_major, n_donors, v, /*thorough=*/true);
}

DonorWeights solve_inner(const PredictorBlock& block, const std::vector<double>& v) {
  return solve_inner(block.treated, block.donor_values, block.cols(), v);
}

namespace {

struct OuterProblem {
  const PredictorBlock* block;
  // pre-period outcome paths
  std::vector<double> y1_pre;
  MatrixXd y0_pre;  // pre seasons x donors

  double rmse_for(const DonorWeights& g) const {
    const int t = static_cast<int>(y1_pre.size());
    const VectorXd gw =
        Eigen::Map<const VectorXd>(g.values.data(), g.values.size());
    const VectorXd synth = y0_pre * gw;
    double ss = 0.0;
    for (int i = 0; i < t; ++i) {
      const double gap = y1_pre[i] - synth[i];
      ss += gap * gap;
    }
    return std::sqrt(ss / t);
  }
};

std::vector<double> normalize_v(const std::vector<double>& z) {
  std::vector<double> v(z.size());
  double sum = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    v[i] = z[i] * z[i];
    sum += v[i];
  }
  if (sum <= 0.0) {
    std::fill(v.begin(), v.end(), 1.0 / v.size());
    return v;
  }
  for (double& x : v) x /= sum;
  return v;
}

struct Evaluation {
  std::vector<double> v;
  DonorWeights g;
  double rmse = std::numeric_limits<double>::infinity();
};

double v_distance_to_equal(const std::vector<double>& v) {
  const double u = 1.0 / v.size();
  double d = 0.0;
  for (double x : v) d += (x - u) * (x - u);
  return d;
}

// Nelder-Mead over z in R^k with v = z^2 / sum z^2. Fixed budget, no RNG.
Evaluation nelder_mead(const OuterProblem& problem, std::vector<double> z0,
                       int max_evals) {
  const int dim = static_cast<int>(z0.size());
  auto evaluate = [&problem](const std::vector<double>& z) {
    Evaluation e;
    e.v = normalize_v(z);
    const auto& block = *problem.block;
    e.g = solve_inner_impl(block.treated, block.donor_values, block.cols(), e.v,
                           /*thorough=*/false);
    e.rmse = problem.rmse_for(e.g);
    return e;
  };

  struct Vertex {
    std::vector<double> z;
    Evaluation eval;
  };
  std::vector<Vertex> simplex;
  simplex.reserve(dim + 1);
  simplex.push_back({z0, evaluate(z0)});
  for (int i = 0; i < dim; ++i) {
    std::vector<double> z = z0;
    z[i] += 0.25;
    simplex.push_back({z, evaluate(z)});
  }
  int evals = dim + 1;
  Evaluation best = simplex.front().eval;
  for (const auto& v : simplex) {
    if (v.eval.rmse < best.rmse) best = v.eval;
  }

  auto order = [&simplex]() {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) {
                return a.eval.rmse < b.eval.rmse;
              });
  };

  while (evals < max_evals) {
    order();
    if (simplex.back().eval.rmse - simplex.front().eval.rmse < 1e-13) break;

    std::vector<double> centroid(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
      for (int d = 0; d < dim; ++d) centroid[d] += simplex[i].z[d];
    }
    for (double& c : centroid) c /= dim;

    auto blend = [&](double coef) {
      std::vector<double> z(dim);
      for (int d = 0; d < dim; ++d) {
        z[d] = centroid[d] + coef * (simplex.back().z[d] - centroid[d]);
      }
      return z;
    };

    const auto zr = blend(-1.0);  // reflection
    auto er = evaluate(zr);
    ++evals;
    if (er.rmse < best.rmse) best = er;

    if (er.rmse < simplex.front().eval.rmse) {
      const auto ze = blend(-2.0);  // expansion
      auto ee = evaluate(ze);
      ++evals;
      if (ee.rmse < best.rmse) best = ee;
      simplex.back() = ee.rmse < er.rmse ? Vertex{ze, ee} : Vertex{zr, er};
      continue;
    }
    if (er.rmse < simplex[dim - 1].eval.rmse) {
      simplex.back() = {zr, er};
      continue;
    }
    const auto zc = blend(0.5);  // contraction
    auto ec = evaluate(zc);
    ++evals;
    if (ec.rmse < best.rmse) best = ec;
    if (ec.rmse < simplex.back().eval.rmse) {
      simplex.back() = {zc, ec};
      continue;
    }
    for (int i = 1; i <= dim && evals < max_evals; ++i) {  // shrink
      for (int d = 0; d < dim; ++d) {
        simplex[i].z[d] = 0.5 * (simplex[i].z[d] + simplex[0].z[d]);
      }
      simplex[i].eval = evaluate(simplex[i].z);
      ++evals;
      if (simplex[i].eval.rmse < best.rmse) best = simplex[i].eval;
    }
  }
  return best;
}

bool all_donor_columns_identical(const PredictorBlock& block) {
  for (int r = 0; r < block.rows(); ++r) {
    for (int c = 1; c < block.cols(); ++c) {
      if (std::abs(block.donor_at(r, c) - block.donor_at(r, 0)) > 1e-12) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

std::pair<VWeights, DonorWeights> optimize_v(const PanelDataset& panel,
                                             const std::string& treated,
                                             int treatment_year,
                                             const PredictorBlock& block,
                                             const VSearchParams& params,
                                             Warnings* warnings) {
  const int treated_idx = panel.unit_index(treated);
  if (treated_idx < 0) throw Error("treated unit '" + treated + "' not in panel");

  OuterProblem problem;
  problem.block = &block;
  std::vector<int> pre_seasons;
  for (int s = 0; s < panel.n_seasons(); ++s) {
    if (panel.seasons[s] < treatment_year) pre_seasons.push_back(s);
  }
  if (pre_seasons.empty()) throw Error("no pre-period seasons before treatment year");
  problem.y0_pre.resize(static_cast<int>(pre_seasons.size()), block.cols());
  for (size_t i = 0; i < pre_seasons.size(); ++i) {
    problem.y1_pre.push_back(panel.outcome_at(treated_idx, pre_seasons[i]));
    for (int c = 0; c < block.cols(); ++c) {
      const int d = panel.unit_index(block.donor_ids[c]);
      if (d < 0) throw Error("donor '" + block.donor_ids[c] + "' not in panel");
      problem.y0_pre(static_cast<int>(i), c) = panel.outcome_at(d, pre_seasons[i]);
    }
  }

  const int k = block.rows();
  VWeights v_out;
  v_out.labels = block.labels;

  if (all_donor_columns_identical(block)) {
    warn(warnings, "all donors identical on the predictor block; "
                   "returning equal weights");
    v_out.values.assign(k, 1.0 / k);
    DonorWeights g;
    g.values.assign(block.cols(), 1.0 / block.cols());
    g.objective = solve_inner(block, v_out.values).objective;
    return {v_out, g};
  }

  // documented start set: equal weights, one-hot per predictor, seeded draws
  std::vector<std::vector<double>> starts;
  starts.emplace_back(k, 1.0);
  for (int i = 0; i < k; ++i) {
    std::vector<double> z(k, 0.0);
    z[i] = 1.0;
    starts.push_back(std::move(z));
  }
  Rng rng(derive_seed(params.seed, hash_str("v-search-starts")));
  for (int s = 0; s < params.random_starts; ++s) {
    std::vector<double> z(k);
    for (double& x : z) x = std::abs(rng.normal()) + 0.05;
    starts.push_back(std::move(z));
  }

  Evaluation best;
  for (const auto& z0 : starts) {
    Evaluation e = nelder_mead(problem, z0, params.max_evals_per_start);
    const bool better =
        e.rmse < best.rmse - 1e-10 ||
        (e.rmse <= best.rmse + 1e-10 &&
         v_distance_to_equal(e.v) < v_distance_to_equal(best.v) - 1e-14);
    if (best.v.empty() || better) best = std::move(e);
  }

  v_out.values = best.v;
  // the search evaluates the fast inner path; the returned weights are the
  // thorough solve at the selected V
  return {v_out, solve_inner(block, best.v)};
}

ScmFit fit_scm(const PanelDataset& panel, const ScmConfig& config,
               Warnings* warnings) {
  panel.validate();
  const PredictorBlock block =
      build_predictors(panel, config.treated, config.treatment_year,
                       config.predictors, config.donors);
  auto [v, g] = optimize_v(panel, config.treated, config.treatment_year, block,
                           config.search, warnings);

  ScmFit fit;
  fit.treated = config.treated;
  fit.treatment_year = config.treatment_year;
  fit.donors = block.donor_ids;
  fit.donor_weights = g;
  fit.v_weights = v;
  fit.seed = config.search.seed;

  const int treated_idx = panel.unit_index(config.treated);
  std::vector<int> donor_idx;
  for (const auto& d : block.donor_ids) donor_idx.push_back(panel.unit_index(d));

  double pre_ss = 0.0;
  int pre_n = 0, post_n = 0;
  double post_sum = 0.0;
  for (int s = 0; s < panel.n_seasons(); ++s) {
    const int year = panel.seasons[s];
    double synth = 0.0;
    for (size_t c = 0; c < donor_idx.size(); ++c) {
      synth += g.values[c] * panel.outcome_at(donor_idx[c], s);
    }
    const double actual = panel.outcome_at(treated_idx, s);
    fit.years.push_back(year);
    fit.actual.push_back(actual);
    fit.synthetic.push_back(synth);
    fit.gaps.push_back(actual - synth);
    if (year < config.treatment_year) {
      pre_ss += (actual - synth) * (actual - synth);
      ++pre_n;
    } else {
      post_sum += actual - synth;
      ++post_n;
    }
  }
  if (pre_n == 0) throw Error("no pre-period seasons");
  if (post_n == 0) throw Error("no post-period seasons");
  fit.pre_rmse = std::sqrt(pre_ss / pre_n);
  fit.ate = post_sum / post_n;

  for (int r = 0; r < block.rows(); ++r) {
    BalanceRow row;
    row.predictor = block.labels[r];
    row.v_weight = v.values[r];
    row.treated_value = block.treated[r];
    double synth = 0.0, pool = 0.0;
    for (int c = 0; c < block.cols(); ++c) {
      synth += g.values[c] * block.donor_at(r, c);
      pool += block.donor_at(r, c);
    }
    pool /= block.cols();
    row.synthetic_value = synth;
    row.donor_pool_average = pool;
    row.control_bias = row.treated_value != 0.0
                           ? (synth - row.treated_value) / row.treated_value
                           : 0.0;
    row.donor_pool_bias = row.treated_value != 0.0
                              ? (pool - row.treated_value) / row.treated_value
                              : 0.0;
    fit.balance.push_back(row);
  }
  return fit;
}

}  // namespace synthbal
