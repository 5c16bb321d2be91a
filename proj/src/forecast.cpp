#include "msvar/forecast.hpp"

#include "msvar/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace msvar {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

DatasetT head_rows(const DatasetT& data, Eigen::Index n) {
  DatasetT out;
  out.y = data.y.topRows(n);
  if (data.x.size() > 0) out.x = data.x.topRows(n);
  out.labels = data.labels;
  out.xlabels = data.xlabels;
  return out;
}

}  // namespace

Vec one_step_forecast(const MsVarModel& model, const DatasetT& history) {
  const ModelSpec& spec = model.spec;
  const Eigen::Index T = history.rows();
  if (T < spec.lag() + 1)
    throw std::invalid_argument("one_step_forecast: insufficient history");

  Vec next_prob;
  if (spec.M == 1) {
    next_prob = Vec::Ones(1);
  } else {
    const LaggedDesign design = build_design(history, spec);
    const Mat logdens = state_logdensities(model, design);
    const FilterResult f = forward_filter(logdens, model.trans, model.init);
    next_prob = model.trans.transpose() *
                f.filtered.row(f.filtered.rows() - 1).transpose();
  }

  Vec forecast = Vec::Zero(spec.d);
  for (int s = 0; s < spec.M; ++s) {
    Vec mean = Vec::Zero(spec.d);
    for (int j = 1; j <= spec.p; ++j)
      mean.noalias() +=
          model.regimes[s].A[j - 1] * history.y.row(T - j).transpose();
    for (int j = 1; j <= spec.q; ++j)
      mean.noalias() +=
          model.regimes[s].B[j - 1] * history.x.row(T - j).transpose();
    if (spec.intercept) mean += model.regimes[s].intercept;
    forecast += next_prob[s] * mean;
  }
  return forecast;
}

void ForecastRun::finalize() {
  msfe = 0.0;
  for (double e : errors) msfe += e * e;
  if (!errors.empty()) msfe /= static_cast<double>(errors.size());
}

ForecastRun expanding_eval(const DatasetT& data, const ModelSpec& spec,
                           const ExpandingOptions& fopts,
                           const EmOptions& em_opts) {
  if (fopts.origin_begin <= spec.lag() + 10 ||
      fopts.origin_end > data.rows() || fopts.origin_begin >= fopts.origin_end)
    throw std::invalid_argument("expanding_eval: origin range out of data");

  ForecastRun run;
  run.method = fopts.family == PenaltyFamily::Lasso ? "msvar_lasso"
                                                    : "msvar_scad";

  // Tune once on the first window; keep lambda (and LLA weights) fixed.
  const DatasetT first = head_rows(data, fopts.origin_begin);
  const TuningGrid grid =
      default_grid(first, spec, fopts.grid_n, fopts.grid_lo, fopts.grid_hi);
  TuneResult tuned = tune(first, spec, fopts.family, grid, em_opts);
  PenaltyConfig penalty = tuned.best.penalty;
  MsVarModel current = tuned.best.model;

  int since_refit = 0;
  for (Eigen::Index o = fopts.origin_begin; o < fopts.origin_end; ++o) {
    const DatasetT window = head_rows(data, o);
    if (o > fopts.origin_begin) {
      if (since_refit >= fopts.refit_every) {
        EmOptions refit_opts = em_opts;
        refit_opts.warm = current;
        refit_opts.n_restarts = 1;
        refit_opts.seed = derive_seed(em_opts.seed, 0xF17ULL + o);
        FitResult refit = em_fit(window, spec, penalty, refit_opts);
        if (refit.failed) {
          run.skipped.push_back(o);
          continue;
        }
        current = refit.model;
        since_refit = 0;
      }
    }
    ++since_refit;
    const Vec f = one_step_forecast(current, window);
    run.origins.push_back(o);
    run.forecasts.push_back(f[fopts.target]);
    run.realized.push_back(data.y(o, fopts.target));
    run.errors.push_back(data.y(o, fopts.target) - f[fopts.target]);
  }
  run.finalize();
  return run;
}

double historical_average(std::span<const double> history) {
  if (history.empty())
    throw std::invalid_argument("historical_average: empty history");
  double sum = 0.0;
  for (double v : history) sum += v;
  return sum / static_cast<double>(history.size());
}

ForecastRun historical_average_run(const DatasetT& data, int target,
                                   Eigen::Index origin_begin,
                                   Eigen::Index origin_end) {
  ForecastRun run;
  run.method = "hist_avg";
  std::vector<double> past(data.y.col(target).data(),
                           data.y.col(target).data() + data.rows());
  for (Eigen::Index o = origin_begin; o < origin_end; ++o) {
    const double f =
        historical_average(std::span<const double>(past.data(), o));
    run.origins.push_back(o);
    run.forecasts.push_back(f);
    run.realized.push_back(data.y(o, target));
    run.errors.push_back(data.y(o, target) - f);
  }
  run.finalize();
  return run;
}

namespace {

// Conditional sum of squares of an ARMA(1,1): e_t = y_t - c - phi y_{t-1}
// - theta e_{t-1}, e_1 = 0.
double arma_css(std::span<const double> y, double c, double phi,
                double theta) {
  if (std::abs(phi) > 0.998 || std::abs(theta) > 0.998) return 1e100;
  double css = 0.0, e_prev = 0.0;
  for (std::size_t t = 1; t < y.size(); ++t) {
    const double e = y[t] - c - phi * y[t - 1] - theta * e_prev;
    css += e * e;
    e_prev = e;
  }
  return css;
}

// Compact Nelder-Mead for the 3-parameter CSS surface.
bool nelder_mead(std::function<double(const Vec&)> f, Vec& x, int max_eval) {
  const int n = static_cast<int>(x.size());
  std::vector<Vec> simplex(n + 1, x);
  std::vector<double> fv(n + 1);
  for (int i = 0; i < n; ++i)
    simplex[i + 1][i] += x[i] != 0.0 ? 0.1 * std::abs(x[i]) + 0.05 : 0.1;
  for (int i = 0; i <= n; ++i) fv[i] = f(simplex[i]);
  int evals = n + 1;

  while (evals < max_eval) {
    // order
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (fv[j] < fv[i]) {
          std::swap(fv[i], fv[j]);
          std::swap(simplex[i], simplex[j]);
        }
    if (std::abs(fv[n] - fv[0]) <=
        1e-12 * (std::abs(fv[0]) + 1e-12)) {
      x = simplex[0];
      return true;
    }
    Vec centroid = Vec::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= n;

    const Vec xr = centroid + (centroid - simplex[n]);
    const double fr = f(xr);
    ++evals;
    if (fr < fv[0]) {
      const Vec xe = centroid + 2.0 * (centroid - simplex[n]);
      const double fe = f(xe);
      ++evals;
      simplex[n] = fe < fr ? xe : xr;
      fv[n] = std::min(fe, fr);
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      const Vec xc = centroid + 0.5 * (simplex[n] - centroid);
      const double fc = f(xc);
      ++evals;
      if (fc < fv[n]) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
          fv[i] = f(simplex[i]);
          ++evals;
        }
      }
    }
  }
  // order once more and keep the best point
  int bi = 0;
  for (int i = 1; i <= n; ++i)
    if (fv[i] < fv[bi]) bi = i;
  x = simplex[bi];
  return false;
}

}  // namespace

Arma11Forecast arma11_forecast(std::span<const double> history) {
  Arma11Forecast out;
  if (history.size() < 24)
    throw std::invalid_argument("arma11_forecast: need >= 24 observations");
  const double mean = historical_average(history);

  // AR(1) least squares as the starting point
  double num = 0.0, den = 0.0;
  for (std::size_t t = 1; t < history.size(); ++t) {
    num += (history[t - 1] - mean) * (history[t] - mean);
    den += (history[t - 1] - mean) * (history[t - 1] - mean);
  }
  const double phi0 = den > 0.0 ? std::clamp(num / den, -0.95, 0.95) : 0.0;

  Vec x(3);
  x << mean * (1.0 - phi0), phi0, 0.0;
  out.converged = nelder_mead(
      [&](const Vec& p) { return arma_css(history, p[0], p[1], p[2]); }, x,
      2000);
  out.c = x[0];
  out.phi = x[1];
  out.theta = x[2];
  if (!out.converged || std::abs(out.phi) > 0.998 ||
      std::abs(out.theta) > 0.998) {
    out.fallback = true;
    out.forecast = mean;
    return out;
  }
  double e_prev = 0.0;
  for (std::size_t t = 1; t < history.size(); ++t)
    e_prev = history[t] - out.c - out.phi * history[t - 1] -
             out.theta * e_prev;
  out.forecast = out.c + out.phi * history[history.size() - 1] +
                 out.theta * e_prev;
  return out;
}

ForecastRun arma11_run(const DatasetT& data, int target,
                       Eigen::Index origin_begin, Eigen::Index origin_end,
                       int refit_every) {
  ForecastRun run;
  run.method = "arma11";
  std::vector<double> past(data.y.col(target).data(),
                           data.y.col(target).data() + data.rows());
  Arma11Forecast last;
  int since_refit = refit_every;  // force a fit at the first origin
  for (Eigen::Index o = origin_begin; o < origin_end; ++o) {
    const std::span<const double> h(past.data(), o);
    if (since_refit >= refit_every) {
      last = arma11_forecast(h);
      since_refit = 0;
    } else {
      // reuse coefficients, refresh the recursion on the longer history
      double e_prev = 0.0;
      for (std::size_t t = 1; t < h.size(); ++t)
        e_prev = h[t] - last.c - last.phi * h[t - 1] - last.theta * e_prev;
      last.forecast = last.fallback
                          ? historical_average(h)
                          : last.c + last.phi * h[h.size() - 1] +
                                last.theta * e_prev;
    }
    ++since_refit;
    run.origins.push_back(o);
    run.forecasts.push_back(last.forecast);
    run.realized.push_back(data.y(o, target));
    run.errors.push_back(data.y(o, target) - last.forecast);
  }
  run.finalize();
  return run;
}

DmResult dm_test(std::span<const double> errors_a,
                 std::span<const double> errors_b, bool one_sided,
                 bool harvey_correction) {
  const std::size_t n = errors_a.size();
  if (n != errors_b.size() || n < 10)
    throw std::invalid_argument("dm_test: need equal lengths >= 10");
  Vec d(n);
  for (std::size_t t = 0; t < n; ++t)
    d[t] = errors_a[t] * errors_a[t] - errors_b[t] * errors_b[t];
  const double mean = d.mean();
  const double var = (d.array() - mean).square().sum() /
                     static_cast<double>(n - 1);
  DmResult out;
  if (var <= 1e-20 * (1.0 + mean * mean)) {
    out.degenerate = true;
    out.statistic = mean == 0.0 ? 0.0 : (mean < 0.0 ? -1e15 : 1e15);
  } else {
    out.statistic = mean / std::sqrt(var / static_cast<double>(n));
    if (harvey_correction)
      out.statistic *= std::sqrt(static_cast<double>(n - 1) /
                                 static_cast<double>(n));
  }
  out.p_value = one_sided
                    ? normal_cdf(out.statistic)
                    : 2.0 * (1.0 - normal_cdf(std::abs(out.statistic)));
  return out;
}

RealityCheckResult reality_check(
    std::span<const double> benchmark_errors,
    const std::vector<std::vector<double>>& candidate_errors, int n_bootstrap,
    double mean_block, std::uint64_t seed) {
  const std::size_t n = benchmark_errors.size();
  if (n < 10) throw std::invalid_argument("reality_check: series too short");
  if (candidate_errors.empty())
    throw std::invalid_argument("reality_check: no candidates");
  for (const auto& c : candidate_errors)
    if (c.size() != n)
      throw std::invalid_argument("reality_check: length mismatch");
  if (n_bootstrap < 199)
    throw std::invalid_argument("reality_check: need B >= 199");

  const std::size_t K = candidate_errors.size();
  // loss differentials: positive when the candidate beats the benchmark
  Mat f(n, K);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t t = 0; t < n; ++t)
      f(t, k) = benchmark_errors[t] * benchmark_errors[t] -
                candidate_errors[k][t] * candidate_errors[k][t];

  RealityCheckResult out;
  const Vec fbar = f.colwise().mean();
  const double root_n = std::sqrt(static_cast<double>(n));
  out.statistic = root_n * fbar.maxCoeff();
  if (f.cwiseAbs().maxCoeff() <= 1e-300) out.degenerate = true;

  Rng rng(seed);
  const double q = 1.0 / mean_block;  // stationary-bootstrap restart prob
  int exceed = 0;
  for (int b = 0; b < n_bootstrap; ++b) {
    Vec sum = Vec::Zero(K);
    std::size_t idx = static_cast<std::size_t>(rng.uniform() * n) % n;
    for (std::size_t t = 0; t < n; ++t) {
      if (t > 0) {
        if (rng.uniform() < q)
          idx = static_cast<std::size_t>(rng.uniform() * n) % n;
        else
          idx = (idx + 1) % n;
      }
      sum += f.row(idx).transpose();
    }
    const double vb =
        root_n * ((sum / static_cast<double>(n)) - fbar).maxCoeff();
    if (vb >= out.statistic) ++exceed;
  }
  out.p_value = (1.0 + exceed) / static_cast<double>(n_bootstrap + 1);
  return out;
}

RegimeR2 regime_conditional_r2(const FitResult& fit, const DatasetT& data,
                               double threshold, int target) {
  const ModelSpec& spec = fit.model.spec;
  const LaggedDesign design = build_design(data, spec);
  if (fit.smoothed.gamma.rows() != design.y.rows())
    throw std::invalid_argument("regime_conditional_r2: sample mismatch");

  RegimeR2 out;
  for (int s = 0; s < spec.M; ++s) {
    const Mat C = fit.model.regimes[s].coef_matrix(spec);
    const Vec fitted = design.z * C.col(target);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index t = 0; t < design.y.rows(); ++t)
      if (fit.smoothed.gamma(t, s) > threshold) idx.push_back(t);
    if (idx.empty())
      throw std::runtime_error("regime_conditional_r2: empty subsample");

    long k = 0;
    const Eigen::Index pred_rows = C.rows() - (spec.intercept ? 1 : 0);
    for (Eigen::Index i = 0; i < pred_rows; ++i)
      if (std::abs(C(i, target)) > 1e-8) ++k;

    double y_mean = 0.0;
    for (Eigen::Index t : idx) y_mean += design.y(t, target);
    y_mean /= static_cast<double>(idx.size());
    double ssr = 0.0, sst = 0.0;
    for (Eigen::Index t : idx) {
      const double e = design.y(t, target) - fitted[t];
      ssr += e * e;
      const double c = design.y(t, target) - y_mean;
      sst += c * c;
    }
    const double n_s = static_cast<double>(idx.size());
    double adj = std::numeric_limits<double>::quiet_NaN();
    if (sst > 0.0 && n_s - k - 1 > 0) {
      const double r2 = 1.0 - ssr / sst;
      adj = 1.0 - (1.0 - r2) * (n_s - 1.0) / (n_s - k - 1.0);
    } else if (ssr == 0.0) {
      adj = 1.0;  // perfect fit
    }
    out.adjusted_r2.push_back(adj);
    out.observations.push_back(static_cast<long>(idx.size()));
    out.predictors.push_back(k);
  }
  return out;
}

}  // namespace msvar
