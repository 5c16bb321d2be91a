#pragma once

#include "msvar/em.hpp"
#include "msvar/tuning.hpp"

#include <span>
#include <vector>

namespace msvar {

/// One-step-ahead prediction from the end of `history`:
///   y_hat = sum_s P(S_next = s | data) * (VAR mean under state s),
/// with P(S_next = s | data) = sum_s' gamma_last(s') p_{s' -> s}.
Vec one_step_forecast(const MsVarModel& model, const DatasetT& history);

struct ForecastRun {
  std::string method;
  std::vector<Eigen::Index> origins;  // row index being forecast
  std::vector<double> forecasts;      // target variable only
  std::vector<double> realized;
  std::vector<double> errors;         // realized - forecast
  std::vector<Eigen::Index> skipped;  // origins whose fit failed
  double msfe = 0.0;

  void finalize();
};

struct ExpandingOptions {
  PenaltyFamily family = PenaltyFamily::Lasso;
  Eigen::Index origin_begin = 0;  // first row forecast out of sample
  Eigen::Index origin_end = 0;    // one past the last forecast row
  int refit_every = 1;
  int target = 0;  // forecast target column, ordered first per convention
  int grid_n = 10;
  double grid_lo = 0.01;
  double grid_hi = 0.30;
};

/// Expanding-window evaluation. Penalty levels (and SCAD weights) are tuned
/// once on the first window and held fixed; later refits warm-start from the
/// previous model. Origins whose fit fails are skipped and recorded.
ForecastRun expanding_eval(const DatasetT& data, const ModelSpec& spec,
                           const ExpandingOptions& fopts,
                           const EmOptions& em_opts);

/// Expanding-window historical average of the target column.
ForecastRun historical_average_run(const DatasetT& data, int target,
                                   Eigen::Index origin_begin,
                                   Eigen::Index origin_end);

double historical_average(std::span<const double> history);

struct Arma11Forecast {
  double forecast = 0.0;
  bool converged = false;
  bool fallback = false;  // optimizer failed; historical average returned
  double c = 0.0, phi = 0.0, theta = 0.0;
};

/// ARMA(1,1) fitted by conditional sum of squares via Nelder-Mead simplex;
/// needs at least 24 observations.
Arma11Forecast arma11_forecast(std::span<const double> history);

ForecastRun arma11_run(const DatasetT& data, int target,
                       Eigen::Index origin_begin, Eigen::Index origin_end,
                       int refit_every = 1);

struct DmResult {
  double statistic = 0.0;
  double p_value = 0.0;
  bool degenerate = false;
};

/// Diebold-Mariano test on squared-error loss at horizon 1 (lag-0 long-run
/// variance with the n-1 denominator, so the statistic coincides with a
/// plain t-statistic). One-sided alternative: `a` more accurate than `b`.
DmResult dm_test(std::span<const double> errors_a,
                 std::span<const double> errors_b, bool one_sided,
                 bool harvey_correction = false);

struct RealityCheckResult {
  double p_value = 1.0;
  double statistic = 0.0;
  bool degenerate = false;
};

/// White's bootstrap reality check for superior predictive ability of the
/// best candidate over the benchmark, using the stationary bootstrap with
/// the given mean block length.
RealityCheckResult reality_check(std::span<const double> benchmark_errors,
                                 const std::vector<std::vector<double>>&
                                     candidate_errors,
                                 int n_bootstrap = 999,
                                 double mean_block = 12.0,
                                 std::uint64_t seed = 0);

struct RegimeR2 {
  std::vector<double> adjusted_r2;  // per state
  std::vector<long> observations;   // subsample sizes
  std::vector<long> predictors;     // nonzero predictors in the target row
};

/// State-conditional adjusted R^2 of the target equation, splitting the
/// sample at gamma_t(state) > threshold and adjusting degrees of freedom by
/// that state's nonzero predictor count.
RegimeR2 regime_conditional_r2(const FitResult& fit, const DatasetT& data,
                               double threshold = 0.5, int target = 0);

}  // namespace msvar
