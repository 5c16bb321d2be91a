#pragma once

#include "msvar/em.hpp"

#include <vector>

namespace msvar {

/// Penalty path, strictly positive and sorted descending so path fits can be
/// warm-started from the sparser solution.
struct TuningGrid {
  std::vector<double> lambdas;
  double ratio = 1.0;  // lambda_prec / lambda_coef

  void validate() const;
};

/// n log-spaced values over [lo, hi] times the largest absolute
/// cross-correlation between a lagged regressor and a response column. The
/// upper factor keeps the sparsest path fit inside the basin where
/// truth-scale coefficients survive; the modified BIC is only reliable as a
/// within-basin criterion at these parameter counts.
TuningGrid default_grid(const DatasetT& data, const ModelSpec& spec,
                        int n = 10, double lo = 0.01, double hi = 0.30);

/// Regime-probability-weighted residual sum of squares
///   sum_t sum_m gamma_t(m) ||omega_t(m)||^2.
double pooled_ssr(const MsVarModel& model, const SmoothedState& smoothed,
                  const DatasetT& data);

/// Modified BIC: log(pooled_SSR) + log(K_T) * l * log(T) / T.
double bic_value(double ssr, long k_total, long n_nonzero, long t_rows);

/// Nonzero estimate count over the K_T parameter universe: coefficient
/// blocks, unique precision entries, and transition probabilities (the
/// freely estimated initial distribution is outside K_T).
long count_nonzero_system(const MsVarModel& model, double zero_tol = 1e-8);

double bic(const FitResult& fit, const DatasetT& data);

struct TuneRow {
  double lambda_coef = 0.0;
  double lambda_prec = 0.0;
  long n_nonzero = 0;
  double ssr = 0.0;
  double bic = 0.0;
  double loglik = 0.0;
  double objective = 0.0;
  bool ok = false;
};

struct TuneResult {
  FitResult best;
  std::vector<TuneRow> table;
  int best_index = -1;
  // Populated when SCAD tuning ran: the Lasso stage that produced the
  // LLA initial estimate.
  std::vector<TuneRow> lasso_table;
  int lasso_best_index = -1;

  std::string table_csv() const;
};

TuneResult tune_lasso(const DatasetT& data, const ModelSpec& spec,
                      const TuningGrid& grid, const EmOptions& opts);

/// SCAD stage: every grid point derives LLA weights from the same BIC-best
/// Lasso fit and starts EM from it.
TuneResult tune_scad(const DatasetT& data, const ModelSpec& spec,
                     const TuningGrid& grid, const FitResult& lasso_best,
                     const EmOptions& opts);

TuneResult tune(const DatasetT& data, const ModelSpec& spec,
                PenaltyFamily family, const TuningGrid& grid,
                const EmOptions& opts);

}  // namespace msvar
