#pragma once

#include "msvar/model.hpp"

namespace msvar {

/// Penalized weighted multivariate regression for one state's M-step:
/// minimize over C (k x d)
///   f(C) = (sum gamma)^{-1} sum_t gamma_t (y_t - C'z_t)' Q (y_t - C'z_t)
///          + 2 lambda sum_ij weights_ij |C_ij|.
/// Because Q couples the d equations, each scalar coordinate still has a
/// closed-form soft-threshold update with curvature proportional to
/// q_jj * sum_t gamma_t z_ti^2.
struct WeightedRegressionProblem {
  Mat Y;        // (T-L) x d responses
  Mat Z;        // (T-L) x k stacked lagged regressors
  Vec gamma;    // length (T-L) nonnegative state weights
  Mat Q;        // fixed d x d precision
  Mat weights;  // k x d nonnegative, 0 = unpenalized
  double lambda = 0.0;
  double tol = 1e-9;     // max original-scale coordinate change
  int max_sweeps = 500;

  void validate() const;
};

struct CoefResult {
  Mat C;
  bool converged = false;
  int sweeps = 0;
  double objective = 0.0;
};

/// Cyclic coordinate descent with active-set acceleration after the first
/// two full sweeps. Columns of Z are rescaled internally to unit weighted
/// RMS; penalties and the solution are mapped back exactly.
CoefResult coef_update(const WeightedRegressionProblem& problem,
                       const Mat* warm_C = nullptr);

double coef_objective(const WeightedRegressionProblem& problem, const Mat& C);

/// Max subgradient violation at C; zero at the optimum.
double coef_kkt_violation(const WeightedRegressionProblem& problem,
                          const Mat& C, double zero_tol = 1e-12);

/// Probability-weighted residual outer-product average
///   S_hat = sum_t gamma_t (y_t - C'z_t)(y_t - C'z_t)' / sum_t gamma_t.
Mat weighted_scatter(const Mat& Y, const Mat& Z, const Mat& C,
                     const Vec& gamma);

}  // namespace msvar
