#pragma once

#include "msvar/model.hpp"

#include <vector>

namespace msvar {

enum class PenaltyFamily { Lasso, ScadLla };

/// Penalty configuration shared by the EM stages. For the SCAD stage the
/// weight matrices hold p'_lambda(|initial value|) per slot, so the stored
/// weight IS the l1 rate applied to that parameter; for the Lasso stage the
/// rates are the flat lambda_coef / lambda_prec.
struct PenaltyConfig {
  PenaltyFamily family = PenaltyFamily::Lasso;
  double lambda_coef = 0.0;
  double lambda_prec = 0.0;
  double a = 3.7;
  // Per-state LLA weights; coef matrices are k x d in the stacked-regressor
  // layout (intercept row zero), prec matrices d x d symmetric, zero diagonal.
  std::vector<Mat> weights_coef;
  std::vector<Mat> weights_prec;

  void validate() const;
};

/// SCAD derivative p'_lambda(x) = lambda [ 1(x<=lambda)
///   + (a lambda - x)_+ / ((a-1) lambda) 1(x>lambda) ], for x >= 0.
double scad_deriv(double x, double lambda, double a);

/// LLA rates from an initial estimate: coefficient slots get
/// p'_lambda(|value|), precision off-diagonals p'_lambda_prec(|value|);
/// intercepts and diagonals stay unpenalized.
PenaltyConfig lla_config(const MsVarModel& initial, double lambda,
                         double lambda_prec, double a = 3.7);

/// Effective l1 rate matrix for state `s` coefficients (k x d layout).
Mat coef_rates(const PenaltyConfig& config, const ModelSpec& spec, int s);
/// Effective l1 rate matrix for state `s` precision entries (d x d,
/// zero diagonal).
Mat prec_rates(const PenaltyConfig& config, const ModelSpec& spec, int s);

/// Total penalty: sum over states of rate-weighted absolute coefficients
/// plus rate-weighted unique (lower-triangle) precision off-diagonals.
double penalty_value(const MsVarModel& model, const PenaltyConfig& config);

}  // namespace msvar
