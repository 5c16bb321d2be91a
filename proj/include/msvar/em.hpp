#pragma once

#include "msvar/hmm.hpp"
#include "msvar/model.hpp"
#include "msvar/penalties.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace msvar {

struct EmOptions {
  int max_em_iter = 500;
  double rel_tol = 1e-6;     // relative change of the penalized objective
  int n_restarts = 5;
  std::uint64_t seed = 0;
  double eps_gamma = 1e-8;   // state-collapse floor on sum_t gamma_t(s) / n
  int inner_cycles = 4;      // (Q, C) block passes per state per M-step
  double inner_tol = 1e-8;
  double init_vol_sd = 0.0;  // per-state log-volatility spread of restarts
  std::optional<MsVarModel> warm;  // first chain starts here when set
};

struct FitResult {
  MsVarModel model;
  std::vector<double> objective_trace;  // penalized log-likelihood / T
  bool converged = false;
  bool failed = false;
  std::string failure;
  std::vector<Eigen::Index> support;  // nonzero penalized slots, flat layout
  SmoothedState smoothed;
  double loglik = 0.0;
  double objective = 0.0;
  PenaltyConfig penalty;
  std::uint64_t seed = 0;
  int restarts_used = 0;
};

/// Per-state log densities evaluated on the effective sample, (T-L) x M.
Mat state_logdensities(const MsVarModel& model, const LaggedDesign& design);

/// Penalized objective log L / T - pen(model), with T the dataset row count.
double penalized_objective(const MsVarModel& model, const DatasetT& data,
                           const PenaltyConfig& penalty);

struct TransitionUpdate {
  Mat trans;
  Vec init;
  bool degenerate_row = false;
};

/// Closed-form M-step for the chain: p_ij = sum_t xi_t(i,j) / sum_t gamma_t(i),
/// initial distribution set to the first smoothed row. Rows with vanishing
/// mass fall back to uniform.
TransitionUpdate update_transition(const SmoothedState& smoothed);

/// Penalized EM. Alternates the smoother with per-state graphical-lasso and
/// coefficient updates plus the transition update, keeping the penalized
/// objective nondecreasing. Restarts on state collapse; the best restart by
/// final objective is returned.
FitResult em_fit(const DatasetT& data, const ModelSpec& spec,
                 const PenaltyConfig& penalty, const EmOptions& opts);

FitResult fit_lasso(const DatasetT& data, const ModelSpec& spec,
                    double lambda_coef, double lambda_prec,
                    const EmOptions& opts);

/// Single-stage LLA: derives SCAD weights once from the initial (Lasso)
/// estimate, then runs EM with those fixed weights starting from it.
FitResult fit_scad(const DatasetT& data, const ModelSpec& spec, double lambda,
                   double lambda_prec, const FitResult& initial,
                   const EmOptions& opts);

/// Spread-spectrum initialization: pooled ridge VAR perturbed per state,
/// with a per-state random volatility scale of spread `vol_sd`.
MsVarModel random_init(const LaggedDesign& design, const ModelSpec& spec,
                       std::uint64_t seed, double vol_sd = 0.0);

}  // namespace msvar
