#pragma once

#include "msvar/model.hpp"

namespace msvar {

/// max_Q  log|Q| - tr(S Q) - lambda * sum_{m != n} weights_mn |q_mn|
/// with the diagonal left unpenalized, so the solution satisfies
/// W_mm = S_mm for W = Q^{-1}.
struct GlassoProblem {
  Mat S;            // symmetric PSD
  double lambda = 0.0;
  Mat weights;      // symmetric, zero diagonal; empty means unit weights
  double tol = 1e-9;
  int max_iter = 200;

  void validate() const;
};

struct GlassoResult {
  Mat Q;
  Mat W;  // Q^{-1}
  bool converged = false;
  int iters = 0;
  double objective = 0.0;
};

/// Block coordinate ascent over columns of Q (lasso per column). Each column
/// update maximizes the objective exactly over that row/column pair, so the
/// objective is nondecreasing across updates. Warm-starting from a previous
/// precision matrix carries over the active set between EM iterations.
GlassoResult glasso_solve(const GlassoProblem& problem,
                          const Mat* warm_Q = nullptr);

double glasso_objective(const GlassoProblem& problem, const Mat& Q);

/// Max KKT violation of (Q, Q^{-1}) for the problem; zero at the optimum.
double glasso_kkt_violation(const GlassoProblem& problem, const Mat& Q,
                            double zero_tol = 1e-10);

}  // namespace msvar
