#pragma once

#include "msvar/model.hpp"

#include <vector>

namespace msvar {

/// E-step quantities. gamma(t,s) = P(S_t = s | full sample); xi[t](s,s') =
/// P(S_t = s, S_{t+1} = s' | full sample) for consecutive usable times.
/// Rows of gamma and each xi slice sum to one, and marginalizing xi[t] over
/// its second index reproduces gamma row t.
struct SmoothedState {
  Mat gamma;            // (T-L) x M
  std::vector<Mat> xi;  // (T-L-1) slices, each M x M
  double loglik = 0.0;
};

/// log g(y|.) = 0.5 log|Q| - (d/2) log 2pi - 0.5 omega' Q omega.
/// log|Q| comes from the Cholesky factor; a failed factorization signals a
/// solver-state error.
double gaussian_logdensity(const Vec& omega, const Mat& Q);

/// Cholesky-cached evaluator for repeated density calls with one Q.
class GaussianLogDensity {
 public:
  explicit GaussianLogDensity(const Mat& Q);
  double operator()(const Vec& omega) const;
  /// Row-wise evaluation for a residual matrix (rows are omega_t').
  Vec rows(const Mat& omegas) const;

 private:
  Mat chol_lower_;
  double log_det_half_minus_const_ = 0.0;
};

struct FilterResult {
  Mat filtered;   // (T-L) x M, P(S_t = s | data up to t)
  Mat predicted;  // (T-L) x M, P(S_t = s | data up to t-1); row 0 is init
  double loglik = 0.0;
};

/// Rescaled Hamilton filter. Each step normalizes by the per-time predictive
/// mass so nothing underflows even for T ~ 1e4; the log normalizers sum to
/// the conditional log-likelihood.
FilterResult forward_filter(const Mat& logdens, const Mat& trans,
                            const Vec& init);

/// Forward-backward smoother producing gamma, xi, and the log-likelihood.
SmoothedState smooth(const Mat& logdens, const Mat& trans, const Vec& init);

}  // namespace msvar
