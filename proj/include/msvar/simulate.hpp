#pragma once

#include "msvar/model.hpp"
#include "msvar/rng.hpp"

#include <vector>

namespace msvar {

/// Literal matrices of the three Monte Carlo designs, 2 states each,
/// transitions 0.8 on the diagonal, no intercept:
///   1: A1(1) = diag(0.8), A1(2) = -A1(1), identity innovation covariance;
///   2: A1(1) block diagonal with two (d/2)-sized tridiagonal blocks
///      (0.5 diagonal, -0.45 off), A1(2) = -A1(1),
///      Sigma(1)_ij = 0.7^|i-j|, Sigma(2)_ij = 0.4^|i-j|;
///   3: VAR(2) with A1 from design 2, A2(1)_ij = (A1(1)_ij)^2,
///      A2(2) = -A2(1), Sigma(1) = diag(0.8), Sigma(2) = diag(0.4).
MsVarModel dgp_matrices(int experiment, int d);

/// Largest per-state companion spectral radius.
double companion_radius(const MsVarModel& model);

/// Simulation-ready model: dgp_matrices with the lag-j coefficient blocks
/// rescaled by kappa^j whenever the companion radius reaches 1, bringing it
/// to kStabilizedRadius. The rescaling preserves every zero, every sign, and
/// the squared-coefficient relation between lags 1 and 2 of design 3.
/// Designs whose literal matrices are already stable come back untouched.
MsVarModel dgp(int experiment, int d);

inline constexpr double kStabilizedRadius = 0.95;
inline constexpr int kDefaultBurnIn = 200;

std::vector<int> simulate_chain(const Mat& trans, const Vec& init,
                                Eigen::Index T, Rng& rng);
std::vector<int> simulate_chain(const Mat& trans, const Vec& init,
                                Eigen::Index T, std::uint64_t seed);

struct SimOutput {
  DatasetT data;
  std::vector<int> states;  // true regime per output row
};

/// Gaussian MS-VAR path: zero presample, `burn_in` leading draws discarded,
/// deterministic given the seed. Models with exogenous terms need `x` with
/// burn_in + T rows.
SimOutput simulate_msvar(const MsVarModel& model, Eigen::Index T,
                         int burn_in, std::uint64_t seed,
                         const Mat* x = nullptr);

}  // namespace msvar
