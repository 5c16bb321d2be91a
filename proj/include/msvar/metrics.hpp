#pragma once

#include "msvar/model.hpp"

#include <vector>

namespace msvar {

/// Label-switching resolution: the permutation sigma (estimated index per
/// true state) minimizing the summed squared coefficient distance, by
/// exhaustive search over the M! relabelings (M <= 4).
std::vector<int> align_states(const MsVarModel& estimated,
                              const MsVarModel& truth);

/// Relabel regimes so state s becomes old state perm[s]; the transition
/// matrix and initial distribution are permuted consistently.
MsVarModel apply_permutation(const MsVarModel& model,
                             const std::vector<int>& perm);

struct SelectionMetrics {
  bool true_model_included = false;
  long selected_parameters = 0;  // nonzero penalized estimates
  double share_nonzero = 0.0;    // correctly nonzero / truly nonzero
};

/// Support comparison over the penalized slots (coefficients and precision
/// off-diagonals). Inputs must already be aligned.
SelectionMetrics selection_metrics(const MsVarModel& estimated,
                                   const MsVarModel& truth,
                                   double zero_tol = 1e-8);

/// Squared parameter-block distances of one aligned estimate to the truth.
/// The covariance block is measured on the unique entries of Sigma = Q^{-1};
/// the probability block covers the M^2 transition entries. The freely
/// estimated initial distribution is excluded throughout.
struct BlockSquaredError {
  double var = 0.0;    // A and B coefficients (and intercepts when present)
  double cov = 0.0;
  double prob = 0.0;
  double total() const { return var + cov + prob; }
};

BlockSquaredError block_squared_error(const MsVarModel& estimated,
                                      const MsVarModel& truth);

struct RmseMetrics {
  double total = 0.0;
  double var = 0.0;
  double cov = 0.0;
  double prob = 0.0;
};

/// RMSE_x = sqrt(mean over replications of the block's squared distance),
/// dividing by the number of replications actually run.
RmseMetrics rmse_metrics(const std::vector<BlockSquaredError>& replications);

struct ReplicationReport {
  SelectionMetrics selection;
  BlockSquaredError error;
  std::vector<int> alignment;
};

/// Aligns, then evaluates selection and error metrics in one pass.
ReplicationReport evaluate_replication(const MsVarModel& estimated,
                                       const MsVarModel& truth);

}  // namespace msvar
