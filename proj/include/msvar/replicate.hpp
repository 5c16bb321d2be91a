#pragma once

#include "msvar/em.hpp"
#include "msvar/metrics.hpp"

#include <map>
#include <string>
#include <vector>

namespace msvar {

struct ReplicateConfig {
  int experiment = 1;
  int d = 10;
  std::vector<int> t_values = {300};
  int replications = 100;
  bool run_lasso = true;
  bool run_scad = true;
  std::uint64_t master_seed = 1;
  int jobs = 1;
  int burn_in = 200;
  int grid_n = 10;
  double grid_lo = 0.01;
  // <= 0 means automatic: the lag-2 design needs a lower path ceiling so its
  // kappa^2-scaled coefficients survive at the sparse end of the path
  double grid_hi = 0.0;

  double effective_grid_hi() const {
    if (grid_hi > 0.0) return grid_hi;
    return experiment == 3 ? 0.15 : 0.30;
  }
  EmOptions em;
};

struct EstimatorSummary {
  double true_model_included = 0.0;
  double selected_parameters = 0.0;
  double share_nonzero = 0.0;
  RmseMetrics rmse;
  int replications = 0;
  int failures = 0;
};

struct ReplicateOutput {
  ReplicateConfig config;
  // keyed by (estimator name, T)
  std::map<std::pair<std::string, int>, EstimatorSummary> summaries;
  std::vector<std::string> failure_log;

  /// Table-1-shaped CSV: one row per metric, one column per estimator x T.
  std::string table_csv() const;
  std::string provenance() const;
};

ReplicateOutput replicate_experiments(const ReplicateConfig& config);

}  // namespace msvar
