#include "msvar/metrics.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace msvar {

namespace {

double coef_distance_sq(const RegimeParams& a, const RegimeParams& b,
                        const ModelSpec& spec) {
  double d2 = 0.0;
  for (int j = 0; j < spec.p; ++j) d2 += (a.A[j] - b.A[j]).squaredNorm();
  for (int j = 0; j < spec.q; ++j) d2 += (a.B[j] - b.B[j]).squaredNorm();
  if (spec.intercept) d2 += (a.intercept - b.intercept).squaredNorm();
  return d2;
}

Mat sigma_of(const Mat& Q) {
  Mat s = Q.llt().solve(Mat::Identity(Q.rows(), Q.cols()));
  return 0.5 * (s + s.transpose());
}

}  // namespace

std::vector<int> align_states(const MsVarModel& estimated,
                              const MsVarModel& truth) {
  const int M = truth.spec.M;
  if (estimated.spec.M != M)
    throw std::invalid_argument("align_states: regime count mismatch");
  if (M > 4) throw std::invalid_argument("align_states: M > 4 unsupported");
  std::vector<int> perm(M), best(M);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int s = 0; s < M; ++s)
      cost += coef_distance_sq(estimated.regimes[perm[s]], truth.regimes[s],
                               truth.spec);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

MsVarModel apply_permutation(const MsVarModel& model,
                             const std::vector<int>& perm) {
  const int M = model.spec.M;
  MsVarModel out;
  out.spec = model.spec;
  out.regimes.resize(M);
  out.trans.resize(M, M);
  out.init.resize(M);
  for (int s = 0; s < M; ++s) {
    out.regimes[s] = model.regimes[perm[s]];
    out.init[s] = model.init[perm[s]];
    for (int s2 = 0; s2 < M; ++s2)
      out.trans(s, s2) = model.trans(perm[s], perm[s2]);
  }
  return out;
}

SelectionMetrics selection_metrics(const MsVarModel& estimated,
                                   const MsVarModel& truth, double zero_tol) {
  const FlatParams fe = flatten(estimated);
  const FlatParams ft = flatten(truth);
  if (fe.values.size() != ft.values.size())
    throw std::invalid_argument("selection_metrics: layout mismatch");
  SelectionMetrics out;
  long truly_nonzero = 0, correctly_nonzero = 0;
  bool included = true;
  for (Eigen::Index i = 0; i < fe.values.size(); ++i) {
    if (!ft.penalized(i)) continue;
    const bool est_nz = std::abs(fe.values[i]) > zero_tol;
    const bool true_nz = std::abs(ft.values[i]) > zero_tol;
    if (est_nz) ++out.selected_parameters;
    if (true_nz) {
      ++truly_nonzero;
      if (est_nz)
        ++correctly_nonzero;
      else
        included = false;
    }
  }
  out.true_model_included = included;
  out.share_nonzero =
      truly_nonzero == 0
          ? 1.0
          : static_cast<double>(correctly_nonzero) / truly_nonzero;
  return out;
}

BlockSquaredError block_squared_error(const MsVarModel& estimated,
                                      const MsVarModel& truth) {
  const ModelSpec& spec = truth.spec;
  BlockSquaredError out;
  for (int s = 0; s < spec.M; ++s)
    out.var += coef_distance_sq(estimated.regimes[s], truth.regimes[s], spec);
  for (int s = 0; s < spec.M; ++s) {
    const Mat se = sigma_of(estimated.regimes[s].Q);
    const Mat st = sigma_of(truth.regimes[s].Q);
    for (int c = 0; c < spec.d; ++c)
      for (int r = c; r < spec.d; ++r) {
        const double diff = se(r, c) - st(r, c);
        out.cov += diff * diff;
      }
  }
  out.prob = (estimated.trans - truth.trans).squaredNorm();
  return out;
}

RmseMetrics rmse_metrics(const std::vector<BlockSquaredError>& replications) {
  if (replications.empty())
    throw std::invalid_argument("rmse_metrics: no replications");
  double var = 0.0, cov = 0.0, prob = 0.0, total = 0.0;
  for (const BlockSquaredError& e : replications) {
    var += e.var;
    cov += e.cov;
    prob += e.prob;
    total += e.total();
  }
  const double n = static_cast<double>(replications.size());
  return RmseMetrics{std::sqrt(total / n), std::sqrt(var / n),
                     std::sqrt(cov / n), std::sqrt(prob / n)};
}

ReplicationReport evaluate_replication(const MsVarModel& estimated,
                                       const MsVarModel& truth) {
  ReplicationReport out;
  out.alignment = align_states(estimated, truth);
  const MsVarModel aligned = apply_permutation(estimated, out.alignment);
  out.selection = selection_metrics(aligned, truth);
  out.error = block_squared_error(aligned, truth);
  return out;
}

}  // namespace msvar
