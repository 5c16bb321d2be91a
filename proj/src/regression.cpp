#include "msvar/regression.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace msvar {

namespace {

double soft(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

void WeightedRegressionProblem::validate() const {
  if (Y.rows() != Z.rows() || gamma.size() != Y.rows())
    throw std::invalid_argument("regression: row mismatch");
  if (!(gamma.sum() > 0.0) || gamma.minCoeff() < 0.0)
    throw std::invalid_argument("regression: weights must be >= 0, sum > 0");
  if (!Z.allFinite() || !Y.allFinite())
    throw std::invalid_argument("regression: non-finite data");
  if (Q.rows() != Y.cols() || Q.cols() != Y.cols())
    throw std::invalid_argument("regression: Q shape mismatch");
  if (weights.rows() != Z.cols() || weights.cols() != Y.cols() ||
      weights.minCoeff() < 0.0)
    throw std::invalid_argument("regression: bad penalty weights");
  if (lambda < 0.0) throw std::invalid_argument("regression: negative lambda");
}

double coef_objective(const WeightedRegressionProblem& problem, const Mat& C) {
  const Mat E = problem.Y - problem.Z * C;
  const double snorm = problem.gamma.sum();
  const double quad =
      ((E * problem.Q).cwiseProduct(E) * Vec::Ones(problem.Y.cols()))
          .dot(problem.gamma) /
      snorm;
  const double pen =
      2.0 * problem.lambda *
      (problem.weights.array() * C.array().abs()).sum();
  return quad + pen;
}

CoefResult coef_update(const WeightedRegressionProblem& problem,
                       const Mat* warm_C) {
  problem.validate();
  const Eigen::Index k = problem.Z.cols();
  const Eigen::Index d = problem.Y.cols();
  const double snorm = problem.gamma.sum();

  // weighted Gram blocks
  const Mat Zw = problem.gamma.asDiagonal() * problem.Z;
  Mat G = problem.Z.transpose() * Zw;
  Mat H = Zw.transpose() * problem.Y;

  // exact internal rescaling of Z columns to unit weighted RMS
  Vec scale(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double s = std::sqrt(G(i, i) / snorm);
    scale[i] = s > 1e-150 ? s : 1.0;
  }
  const Vec inv_scale = scale.cwiseInverse();
  G = inv_scale.asDiagonal() * G * inv_scale.asDiagonal();
  H = inv_scale.asDiagonal() * H;
  const Mat HQ = H * problem.Q;

  Mat C = Mat::Zero(k, d);  // scaled-space coefficients
  if (warm_C && warm_C->rows() == k && warm_C->cols() == d)
    C = scale.asDiagonal() * (*warm_C);
  Mat M1 = G * C;

  const double curv_scale = 2.0 / snorm;
  CoefResult out;
  bool active_phase = false;
  std::vector<char> active(static_cast<std::size_t>(k * d), 1);

  for (out.sweeps = 1; out.sweeps <= problem.max_sweeps; ++out.sweeps) {
    double max_change = 0.0;
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        if (active_phase && !active[static_cast<std::size_t>(i * d + j)])
          continue;
        const double h = curv_scale * G(i, i) * problem.Q(j, j);
        if (!(h > 0.0)) continue;
        const double grad =
            curv_scale * (M1.row(i).dot(problem.Q.col(j)) - HQ(i, j));
        const double rate =
            2.0 * problem.lambda * problem.weights(i, j) * inv_scale[i];
        const double next = soft(C(i, j) - grad / h, rate / h);
        const double delta = next - C(i, j);
        if (delta != 0.0) {
          C(i, j) = next;
          M1.col(j) += delta * G.col(i);
          max_change = std::max(max_change, std::abs(delta) * inv_scale[i]);
        }
      }

    if (max_change < problem.tol) {
      if (!active_phase) {
        out.converged = true;
        break;
      }
      // active set converged; verify with a full sweep
      active_phase = false;
      continue;
    }
    if (out.sweeps >= 2 && !active_phase) {
      for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
          active[static_cast<std::size_t>(i * d + j)] = C(i, j) != 0.0;
      active_phase = true;
    }
  }

  out.C = inv_scale.asDiagonal() * C;
  out.objective = coef_objective(problem, out.C);
  return out;
}

double coef_kkt_violation(const WeightedRegressionProblem& problem,
                          const Mat& C, double zero_tol) {
  const double snorm = problem.gamma.sum();
  const Mat Zw = problem.gamma.asDiagonal() * problem.Z;
  const Mat G = problem.Z.transpose() * Zw;
  const Mat H = Zw.transpose() * problem.Y;
  const Mat grad = (2.0 / snorm) * ((G * C - H) * problem.Q);
  double viol = 0.0;
  for (Eigen::Index i = 0; i < C.rows(); ++i)
    for (Eigen::Index j = 0; j < C.cols(); ++j) {
      const double r = 2.0 * problem.lambda * problem.weights(i, j);
      if (std::abs(C(i, j)) > zero_tol)
        viol = std::max(viol,
                        std::abs(grad(i, j) + r * (C(i, j) > 0 ? 1.0 : -1.0)));
      else
        viol = std::max(viol, std::max(0.0, std::abs(grad(i, j)) - r));
    }
  return viol;
}

Mat weighted_scatter(const Mat& Y, const Mat& Z, const Mat& C,
                     const Vec& gamma) {
  const double snorm = gamma.sum();
  if (!(snorm > 0.0))
    throw std::invalid_argument("weighted_scatter: zero total weight");
  const Mat E = Y - Z * C;
  Mat S = E.transpose() * (gamma.asDiagonal() * E) / snorm;
  return 0.5 * (S + S.transpose());
}

}  // namespace msvar
