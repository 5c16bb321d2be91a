#include "msvar/glasso.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace msvar {

namespace {

double soft(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// min_beta 0.5 beta' V beta + g' beta + sum_m rho_m |beta_m|
// by cyclic coordinate descent, warm-started at the incoming beta.
void lasso_cd(const Mat& V, const Vec& g, const Vec& rho, Vec& beta) {
  const Eigen::Index m = beta.size();
  Vec u = V * beta;
  for (int pass = 0; pass < 200; ++pass) {
    double max_delta = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double b = u[i] - V(i, i) * beta[i] + g[i];
      const double next = soft(-b, rho[i]) / V(i, i);
      const double delta = next - beta[i];
      if (delta != 0.0) {
        beta[i] = next;
        u += V.col(i) * delta;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    if (max_delta < 1e-11 * (1.0 + beta.cwiseAbs().maxCoeff())) break;
  }
}

}  // namespace

void GlassoProblem::validate() const {
  if (S.rows() != S.cols()) throw std::invalid_argument("glasso: S not square");
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("glasso: S not symmetric within 1e-10");
  if (lambda < 0.0) throw std::invalid_argument("glasso: negative lambda");
  if (weights.size() != 0) {
    if (weights.rows() != S.rows() || weights.cols() != S.cols())
      throw std::invalid_argument("glasso: weight shape mismatch");
    if (weights.diagonal().cwiseAbs().maxCoeff() > 0.0)
      throw std::invalid_argument("glasso: weights must have zero diagonal");
    if ((weights - weights.transpose()).cwiseAbs().maxCoeff() > 1e-10 ||
        weights.minCoeff() < 0.0)
      throw std::invalid_argument("glasso: weights must be symmetric >= 0");
  }
}

double glasso_objective(const GlassoProblem& problem, const Mat& Q) {
  Eigen::LLT<Mat> llt(Q);
  if (llt.info() != Eigen::Success)
    return -std::numeric_limits<double>::infinity();
  double log_det = 0.0;
  const Mat L = llt.matrixL();
  for (Eigen::Index i = 0; i < Q.rows(); ++i) log_det += std::log(L(i, i));
  log_det *= 2.0;
  double pen = 0.0;
  for (Eigen::Index i = 0; i < Q.rows(); ++i)
    for (Eigen::Index j = 0; j < Q.cols(); ++j)
      if (i != j) {
        const double w =
            problem.weights.size() ? problem.weights(i, j) : 1.0;
        pen += w * std::abs(Q(i, j));
      }
  return log_det - (problem.S * Q).trace() - problem.lambda * pen;
}

GlassoResult glasso_solve(const GlassoProblem& problem, const Mat* warm_Q) {
  problem.validate();
  const Eigen::Index d = problem.S.rows();
  Mat S = problem.S;

  // Rank-deficient scatter matrices get a small diagonal ridge.
  {
    Eigen::LLT<Mat> llt(S);
    if (llt.info() != Eigen::Success || S.diagonal().minCoeff() <= 0.0) {
      const double jitter = 1e-8 * S.trace() / static_cast<double>(d);
      if (!(jitter > 0.0))
        throw std::invalid_argument("glasso: S has nonpositive trace");
      S.diagonal().array() += jitter;
      Eigen::LLT<Mat> retry(S);
      if (retry.info() != Eigen::Success)
        throw std::invalid_argument("glasso: S not positive semidefinite");
    }
  }

  GlassoResult out;
  if (d == 1) {
    out.Q = Mat::Constant(1, 1, 1.0 / S(0, 0));
    out.W = S;
    out.converged = true;
    out.objective = glasso_objective(problem, out.Q);
    return out;
  }
  if (problem.lambda == 0.0) {
    out.Q = S.llt().solve(Mat::Identity(d, d));
    out.Q = 0.5 * (out.Q + out.Q.transpose()).eval();
    out.W = S;
    out.converged = true;
    out.objective = glasso_objective(problem, out.Q);
    return out;
  }

  Mat Q, W;
  bool warmed = false;
  if (warm_Q && warm_Q->rows() == d) {
    Eigen::LLT<Mat> llt(*warm_Q);
    if (llt.info() == Eigen::Success) {
      Q = *warm_Q;
      W = llt.solve(Mat::Identity(d, d));
      warmed = true;
    }
  }
  if (!warmed) {
    Q = Mat::Zero(d, d);
    W = Mat::Zero(d, d);
    Q.diagonal() = S.diagonal().cwiseInverse();
    W.diagonal() = S.diagonal();
  }

  Vec beta(d - 1), s12(d - 1), rho(d - 1), v(d - 1), w12(d - 1);
  Mat Q11inv(d - 1, d - 1);

  for (out.iters = 1; out.iters <= problem.max_iter; ++out.iters) {
    double q_change = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      // gather the partition that excludes index j
      Eigen::Index r = 0;
      for (Eigen::Index i = 0; i < d; ++i) {
        if (i == j) continue;
        s12[r] = S(i, j);
        beta[r] = Q(i, j);
        rho[r] = problem.lambda *
                 (problem.weights.size() ? problem.weights(i, j) : 1.0);
        w12[r] = W(i, j);
        Eigen::Index c = 0;
        for (Eigen::Index i2 = 0; i2 < d; ++i2) {
          if (i2 == j) continue;
          Q11inv(r, c) = W(i, i2);
          ++c;
        }
        ++r;
      }
      const double w22 = W(j, j);
      Q11inv.noalias() -= (w12 * w12.transpose()) / w22;

      const double s22 = S(j, j);
      const Mat V = s22 * Q11inv;
      lasso_cd(V, s12, rho, beta);

      v.noalias() = Q11inv * beta;
      const double q22 = 1.0 / s22 + beta.dot(v);

      // scatter Q and the rank-one refresh of W = Q^{-1}
      r = 0;
      for (Eigen::Index i = 0; i < d; ++i) {
        if (i == j) continue;
        q_change += std::abs(beta[r] - Q(i, j));
        Q(i, j) = beta[r];
        Q(j, i) = beta[r];
        const double wi = -v[r] * s22;
        W(i, j) = wi;
        W(j, i) = wi;
        ++r;
      }
      q_change += std::abs(q22 - Q(j, j));
      Q(j, j) = q22;
      W(j, j) = s22;
      r = 0;
      for (Eigen::Index i = 0; i < d; ++i) {
        if (i == j) continue;
        Eigen::Index c = 0;
        for (Eigen::Index i2 = 0; i2 < d; ++i2) {
          if (i2 == j) continue;
          W(i, i2) = Q11inv(r, c) + v[r] * v[c] * s22;
          ++c;
        }
        ++r;
      }
    }
    q_change /= static_cast<double>(d * d);
    if (q_change < problem.tol * Q.diagonal().cwiseAbs().mean()) {
      out.converged = true;
      break;
    }
  }

  out.Q = 0.5 * (Q + Q.transpose());
  Eigen::LLT<Mat> llt(out.Q);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("glasso: returned precision not PD");
  out.W = llt.solve(Mat::Identity(d, d));
  out.objective = glasso_objective(problem, out.Q);
  return out;
}

double glasso_kkt_violation(const GlassoProblem& problem, const Mat& Q,
                            double zero_tol) {
  Eigen::LLT<Mat> llt(Q);
  if (llt.info() != Eigen::Success)
    return std::numeric_limits<double>::infinity();
  const Eigen::Index d = Q.rows();
  const Mat W = llt.solve(Mat::Identity(d, d));
  double viol = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double g = W(i, j) - problem.S(i, j);
      if (i == j) {
        viol = std::max(viol, std::abs(g));
        continue;
      }
      const double r = problem.lambda *
                       (problem.weights.size() ? problem.weights(i, j) : 1.0);
      if (std::abs(Q(i, j)) > zero_tol)
        viol = std::max(viol, std::abs(g - r * (Q(i, j) > 0 ? 1.0 : -1.0)));
      else
        viol = std::max(viol, std::max(0.0, std::abs(g) - r));
    }
  return viol;
}

}  // namespace msvar
