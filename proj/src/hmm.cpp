#include "msvar/hmm.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace msvar {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

GaussianLogDensity::GaussianLogDensity(const Mat& Q) {
  Eigen::LLT<Mat> llt(Q);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("gaussian_logdensity: Q not positive definite");
  chol_lower_ = llt.matrixL();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < Q.rows(); ++i)
    log_det += std::log(chol_lower_(i, i));
  // 0.5 log|Q| - (d/2) log 2pi, with log|Q| = 2 sum log diag(L)
  log_det_half_minus_const_ =
      log_det - 0.5 * static_cast<double>(Q.rows()) * kLog2Pi;
}

double GaussianLogDensity::operator()(const Vec& omega) const {
  const Vec v = chol_lower_.transpose() * omega;
  return log_det_half_minus_const_ - 0.5 * v.squaredNorm();
}

Vec GaussianLogDensity::rows(const Mat& omegas) const {
  const Mat v = omegas * chol_lower_;
  return Vec::Constant(omegas.rows(), log_det_half_minus_const_) -
         0.5 * v.rowwise().squaredNorm();
}

double gaussian_logdensity(const Vec& omega, const Mat& Q) {
  return GaussianLogDensity(Q)(omega);
}

FilterResult forward_filter(const Mat& logdens, const Mat& trans,
                            const Vec& init) {
  const Eigen::Index n = logdens.rows();
  const Eigen::Index M = logdens.cols();
  if (trans.rows() != M || trans.cols() != M || init.size() != M)
    throw std::invalid_argument("forward_filter: dimension mismatch");
  if (!logdens.allFinite())
    throw std::invalid_argument("forward_filter: non-finite log densities");

  FilterResult out;
  out.filtered.resize(n, M);
  out.predicted.resize(n, M);
  Vec pred = init;
  for (Eigen::Index t = 0; t < n; ++t) {
    out.predicted.row(t) = pred.transpose();
    const double shift = logdens.row(t).maxCoeff();
    Vec joint(M);
    for (Eigen::Index s = 0; s < M; ++s)
      joint[s] = pred[s] * std::exp(logdens(t, s) - shift);
    const double mass = joint.sum();
    if (!(mass > 0.0))
      throw std::runtime_error("forward_filter: zero predictive mass at t=" +
                               std::to_string(t));
    out.loglik += std::log(mass) + shift;
    out.filtered.row(t) = (joint / mass).transpose();
    if (t + 1 < n) pred = trans.transpose() * out.filtered.row(t).transpose();
  }
  return out;
}

SmoothedState smooth(const Mat& logdens, const Mat& trans, const Vec& init) {
  const Eigen::Index n = logdens.rows();
  const Eigen::Index M = logdens.cols();
  FilterResult f = forward_filter(logdens, trans, init);

  SmoothedState out;
  out.loglik = f.loglik;
  out.gamma.resize(n, M);
  out.xi.assign(n > 1 ? n - 1 : 0, Mat::Zero(M, M));

  // Scaled backward recursion: beta_t(s) = sum_{s'} P(s,s') b_{t+1}(s')
  // beta_{t+1}(s') / c_{t+1}, where b uses the same per-time shift and
  // normalizer as the filter, so gamma = filtered .* beta needs no extra
  // normalization.
  Vec beta = Vec::Ones(M);
  out.gamma.row(n - 1) = f.filtered.row(n - 1);
  for (Eigen::Index t = n - 2; t >= 0; --t) {
    const double shift = logdens.row(t + 1).maxCoeff();
    Vec b(M);
    for (Eigen::Index s = 0; s < M; ++s)
      b[s] = std::exp(logdens(t + 1, s) - shift);
    // normalizer c_{t+1} in shifted units
    const double c = f.predicted.row(t + 1).dot(b.transpose());
    Mat& slice = out.xi[t];
    for (Eigen::Index s = 0; s < M; ++s)
      for (Eigen::Index s2 = 0; s2 < M; ++s2)
        slice(s, s2) =
            f.filtered(t, s) * trans(s, s2) * b[s2] * beta[s2] / c;
    Vec new_beta = Vec::Zero(M);
    for (Eigen::Index s = 0; s < M; ++s)
      new_beta[s] = (trans.row(s).transpose().array() * b.array() *
                     beta.array())
                        .sum() /
                    c;
    beta = new_beta;
    out.gamma.row(t) =
        (f.filtered.row(t).transpose().array() * beta.array()).transpose();
    // guard rounding drift in long chains
    out.gamma.row(t) /= out.gamma.row(t).sum();
  }
  return out;
}

}  // namespace msvar
