#include "msvar/simulate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace msvar {

namespace {

Mat toeplitz_corr(int d, double rho) {
  Mat s(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s(i, j) = std::pow(rho, std::abs(i - j));
  return s;
}

Mat precision_of(const Mat& sigma) {
  Eigen::LLT<Mat> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("dgp: covariance not positive definite");
  Mat q = llt.solve(Mat::Identity(sigma.rows(), sigma.cols()));
  return 0.5 * (q + q.transpose());
}

Mat block_tridiagonal(int d) {
  Mat a = Mat::Zero(d, d);
  const int half = d / 2;
  for (int b = 0; b < 2; ++b) {
    const int o = b * half;
    for (int i = 0; i < half; ++i) {
      a(o + i, o + i) = 0.5;
      if (i + 1 < half) {
        a(o + i, o + i + 1) = -0.45;
        a(o + i + 1, o + i) = -0.45;
      }
    }
  }
  return a;
}

}  // namespace

MsVarModel dgp_matrices(int experiment, int d) {
  if (experiment < 1 || experiment > 3)
    throw std::invalid_argument("dgp: experiment must be 1, 2, or 3");
  if (d < 1 || (experiment > 1 && (d < 2 || d % 2 != 0)))
    throw std::invalid_argument("dgp: unsupported (experiment, d)");

  MsVarModel m;
  m.spec = ModelSpec{2, experiment == 3 ? 2 : 1, 0, d, 0, false};
  m.regimes.resize(2);
  m.trans = Mat(2, 2);
  m.trans << 0.8, 0.2, 0.2, 0.8;
  m.init = Vec::Constant(2, 0.5);

  if (experiment == 1) {
    m.regimes[0].A = {Mat::Identity(d, d) * 0.8};
    m.regimes[1].A = {Mat::Identity(d, d) * -0.8};
    m.regimes[0].Q = Mat::Identity(d, d);
    m.regimes[1].Q = Mat::Identity(d, d);
    return m;
  }

  const Mat a1 = block_tridiagonal(d);
  if (experiment == 2) {
    m.regimes[0].A = {a1};
    m.regimes[1].A = {-a1};
    m.regimes[0].Q = precision_of(toeplitz_corr(d, 0.7));
    m.regimes[1].Q = precision_of(toeplitz_corr(d, 0.4));
    return m;
  }

  const Mat a2 = a1.array().square().matrix();
  m.regimes[0].A = {a1, a2};
  m.regimes[1].A = {-a1, -a2};
  m.regimes[0].Q = Mat::Identity(d, d) / 0.8;
  m.regimes[1].Q = Mat::Identity(d, d) / 0.4;
  return m;
}

double companion_radius(const MsVarModel& model) {
  const int d = model.spec.d, p = model.spec.p;
  double radius = 0.0;
  for (const RegimeParams& r : model.regimes) {
    Mat companion = Mat::Zero(p * d, p * d);
    for (int j = 0; j < p; ++j)
      companion.block(0, j * d, d, d) = r.A[j];
    if (p > 1)
      companion.block(d, 0, (p - 1) * d, (p - 1) * d)
          .setIdentity();
    const Eigen::EigenSolver<Mat> eig(companion, false);
    radius = std::max(radius, eig.eigenvalues().cwiseAbs().maxCoeff());
  }
  return radius;
}

MsVarModel dgp(int experiment, int d) {
  MsVarModel m = dgp_matrices(experiment, d);
  const double radius = companion_radius(m);
  if (radius >= 1.0) {
    const double kappa = kStabilizedRadius / radius;
    for (RegimeParams& r : m.regimes) {
      double f = 1.0;
      for (Mat& a : r.A) {
        f *= kappa;
        a *= f;
      }
    }
  }
  return m;
}

std::vector<int> simulate_chain(const Mat& trans, const Vec& init,
                                Eigen::Index T, Rng& rng) {
  const Eigen::Index M = init.size();
  if (trans.rows() != M || trans.cols() != M)
    throw std::invalid_argument("simulate_chain: dimension mismatch");
  std::vector<int> states(static_cast<std::size_t>(T));
  for (Eigen::Index t = 0; t < T; ++t) {
    const double u = rng.uniform();
    double acc = 0.0;
    int next = static_cast<int>(M) - 1;
    for (Eigen::Index s = 0; s < M; ++s) {
      acc += t == 0 ? init[s] : trans(states[t - 1], s);
      if (u <= acc) {
        next = static_cast<int>(s);
        break;
      }
    }
    states[t] = next;
  }
  return states;
}

std::vector<int> simulate_chain(const Mat& trans, const Vec& init,
                                Eigen::Index T, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_chain(trans, init, T, rng);
}

SimOutput simulate_msvar(const MsVarModel& model, Eigen::Index T, int burn_in,
                         std::uint64_t seed, const Mat* x) {
  model.validate();
  const ModelSpec& spec = model.spec;
  const Eigen::Index total = T + burn_in;
  if (spec.dstar > 0) {
    if (!x || x->rows() != total || x->cols() != spec.dstar)
      throw std::invalid_argument(
          "simulate_msvar: exogenous block must have burn_in + T rows");
  }

  std::vector<Mat> chol_sigma(spec.M);
  for (int s = 0; s < spec.M; ++s) {
    const Mat sigma = model.regimes[s].Q.llt().solve(
        Mat::Identity(spec.d, spec.d));
    Eigen::LLT<Mat> llt(0.5 * (sigma + sigma.transpose()));
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("simulate_msvar: implied covariance not PD");
    chol_sigma[s] = llt.matrixL();
  }

  Rng rng(seed);
  const std::vector<int> chain =
      simulate_chain(model.trans, model.init, total, rng);

  Mat y = Mat::Zero(total, spec.d);
  Vec eps(spec.d);
  for (Eigen::Index t = 0; t < total; ++t) {
    const RegimeParams& r = model.regimes[chain[t]];
    Vec mean = Vec::Zero(spec.d);
    for (int j = 1; j <= spec.p; ++j)
      if (t - j >= 0) mean.noalias() += r.A[j - 1] * y.row(t - j).transpose();
    for (int j = 1; j <= spec.q; ++j)
      if (t - j >= 0) mean.noalias() += r.B[j - 1] * x->row(t - j).transpose();
    if (spec.intercept) mean += r.intercept;
    for (int i = 0; i < spec.d; ++i) eps[i] = rng.normal();
    y.row(t) = (mean + chol_sigma[chain[t]] * eps).transpose();
    if (y.row(t).cwiseAbs().maxCoeff() > 1e100)
      throw std::runtime_error(
          "simulate_msvar: explosive draw (|y| > 1e100) with seed " +
          std::to_string(seed));
  }

  SimOutput out;
  out.data.y = y.bottomRows(T);
  if (spec.dstar > 0) out.data.x = x->bottomRows(T);
  out.data.labels.reserve(spec.d);
  for (int i = 0; i < spec.d; ++i)
    out.data.labels.push_back("y" + std::to_string(i + 1));
  for (int i = 0; i < spec.dstar; ++i)
    out.data.xlabels.push_back("x" + std::to_string(i + 1));
  out.states.assign(chain.begin() + burn_in, chain.end());
  return out;
}

}  // namespace msvar
