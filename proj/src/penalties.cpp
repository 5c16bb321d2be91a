#include "msvar/penalties.hpp"

#include <cmath>
#include <stdexcept>

namespace msvar {

void PenaltyConfig::validate() const {
  if (!(a > 2.0)) throw std::invalid_argument("penalty: a must exceed 2");
  if (lambda_coef < 0.0 || lambda_prec < 0.0)
    throw std::invalid_argument("penalty: negative lambda");
}

double scad_deriv(double x, double lambda, double a) {
  if (x < 0.0) throw std::invalid_argument("scad_deriv: negative magnitude");
  if (!(a > 2.0)) throw std::invalid_argument("scad_deriv: a must exceed 2");
  if (lambda < 0.0) throw std::invalid_argument("scad_deriv: negative lambda");
  if (lambda == 0.0) return 0.0;
  if (x <= lambda) return lambda;
  const double clipped = std::max(a * lambda - x, 0.0);
  return clipped / (a - 1.0);
}

PenaltyConfig lla_config(const MsVarModel& initial, double lambda,
                         double lambda_prec, double a) {
  const ModelSpec& spec = initial.spec;
  PenaltyConfig cfg;
  cfg.family = PenaltyFamily::ScadLla;
  cfg.lambda_coef = lambda;
  cfg.lambda_prec = lambda_prec;
  cfg.a = a;
  cfg.weights_coef.reserve(spec.M);
  cfg.weights_prec.reserve(spec.M);
  for (int s = 0; s < spec.M; ++s) {
    const Mat C = initial.regimes[s].coef_matrix(spec);
    Mat wc(C.rows(), C.cols());
    for (Eigen::Index i = 0; i < C.rows(); ++i)
      for (Eigen::Index j = 0; j < C.cols(); ++j)
        wc(i, j) = scad_deriv(std::abs(C(i, j)), lambda, a);
    if (spec.intercept) wc.row(wc.rows() - 1).setZero();
    cfg.weights_coef.push_back(std::move(wc));

    const Mat& Q = initial.regimes[s].Q;
    Mat wp = Mat::Zero(spec.d, spec.d);
    for (int i = 0; i < spec.d; ++i)
      for (int j = 0; j < spec.d; ++j)
        if (i != j) wp(i, j) = scad_deriv(std::abs(Q(i, j)), lambda_prec, a);
    cfg.weights_prec.push_back(std::move(wp));
  }
  return cfg;
}

Mat coef_rates(const PenaltyConfig& config, const ModelSpec& spec, int s) {
  if (config.family == PenaltyFamily::ScadLla) {
    if (s >= static_cast<int>(config.weights_coef.size()))
      throw std::invalid_argument("coef_rates: missing LLA weights");
    return config.weights_coef[s];
  }
  Mat rates = Mat::Constant(spec.n_regressors(), spec.d, config.lambda_coef);
  if (spec.intercept) rates.row(rates.rows() - 1).setZero();
  return rates;
}

Mat prec_rates(const PenaltyConfig& config, const ModelSpec& spec, int s) {
  if (config.family == PenaltyFamily::ScadLla) {
    if (s >= static_cast<int>(config.weights_prec.size()))
      throw std::invalid_argument("prec_rates: missing LLA weights");
    return config.weights_prec[s];
  }
  Mat rates = Mat::Constant(spec.d, spec.d, config.lambda_prec);
  rates.diagonal().setZero();
  return rates;
}

double penalty_value(const MsVarModel& model, const PenaltyConfig& config) {
  const ModelSpec& spec = model.spec;
  double total = 0.0;
  for (int s = 0; s < spec.M; ++s) {
    const Mat rc = coef_rates(config, spec, s);
    const Mat C = model.regimes[s].coef_matrix(spec);
    total += (rc.array() * C.array().abs()).sum();
    const Mat rp = prec_rates(config, spec, s);
    const Mat& Q = model.regimes[s].Q;
    // each symmetric pair counted once
    for (int c = 0; c < spec.d; ++c)
      for (int r = c + 1; r < spec.d; ++r)
        total += rp(r, c) * std::abs(Q(r, c));
  }
  return total;
}

}  // namespace msvar
