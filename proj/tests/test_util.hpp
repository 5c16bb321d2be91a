#pragma once

#include "msvar/model.hpp"
#include "msvar/rng.hpp"

namespace testutil {

using msvar::Mat;
using msvar::Vec;

inline Mat random_mat(Eigen::Index r, Eigen::Index c, msvar::Rng& rng,
                      double scale = 1.0) {
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = scale * rng.normal();
  return m;
}

inline Mat random_spd(Eigen::Index d, msvar::Rng& rng) {
  const Mat a = random_mat(d, d, rng);
  Mat s = a * a.transpose() / static_cast<double>(d);
  s.diagonal().array() += 0.5;
  return s;
}

inline Vec random_simplex(Eigen::Index m, msvar::Rng& rng) {
  Vec v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = 0.05 + rng.uniform();
  return v / v.sum();
}

inline msvar::MsVarModel random_model(const msvar::ModelSpec& spec,
                                      msvar::Rng& rng, double coef_scale = 0.3) {
  msvar::MsVarModel m;
  m.spec = spec;
  m.regimes.resize(spec.M);
  for (int s = 0; s < spec.M; ++s) {
    for (int j = 0; j < spec.p; ++j)
      m.regimes[s].A.push_back(
          random_mat(spec.d, spec.d, rng, coef_scale / (j + 1)));
    for (int j = 0; j < spec.q; ++j)
      m.regimes[s].B.push_back(
          random_mat(spec.d, spec.dstar, rng, coef_scale));
    if (spec.intercept)
      m.regimes[s].intercept = random_mat(spec.d, 1, rng, 0.2).col(0);
    m.regimes[s].Q = random_spd(spec.d, rng);
  }
  m.trans.resize(spec.M, spec.M);
  for (int i = 0; i < spec.M; ++i)
    m.trans.row(i) = random_simplex(spec.M, rng).transpose();
  m.init = random_simplex(spec.M, rng);
  return m;
}

}  // namespace testutil
