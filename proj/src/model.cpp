#include "msvar/model.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace msvar {

namespace {

bool all_finite(const Mat& m) { return m.allFinite(); }

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void DatasetT::validate() const {
  require(y.cols() >= 1, "dataset: d must be >= 1");
  require(x.cols() == 0 || x.rows() == y.rows(),
          "dataset: y and x must have equal row counts");
  require(all_finite(y) && (x.size() == 0 || all_finite(x)),
          "dataset: non-finite entries");
}

void ModelSpec::validate() const {
  require(M >= 1, "spec: M >= 1 required");
  require(p >= 1, "spec: p >= 1 required");
  require(q >= 0, "spec: q >= 0 required");
  require(d >= 1, "spec: d >= 1 required");
  require(dstar >= 0, "spec: d* >= 0 required");
  require(dstar > 0 || q == 0, "spec: q must be 0 when d* = 0");
}

long count_params(const ModelSpec& spec) {
  spec.validate();
  const long d = spec.d;
  const long per_state = spec.p * d * d + spec.q * d * spec.dstar +
                         (spec.intercept ? d : 0) + d * (d + 1) / 2;
  return spec.M * per_state + static_cast<long>(spec.M) * spec.M;
}

void RegimeParams::validate(const ModelSpec& spec) const {
  require(static_cast<int>(A.size()) == spec.p, "regime: wrong lag count in A");
  for (const Mat& a : A)
    require(a.rows() == spec.d && a.cols() == spec.d && all_finite(a),
            "regime: bad A matrix");
  require(static_cast<int>(B.size()) == spec.q, "regime: wrong lag count in B");
  for (const Mat& b : B)
    require(b.rows() == spec.d && b.cols() == spec.dstar && all_finite(b),
            "regime: bad B matrix");
  if (spec.intercept)
    require(intercept.size() == spec.d && intercept.allFinite(),
            "regime: bad intercept");
  else
    require(intercept.size() == 0, "regime: unexpected intercept");
  require(Q.rows() == spec.d && Q.cols() == spec.d && all_finite(Q),
          "regime: bad Q shape");
  require((Q - Q.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
          "regime: Q not symmetric within 1e-10");
  Eigen::LLT<Mat> llt(Q);
  require(llt.info() == Eigen::Success, "regime: Q not positive definite");
}

Mat RegimeParams::coef_matrix(const ModelSpec& spec) const {
  Mat C = Mat::Zero(spec.n_regressors(), spec.d);
  for (int j = 0; j < spec.p; ++j)
    C.block(j * spec.d, 0, spec.d, spec.d) = A[j].transpose();
  for (int j = 0; j < spec.q; ++j)
    C.block(spec.p * spec.d + j * spec.dstar, 0, spec.dstar, spec.d) =
        B[j].transpose();
  if (spec.intercept) C.row(C.rows() - 1) = intercept.transpose();
  return C;
}

RegimeParams RegimeParams::from_coef_matrix(const Mat& C, const Mat& Q,
                                            const ModelSpec& spec) {
  RegimeParams r;
  r.A.resize(spec.p);
  for (int j = 0; j < spec.p; ++j)
    r.A[j] = C.block(j * spec.d, 0, spec.d, spec.d).transpose();
  r.B.resize(spec.q);
  for (int j = 0; j < spec.q; ++j)
    r.B[j] = C.block(spec.p * spec.d + j * spec.dstar, 0, spec.dstar, spec.d)
                 .transpose();
  if (spec.intercept) r.intercept = C.row(C.rows() - 1).transpose();
  r.Q = Q;
  return r;
}

void MsVarModel::validate() const {
  spec.validate();
  require(static_cast<int>(regimes.size()) == spec.M,
          "model: regimes.size() != M");
  for (const RegimeParams& r : regimes) r.validate(spec);
  require(trans.rows() == spec.M && trans.cols() == spec.M,
          "model: bad transition shape");
  for (int i = 0; i < spec.M; ++i) {
    require(std::abs(trans.row(i).sum() - 1.0) <= 1e-10,
            "model: transition row does not sum to 1");
    require(trans.row(i).minCoeff() >= -1e-12 &&
                trans.row(i).maxCoeff() <= 1.0 + 1e-12,
            "model: transition entries outside [0,1]");
  }
  require(init.size() == spec.M && std::abs(init.sum() - 1.0) <= 1e-10 &&
              init.minCoeff() >= -1e-12,
          "model: bad initial distribution");
}

namespace {

long a_len(const ModelSpec& s) {
  return static_cast<long>(s.M) * s.p * s.d * s.d;
}
long b_len(const ModelSpec& s) {
  return static_cast<long>(s.M) *
         (s.q * s.d * s.dstar + (s.intercept ? s.d : 0));
}
long qnd_len(const ModelSpec& s) {
  return static_cast<long>(s.M) * s.d * (s.d - 1) / 2;
}
long qd_len(const ModelSpec& s) { return static_cast<long>(s.M) * s.d; }

}  // namespace

Eigen::Index FlatParams::a_end() const { return a_len(spec); }
Eigen::Index FlatParams::b_end() const { return a_len(spec) + b_len(spec); }
Eigen::Index FlatParams::qnd_end() const { return b_end() + qnd_len(spec); }
Eigen::Index FlatParams::qd_end() const { return qnd_end() + qd_len(spec); }
Eigen::Index FlatParams::trans_end() const {
  return qd_end() + static_cast<long>(spec.M) * spec.M;
}
Eigen::Index FlatParams::init_end() const { return trans_end() + spec.M; }

FlatParams::SlotInfo FlatParams::describe(Eigen::Index i) const {
  const int d = spec.d, ds = spec.dstar;
  SlotInfo info{Block::A, -1, -1, 0, 0};
  if (i < a_end()) {
    const long per_state = static_cast<long>(spec.p) * d * d;
    info.state = static_cast<int>(i / per_state);
    long r = i % per_state;
    info.lag = static_cast<int>(r / (d * d));
    r %= d * d;
    // column-major within each A_j(s)
    info.col = static_cast<int>(r / d);
    info.row = static_cast<int>(r % d);
    info.block = Block::A;
    return info;
  }
  if (i < b_end()) {
    long r = i - a_end();
    const long per_state =
        static_cast<long>(spec.q) * d * ds + (spec.intercept ? d : 0);
    info.state = static_cast<int>(r / per_state);
    r %= per_state;
    const long blags = static_cast<long>(spec.q) * d * ds;
    if (r < blags) {
      info.block = Block::B;
      info.lag = static_cast<int>(r / (d * ds));
      r %= d * ds;
      info.col = static_cast<int>(r / d);
      info.row = static_cast<int>(r % d);
    } else {
      info.block = Block::Intercept;
      info.row = static_cast<int>(r - blags);
      info.col = 0;
    }
    return info;
  }
  if (i < qnd_end()) {
    long r = i - b_end();
    const long per_state = static_cast<long>(d) * (d - 1) / 2;
    info.state = static_cast<int>(r / per_state);
    r %= per_state;
    // strict lower triangle enumerated column by column
    int col = 0;
    long offset = 0;
    while (r >= offset + (d - 1 - col)) {
      offset += d - 1 - col;
      ++col;
    }
    info.block = Block::QOffDiag;
    info.col = col;
    info.row = static_cast<int>(col + 1 + (r - offset));
    return info;
  }
  if (i < qd_end()) {
    long r = i - qnd_end();
    info.block = Block::QDiag;
    info.state = static_cast<int>(r / d);
    info.row = info.col = static_cast<int>(r % d);
    return info;
  }
  if (i < trans_end()) {
    long r = i - qd_end();
    info.block = Block::Trans;
    info.row = static_cast<int>(r / spec.M);
    info.col = static_cast<int>(r % spec.M);
    return info;
  }
  info.block = Block::Init;
  info.row = static_cast<int>(i - trans_end());
  info.col = 0;
  return info;
}

bool FlatParams::penalized(Eigen::Index i) const {
  if (i < a_end()) return true;
  if (i < b_end()) return describe(i).block == Block::B;
  return i < qnd_end();
}

FlatParams flatten(const MsVarModel& model) {
  const ModelSpec& s = model.spec;
  FlatParams flat;
  flat.spec = s;
  flat.values.resize(count_params(s) + s.M);
  Eigen::Index k = 0;
  for (int st = 0; st < s.M; ++st)
    for (int j = 0; j < s.p; ++j)
      for (int c = 0; c < s.d; ++c)
        for (int r = 0; r < s.d; ++r)
          flat.values[k++] = model.regimes[st].A[j](r, c);
  for (int st = 0; st < s.M; ++st) {
    for (int j = 0; j < s.q; ++j)
      for (int c = 0; c < s.dstar; ++c)
        for (int r = 0; r < s.d; ++r)
          flat.values[k++] = model.regimes[st].B[j](r, c);
    if (s.intercept)
      for (int r = 0; r < s.d; ++r)
        flat.values[k++] = model.regimes[st].intercept[r];
  }
  for (int st = 0; st < s.M; ++st)
    for (int c = 0; c < s.d; ++c)
      for (int r = c + 1; r < s.d; ++r)
        flat.values[k++] = model.regimes[st].Q(r, c);
  for (int st = 0; st < s.M; ++st)
    for (int r = 0; r < s.d; ++r) flat.values[k++] = model.regimes[st].Q(r, r);
  for (int i = 0; i < s.M; ++i)
    for (int j = 0; j < s.M; ++j) flat.values[k++] = model.trans(i, j);
  for (int i = 0; i < s.M; ++i) flat.values[k++] = model.init[i];
  return flat;
}

MsVarModel unflatten(const FlatParams& flat) {
  const ModelSpec& s = flat.spec;
  if (flat.values.size() != count_params(s) + s.M)
    throw std::invalid_argument("unflatten: length mismatch");
  MsVarModel m;
  m.spec = s;
  m.regimes.resize(s.M);
  Eigen::Index k = 0;
  for (int st = 0; st < s.M; ++st) {
    m.regimes[st].A.assign(s.p, Mat::Zero(s.d, s.d));
    for (int j = 0; j < s.p; ++j)
      for (int c = 0; c < s.d; ++c)
        for (int r = 0; r < s.d; ++r)
          m.regimes[st].A[j](r, c) = flat.values[k++];
  }
  for (int st = 0; st < s.M; ++st) {
    m.regimes[st].B.assign(s.q, Mat::Zero(s.d, s.dstar));
    for (int j = 0; j < s.q; ++j)
      for (int c = 0; c < s.dstar; ++c)
        for (int r = 0; r < s.d; ++r)
          m.regimes[st].B[j](r, c) = flat.values[k++];
    if (s.intercept) {
      m.regimes[st].intercept.resize(s.d);
      for (int r = 0; r < s.d; ++r)
        m.regimes[st].intercept[r] = flat.values[k++];
    }
  }
  for (int st = 0; st < s.M; ++st) m.regimes[st].Q = Mat::Zero(s.d, s.d);
  for (int st = 0; st < s.M; ++st)
    for (int c = 0; c < s.d; ++c)
      for (int r = c + 1; r < s.d; ++r) {
        m.regimes[st].Q(r, c) = flat.values[k];
        m.regimes[st].Q(c, r) = flat.values[k];
        ++k;
      }
  for (int st = 0; st < s.M; ++st)
    for (int r = 0; r < s.d; ++r) m.regimes[st].Q(r, r) = flat.values[k++];
  m.trans.resize(s.M, s.M);
  for (int i = 0; i < s.M; ++i)
    for (int j = 0; j < s.M; ++j) m.trans(i, j) = flat.values[k++];
  m.init.resize(s.M);
  for (int i = 0; i < s.M; ++i) m.init[i] = flat.values[k++];
  return m;
}

Vec residual(const MsVarModel& model, int state, Eigen::Index t,
             const DatasetT& data) {
  const ModelSpec& s = model.spec;
  if (state < 0 || state >= s.M) throw std::out_of_range("residual: state");
  if (t < s.lag() || t >= data.rows()) throw std::out_of_range("residual: t");
  const RegimeParams& r = model.regimes[state];
  Vec omega = data.y.row(t).transpose();
  for (int j = 0; j < s.p; ++j)
    omega.noalias() -= r.A[j] * data.y.row(t - j - 1).transpose();
  for (int j = 0; j < s.q; ++j)
    omega.noalias() -= r.B[j] * data.x.row(t - j - 1).transpose();
  if (s.intercept) omega -= r.intercept;
  return omega;
}

LaggedDesign build_design(const DatasetT& data, const ModelSpec& spec) {
  data.validate();
  spec.validate();
  if (spec.d != data.d() || spec.dstar != data.dstar())
    throw std::invalid_argument("build_design: dimension mismatch");
  const int L = spec.lag();
  const Eigen::Index T = data.rows();
  if (T <= L) throw std::invalid_argument("build_design: sample too short");
  LaggedDesign out;
  out.lag = L;
  const Eigen::Index n = T - L;
  out.y = data.y.bottomRows(n);
  out.z.resize(n, spec.n_regressors());
  for (Eigen::Index t = 0; t < n; ++t) {
    Eigen::Index c = 0;
    for (int j = 1; j <= spec.p; ++j) {
      out.z.row(t).segment(c, spec.d) = data.y.row(L + t - j);
      c += spec.d;
    }
    for (int j = 1; j <= spec.q; ++j) {
      out.z.row(t).segment(c, spec.dstar) = data.x.row(L + t - j);
      c += spec.dstar;
    }
    if (spec.intercept) out.z(t, c) = 1.0;
  }
  return out;
}

}  // namespace msvar
