#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace msvar {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Endogenous block y (T x d) plus optional exogenous block x (T x d*).
/// Rows are time-ordered; the first max(p,q) rows of any model fit act as
/// presample and never enter likelihoods.
struct DatasetT {
  Mat y;
  Mat x;  // 0 columns when there are no exogenous series
  std::vector<std::string> labels;
  std::vector<std::string> xlabels;
  std::vector<std::string> dates;  // optional, parallel to rows when present

  Eigen::Index rows() const { return y.rows(); }
  Eigen::Index d() const { return y.cols(); }
  Eigen::Index dstar() const { return x.cols(); }

  void validate() const;
};

struct ModelSpec {
  int M = 1;        // regime count
  int p = 1;        // endogenous lag order
  int q = 0;        // exogenous lag order
  int d = 1;        // endogenous dimension
  int dstar = 0;    // exogenous dimension
  bool intercept = false;

  int lag() const { return std::max(p, q); }
  int n_regressors() const { return p * d + q * dstar + (intercept ? 1 : 0); }

  void validate() const;
};

/// Total estimable parameter count
///   K_T = M (p d^2 + q d d* + d(d+1)/2) + M^2,
/// with intercept columns counted inside the B block when enabled.
/// The freely estimated initial distribution is not part of K_T.
long count_params(const ModelSpec& spec);

/// Per-state VAR parameters. Q is the precision matrix, the inverse of the
/// innovation covariance.
struct RegimeParams {
  std::vector<Mat> A;       // p matrices, d x d
  std::vector<Mat> B;       // q matrices, d x d*
  Vec intercept;            // size d, or size 0 when disabled
  Mat Q;                    // d x d symmetric positive definite

  void validate(const ModelSpec& spec) const;

  /// Stacked coefficient matrix C (k x d): column j holds equation j's
  /// coefficients on [y lags | x lags | intercept].
  Mat coef_matrix(const ModelSpec& spec) const;
  static RegimeParams from_coef_matrix(const Mat& C, const Mat& Q,
                                       const ModelSpec& spec);
};

struct MsVarModel {
  ModelSpec spec;
  std::vector<RegimeParams> regimes;
  Mat trans;  // M x M row-stochastic
  Vec init;   // length M

  void validate() const;
};

/// Parameter-vector layout: theta_A blocks state by state, then theta_B
/// (intercept column last within each state), then the unique lower-triangle
/// precision off-diagonals Q^ND across states, then the precision diagonals
/// Q^D, then the transition rows, then the initial distribution.
///
/// Length is count_params(spec) + M; the trailing M slots carry the initial
/// distribution, which round-trips with MsVarModel but is not counted in K_T.
struct FlatParams {
  ModelSpec spec;
  Vec values;

  enum class Block { A, B, Intercept, QOffDiag, QDiag, Trans, Init };
  struct SlotInfo {
    Block block;
    int state;  // -1 for Trans/Init
    int lag;    // A/B only, 0-based; -1 otherwise
    int row;
    int col;
  };
  SlotInfo describe(Eigen::Index i) const;

  // Half-open index ranges of each block inside `values`.
  Eigen::Index a_begin() const { return 0; }
  Eigen::Index a_end() const;
  Eigen::Index b_end() const;      // includes intercept slots
  Eigen::Index qnd_end() const;
  Eigen::Index qd_end() const;
  Eigen::Index trans_end() const;
  Eigen::Index init_end() const;

  /// True for slots subject to penalization: A, B (not intercept), Q^ND.
  bool penalized(Eigen::Index i) const;
};

FlatParams flatten(const MsVarModel& model);
MsVarModel unflatten(const FlatParams& flat);

/// One-step residual omega_t = y_t - sum_j A_j(s) y_{t-j} - sum_j B_j(s) x_{t-j}
/// for 0-based time index t >= max(p,q).
Vec residual(const MsVarModel& model, int state, Eigen::Index t,
             const DatasetT& data);

/// Effective sample: responses from t = L..T-1 and the stacked lagged
/// regressor matrix Z with row layout [y_{t-1}, ..., y_{t-p}, x_{t-1}, ...,
/// x_{t-q}, 1].
struct LaggedDesign {
  Mat y;  // (T-L) x d
  Mat z;  // (T-L) x k
  int lag = 0;
};

LaggedDesign build_design(const DatasetT& data, const ModelSpec& spec);

}  // namespace msvar
