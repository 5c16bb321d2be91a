#include "msvar/tuning.hpp"

#include "msvar/rng.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace msvar {

void TuningGrid::validate() const {
  if (lambdas.empty()) throw std::invalid_argument("grid: empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0))
      throw std::invalid_argument("grid: lambdas must be positive");
    if (i > 0 && lambdas[i] >= lambdas[i - 1])
      throw std::invalid_argument("grid: lambdas must be strictly descending");
  }
  if (!(ratio > 0.0)) throw std::invalid_argument("grid: ratio must be > 0");
}

TuningGrid default_grid(const DatasetT& data, const ModelSpec& spec, int n,
                        double lo, double hi) {
  const LaggedDesign design = build_design(data, spec);
  const Eigen::Index k = design.z.cols() - (spec.intercept ? 1 : 0);
  double scale = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const Vec zi = design.z.col(i);
    const double zm = zi.mean();
    const double zsd = std::sqrt((zi.array() - zm).square().sum());
    if (!(zsd > 0.0)) continue;
    for (Eigen::Index j = 0; j < design.y.cols(); ++j) {
      const Vec yj = design.y.col(j);
      const double ym = yj.mean();
      const double ysd = std::sqrt((yj.array() - ym).square().sum());
      if (!(ysd > 0.0)) continue;
      const double corr =
          ((zi.array() - zm) * (yj.array() - ym)).sum() / (zsd * ysd);
      scale = std::max(scale, std::abs(corr));
    }
  }
  if (!(scale > 0.0)) scale = 1.0;
  TuningGrid grid;
  grid.lambdas.resize(n);
  const double lhi = std::log(hi * scale), llo = std::log(lo * scale);
  for (int i = 0; i < n; ++i)
    grid.lambdas[i] =
        std::exp(lhi + (llo - lhi) * static_cast<double>(i) /
                           std::max(1, n - 1));
  return grid;
}

double pooled_ssr(const MsVarModel& model, const SmoothedState& smoothed,
                  const DatasetT& data) {
  const LaggedDesign design = build_design(data, model.spec);
  if (smoothed.gamma.rows() != design.y.rows())
    throw std::invalid_argument("pooled_ssr: smoothed sample mismatch");
  double ssr = 0.0;
  for (int s = 0; s < model.spec.M; ++s) {
    const Mat C = model.regimes[s].coef_matrix(model.spec);
    const Mat E = design.y - design.z * C;
    ssr += smoothed.gamma.col(s).dot(E.rowwise().squaredNorm());
  }
  return ssr;
}

double bic_value(double ssr, long k_total, long n_nonzero, long t_rows) {
  if (!(ssr > 0.0))
    throw std::invalid_argument("bic: pooled SSR must be positive");
  const double t = static_cast<double>(t_rows);
  return std::log(ssr) + std::log(static_cast<double>(k_total)) *
                             static_cast<double>(n_nonzero) * std::log(t) / t;
}

long count_nonzero_system(const MsVarModel& model, double zero_tol) {
  const ModelSpec& spec = model.spec;
  long l = 0;
  for (int s = 0; s < spec.M; ++s) {
    const Mat C = model.regimes[s].coef_matrix(spec);
    l += (C.array().abs() > zero_tol).count();
    const Mat& Q = model.regimes[s].Q;
    for (int c = 0; c < spec.d; ++c)
      for (int r = c; r < spec.d; ++r)
        if (std::abs(Q(r, c)) > zero_tol) ++l;
  }
  l += (model.trans.array().abs() > zero_tol).count();
  return l;
}

double bic(const FitResult& fit, const DatasetT& data) {
  const double ssr = pooled_ssr(fit.model, fit.smoothed, data);
  return bic_value(ssr, count_params(fit.model.spec),
                   count_nonzero_system(fit.model), data.rows());
}

std::string TuneResult::table_csv() const {
  std::ostringstream os;
  os << "lambda_coef,lambda_prec,n_nonzero,pooled_ssr,bic,loglik,objective,"
        "converged\n";
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const TuneRow& r : table) {
    os << num(r.lambda_coef) << ',' << num(r.lambda_prec) << ','
       << r.n_nonzero << ',' << num(r.ssr) << ',' << num(r.bic) << ','
       << num(r.loglik) << ',' << num(r.objective) << ',' << (r.ok ? 1 : 0)
       << '\n';
  }
  return os.str();
}

namespace {

template <typename FitFn>
TuneResult tune_path(const DatasetT& data, const TuningGrid& grid,
                     FitFn&& fit_one) {
  grid.validate();
  TuneResult out;
  double best_bic = std::numeric_limits<double>::infinity();
  for (std::size_t gi = 0; gi < grid.lambdas.size(); ++gi) {
    const double lam = grid.lambdas[gi];
    TuneRow row;
    row.lambda_coef = lam;
    row.lambda_prec = lam * grid.ratio;
    FitResult fit = fit_one(gi, lam, lam * grid.ratio);
    if (!fit.failed) {
      row.ok = true;
      row.ssr = pooled_ssr(fit.model, fit.smoothed, data);
      row.n_nonzero = count_nonzero_system(fit.model);
      row.bic = bic_value(row.ssr, count_params(fit.model.spec),
                          row.n_nonzero, data.rows());
      row.loglik = fit.loglik;
      row.objective = fit.objective;
      // strict comparison: ties resolve toward the larger (earlier) lambda
      if (row.bic < best_bic) {
        best_bic = row.bic;
        out.best = fit;
        out.best_index = static_cast<int>(gi);
      }
    }
    out.table.push_back(row);
  }
  if (out.best_index < 0)
    throw std::runtime_error("tune: every penalty level failed to fit");
  return out;
}

}  // namespace

TuneResult tune_lasso(const DatasetT& data, const ModelSpec& spec,
                      const TuningGrid& grid, const EmOptions& opts) {
  std::optional<MsVarModel> warm;
  return tune_path(data, grid,
                   [&](std::size_t gi, double lam, double lam_prec) {
                     EmOptions o = opts;
                     o.seed = derive_seed(opts.seed, gi);
                     if (warm.has_value()) {
                       // warm chain plus one fresh restart per path point
                       o.warm = warm;
                       o.n_restarts = 1;
                     }
                     FitResult fit = fit_lasso(data, spec, lam, lam_prec, o);
                     if (!fit.failed) warm = fit.model;
                     return fit;
                   });
}

TuneResult tune_scad(const DatasetT& data, const ModelSpec& spec,
                     const TuningGrid& grid, const FitResult& lasso_best,
                     const EmOptions& opts) {
  return tune_path(data, grid,
                   [&](std::size_t gi, double lam, double lam_prec) {
                     // pure LLA: the single chain starts at the Lasso optimum
                     EmOptions o = opts;
                     o.seed = derive_seed(opts.seed, 0x5cadULL + gi);
                     o.n_restarts = 0;
                     return fit_scad(data, spec, lam, lam_prec, lasso_best, o);
                   });
}

TuneResult tune(const DatasetT& data, const ModelSpec& spec,
                PenaltyFamily family, const TuningGrid& grid,
                const EmOptions& opts) {
  if (family == PenaltyFamily::Lasso) return tune_lasso(data, spec, grid, opts);
  TuneResult lasso_stage = tune_lasso(data, spec, grid, opts);
  TuneResult out = tune_scad(data, spec, grid, lasso_stage.best, opts);
  out.lasso_table = std::move(lasso_stage.table);
  out.lasso_best_index = lasso_stage.best_index;
  return out;
}

}  // namespace msvar
