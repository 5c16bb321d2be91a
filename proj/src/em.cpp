#include "msvar/em.hpp"

#include "msvar/glasso.hpp"
#include "msvar/regression.hpp"
#include "msvar/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace msvar {

Mat state_logdensities(const MsVarModel& model, const LaggedDesign& design) {
  const Eigen::Index n = design.y.rows();
  Mat logdens(n, model.spec.M);
  for (int s = 0; s < model.spec.M; ++s) {
    const Mat C = model.regimes[s].coef_matrix(model.spec);
    const Mat E = design.y - design.z * C;
    logdens.col(s) = GaussianLogDensity(model.regimes[s].Q).rows(E);
  }
  return logdens;
}

double penalized_objective(const MsVarModel& model, const DatasetT& data,
                           const PenaltyConfig& penalty) {
  const LaggedDesign design = build_design(data, model.spec);
  const Mat logdens = state_logdensities(model, design);
  const FilterResult f = forward_filter(logdens, model.trans, model.init);
  return f.loglik / static_cast<double>(data.rows()) -
         penalty_value(model, penalty);
}

TransitionUpdate update_transition(const SmoothedState& smoothed) {
  const Eigen::Index M = smoothed.gamma.cols();
  const Eigen::Index n = smoothed.gamma.rows();
  TransitionUpdate out;
  out.init = smoothed.gamma.row(0).transpose();
  out.init /= out.init.sum();
  out.trans = Mat::Zero(M, M);
  if (M == 1) {
    out.trans(0, 0) = 1.0;
    return out;
  }
  Mat num = Mat::Zero(M, M);
  for (const Mat& slice : smoothed.xi) num += slice;
  Vec den = Vec::Zero(M);
  for (Eigen::Index t = 0; t + 1 < n; ++t)
    den += smoothed.gamma.row(t).transpose();
  for (Eigen::Index i = 0; i < M; ++i) {
    if (den[i] > 1e-300 && num.row(i).sum() > 0.0) {
      out.trans.row(i) = num.row(i) / den[i];
      out.trans.row(i) /= out.trans.row(i).sum();  // kill rounding drift
    } else {
      out.trans.row(i).setConstant(1.0 / static_cast<double>(M));
      out.degenerate_row = true;
    }
  }
  return out;
}

MsVarModel random_init(const LaggedDesign& design, const ModelSpec& spec,
                       std::uint64_t seed, double vol_sd) {
  Rng rng(seed);
  const Eigen::Index k = design.z.cols();
  const Eigen::Index n = design.z.rows();

  Mat G = design.z.transpose() * design.z;
  G.diagonal().array() += 1e-3 * G.trace() / static_cast<double>(k);
  const Mat C0 = G.ldlt().solve(design.z.transpose() * design.y);

  const Mat E = design.y - design.z * C0;
  Mat sigma = E.transpose() * E / static_cast<double>(n);
  sigma.diagonal().array() += 1e-6 * (1.0 + sigma.trace() / spec.d);
  const Mat Q0 = sigma.llt().solve(Mat::Identity(spec.d, spec.d));

  // Perturbation scale: the pooled coefficient std, floored at the
  // response/regressor scale ratio. Regime designs whose state coefficients
  // cancel in the pooled fit (A(2) = -A(1)) leave the pooled std near zero,
  // and without the floor every restart would seed the no-dynamics optimum.
  const double sd_y = std::sqrt(design.y.array().square().mean());
  const double sd_z = std::sqrt(
      std::max(design.z.array().square().mean(), 1e-12));
  const double c_sd = std::max(
      std::sqrt((C0.array() - C0.mean()).square().mean()), sd_y / sd_z);

  MsVarModel m;
  m.spec = spec;
  m.regimes.resize(spec.M);
  for (int s = 0; s < spec.M; ++s) {
    Mat Cs = C0;
    for (Eigen::Index i = 0; i < Cs.rows(); ++i)
      for (Eigen::Index j = 0; j < Cs.cols(); ++j)
        Cs(i, j) += 0.25 * c_sd * rng.normal();
    if (spec.intercept) Cs.row(Cs.rows() - 1) = C0.row(C0.rows() - 1);
    // a random volatility scale per state lets variance-switching regimes
    // separate even when the coefficient seeds carry no signal
    const double vol = std::exp(vol_sd * rng.normal());
    m.regimes[s] = RegimeParams::from_coef_matrix(
        Cs, (0.5 * vol) * (Q0 + Q0.transpose()), spec);
  }
  m.trans = Mat::Constant(spec.M, spec.M,
                          spec.M > 1 ? 0.2 / (spec.M - 1) : 1.0);
  m.trans.diagonal().setConstant(spec.M > 1 ? 0.8 : 1.0);
  m.init = Vec::Constant(spec.M, 1.0 / spec.M);
  return m;
}

namespace {

struct ChainOutcome {
  MsVarModel model;
  std::vector<double> trace;
  SmoothedState smoothed;
  bool converged = false;
  bool collapsed = false;
};

ChainOutcome run_chain(const LaggedDesign& design, double t_norm,
                       const ModelSpec& spec, MsVarModel model,
                       const PenaltyConfig& penalty, const EmOptions& opts) {
  ChainOutcome out;
  const Eigen::Index n = design.y.rows();

  Mat logdens = state_logdensities(model, design);
  SmoothedState ss = smooth(logdens, model.trans, model.init);
  double obj = ss.loglik / t_norm - penalty_value(model, penalty);
  out.trace.push_back(obj);

  for (int iter = 0; iter < opts.max_em_iter; ++iter) {
    // state collapse check on current responsibilities
    for (int s = 0; s < spec.M; ++s) {
      if (ss.gamma.col(s).sum() <
          opts.eps_gamma * static_cast<double>(n)) {
        out.collapsed = true;
        out.model = std::move(model);
        out.smoothed = std::move(ss);
        return out;
      }
    }

    const TransitionUpdate tu = update_transition(ss);
    model.trans = tu.trans;
    model.init = tu.init;

    for (int s = 0; s < spec.M; ++s) {
      const Vec gamma_s = ss.gamma.col(s);
      const double g_s = gamma_s.sum();
      const double lambda_eff = t_norm / g_s;
      const Mat rates_c = coef_rates(penalty, spec, s);
      const Mat rates_p = prec_rates(penalty, spec, s);

      Mat C = model.regimes[s].coef_matrix(spec);
      Mat Q = model.regimes[s].Q;
      for (int cycle = 0; cycle < opts.inner_cycles; ++cycle) {
        GlassoProblem gp;
        gp.S = weighted_scatter(design.y, design.z, C, gamma_s);
        gp.lambda = lambda_eff;
        gp.weights = rates_p;
        // truncated budgets: every block pass is monotone, so bounding the
        // per-iteration solver work keeps the EM guarantee while capping the
        // cost of ill-posed corners of the path
        gp.tol = 1e-8;
        gp.max_iter = 60;
        const GlassoResult gr = glasso_solve(gp, &Q);
        const double q_change = (gr.Q - Q).cwiseAbs().maxCoeff();
        Q = gr.Q;

        WeightedRegressionProblem rp;
        rp.Y = design.y;
        rp.Z = design.z;
        rp.gamma = gamma_s;
        rp.Q = Q;
        rp.weights = rates_c;
        rp.lambda = lambda_eff;
        rp.max_sweeps = 300;
        const CoefResult cr = coef_update(rp, &C);
        const double c_change = (cr.C - C).cwiseAbs().maxCoeff();
        C = cr.C;
        if (q_change < opts.inner_tol && c_change < opts.inner_tol) break;
      }
      model.regimes[s] = RegimeParams::from_coef_matrix(C, Q, spec);
    }

    logdens = state_logdensities(model, design);
    ss = smooth(logdens, model.trans, model.init);
    const double new_obj =
        ss.loglik / t_norm - penalty_value(model, penalty);
    out.trace.push_back(new_obj);
    if (std::abs(new_obj - obj) <=
        opts.rel_tol * (std::abs(obj) + 1e-12)) {
      obj = new_obj;
      out.converged = true;
      break;
    }
    obj = new_obj;
  }

  out.model = std::move(model);
  out.smoothed = std::move(ss);
  return out;
}

}  // namespace

FitResult em_fit(const DatasetT& data, const ModelSpec& spec,
                 const PenaltyConfig& penalty, const EmOptions& opts) {
  penalty.validate();
  const LaggedDesign design = build_design(data, spec);
  if (design.y.rows() <= 10)
    throw std::invalid_argument("em_fit: need T > max(p,q) + 10");
  const double t_norm = static_cast<double>(data.rows());

  FitResult best;
  best.failed = true;
  best.penalty = penalty;
  best.seed = opts.seed;
  best.objective = -std::numeric_limits<double>::infinity();
  int collapsed_count = 0;

  // chain list: the warm model when present, then n_restarts random starts
  const bool has_warm = opts.warm.has_value();
  const int restarts =
      (has_warm ? 1 : 0) + std::max(has_warm ? 0 : 1, opts.n_restarts);
  for (int r = 0; r < restarts; ++r) {
    MsVarModel start;
    if (r == 0 && has_warm) {
      start = *opts.warm;
    } else {
      start = random_init(design, spec,
                          derive_seed(opts.seed, r - (has_warm ? 1 : 0)),
                          opts.init_vol_sd);
    }
    ChainOutcome chain;
    try {
      chain = run_chain(design, t_norm, spec, std::move(start), penalty, opts);
    } catch (const std::runtime_error&) {
      ++collapsed_count;  // numerical collapse counts as a failed restart
      continue;
    }
    if (chain.collapsed) {
      ++collapsed_count;
      continue;
    }
    const double obj = chain.trace.back();
    if (best.failed || obj > best.objective) {
      best.failed = false;
      best.model = std::move(chain.model);
      best.objective_trace = std::move(chain.trace);
      best.smoothed = std::move(chain.smoothed);
      best.converged = chain.converged;
      best.objective = obj;
      best.loglik = best.smoothed.loglik;
      best.restarts_used = r + 1;
    }
  }

  if (best.failed) {
    best.failure = "all " + std::to_string(restarts) +
                   " restarts collapsed or diverged (" +
                   std::to_string(collapsed_count) + " collapses)";
    return best;
  }

  const FlatParams flat = flatten(best.model);
  for (Eigen::Index i = 0; i < flat.values.size(); ++i)
    if (flat.penalized(i) && std::abs(flat.values[i]) > 1e-8)
      best.support.push_back(i);
  return best;
}

FitResult fit_lasso(const DatasetT& data, const ModelSpec& spec,
                    double lambda_coef, double lambda_prec,
                    const EmOptions& opts) {
  PenaltyConfig cfg;
  cfg.family = PenaltyFamily::Lasso;
  cfg.lambda_coef = lambda_coef;
  cfg.lambda_prec = lambda_prec;
  return em_fit(data, spec, cfg, opts);
}

FitResult fit_scad(const DatasetT& data, const ModelSpec& spec, double lambda,
                   double lambda_prec, const FitResult& initial,
                   const EmOptions& opts) {
  if (initial.failed)
    throw std::invalid_argument("fit_scad: initial Lasso fit failed");
  const PenaltyConfig cfg =
      lla_config(initial.model, lambda, lambda_prec, initial.penalty.a);
  EmOptions scad_opts = opts;
  scad_opts.warm = initial.model;
  return em_fit(data, spec, cfg, scad_opts);
}

}  // namespace msvar
