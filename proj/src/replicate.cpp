#include "msvar/replicate.hpp"

#include "msvar/csv.hpp"
#include "msvar/parallel.hpp"
#include "msvar/simulate.hpp"
#include "msvar/tuning.hpp"

#include <mutex>
#include <sstream>

namespace msvar {

namespace {

struct RepOutcome {
  bool lasso_ok = false;
  bool scad_ok = false;
  ReplicationReport lasso;
  ReplicationReport scad;
  std::string error;
};

}  // namespace

ReplicateOutput replicate_experiments(const ReplicateConfig& config) {
  ReplicateOutput out;
  out.config = config;
  const MsVarModel truth = dgp(config.experiment, config.d);

  for (const int T : config.t_values) {
    std::vector<RepOutcome> outcomes(config.replications);
    parallel_for(config.replications, config.jobs, [&](long rep) {
      RepOutcome& oc = outcomes[rep];
      const std::uint64_t rep_seed =
          derive_seed(config.master_seed,
                      static_cast<std::uint64_t>(T) * 1000003ULL + rep);
      try {
        const SimOutput sim =
            simulate_msvar(truth, T, config.burn_in, rep_seed);
        const TuningGrid grid = default_grid(
            sim.data, truth.spec, config.grid_n, config.grid_lo,
            config.effective_grid_hi());
        EmOptions opts = config.em;
        opts.seed = derive_seed(rep_seed, 1);

        TuneResult lasso = tune_lasso(sim.data, truth.spec, grid, opts);
        if (config.run_lasso) {
          oc.lasso = evaluate_replication(lasso.best.model, truth);
          oc.lasso_ok = true;
        }
        if (config.run_scad) {
          EmOptions sopts = config.em;
          sopts.seed = derive_seed(rep_seed, 2);
          TuneResult scad =
              tune_scad(sim.data, truth.spec, grid, lasso.best, sopts);
          oc.scad = evaluate_replication(scad.best.model, truth);
          oc.scad_ok = true;
        }
      } catch (const std::exception& e) {
        oc.error = "T=" + std::to_string(T) + " rep=" + std::to_string(rep) +
                   ": " + e.what();
      }
    });

    const auto aggregate = [&](bool scad) {
      EstimatorSummary s;
      std::vector<BlockSquaredError> errors;
      for (const RepOutcome& oc : outcomes) {
        const bool ok = scad ? oc.scad_ok : oc.lasso_ok;
        if (!ok) {
          ++s.failures;
          continue;
        }
        const ReplicationReport& r = scad ? oc.scad : oc.lasso;
        s.true_model_included += r.selection.true_model_included ? 1.0 : 0.0;
        s.selected_parameters +=
            static_cast<double>(r.selection.selected_parameters);
        s.share_nonzero += r.selection.share_nonzero;
        errors.push_back(r.error);
        ++s.replications;
      }
      if (s.replications > 0) {
        s.true_model_included /= s.replications;
        s.selected_parameters /= s.replications;
        s.share_nonzero /= s.replications;
        s.rmse = rmse_metrics(errors);
      }
      return s;
    };

    if (config.run_lasso)
      out.summaries[{"lasso", T}] = aggregate(false);
    if (config.run_scad)
      out.summaries[{"scad", T}] = aggregate(true);
    for (const RepOutcome& oc : outcomes)
      if (!oc.error.empty()) out.failure_log.push_back(oc.error);
  }
  return out;
}

std::string ReplicateOutput::table_csv() const {
  std::ostringstream os;
  os << "metric";
  for (const auto& [key, summary] : summaries)
    os << ',' << key.first << "_T" << key.second;
  os << '\n';
  const auto row = [&](const std::string& name, auto getter) {
    os << name;
    for (const auto& [key, summary] : summaries)
      os << ',' << format_g17(getter(summary));
    os << '\n';
  };
  row("true_model_included",
      [](const EstimatorSummary& s) { return s.true_model_included; });
  row("selected_parameters",
      [](const EstimatorSummary& s) { return s.selected_parameters; });
  row("share_nonzero",
      [](const EstimatorSummary& s) { return s.share_nonzero; });
  row("rmse", [](const EstimatorSummary& s) { return s.rmse.total; });
  row("rmse_var", [](const EstimatorSummary& s) { return s.rmse.var; });
  row("rmse_cov", [](const EstimatorSummary& s) { return s.rmse.cov; });
  row("rmse_p", [](const EstimatorSummary& s) { return s.rmse.prob; });
  os << "completed";
  for (const auto& [key, summary] : summaries)
    os << ',' << summary.replications;
  os << "\nfailures";
  for (const auto& [key, summary] : summaries)
    os << ',' << summary.failures;
  os << '\n';
  return os.str();
}

std::string ReplicateOutput::provenance() const {
  std::ostringstream os;
  os << "schema=msvar-table1-1\n";
  os << "experiment=" << config.experiment << '\n';
  os << "d=" << config.d << '\n';
  os << "t_values=";
  for (std::size_t i = 0; i < config.t_values.size(); ++i)
    os << (i ? "," : "") << config.t_values[i];
  os << '\n';
  os << "replications=" << config.replications << '\n';
  os << "master_seed=" << config.master_seed << '\n';
  os << "burn_in=" << config.burn_in << '\n';
  os << "grid_n=" << config.grid_n << '\n';
  os << "grid_lo=" << format_g17(config.grid_lo) << '\n';
  os << "grid_hi=" << format_g17(config.effective_grid_hi()) << '\n';
  os << "estimators=" << (config.run_lasso ? "lasso " : "")
     << (config.run_scad ? "scad" : "") << '\n';
  os << "em_restarts=" << config.em.n_restarts << '\n';
  os << "em_rel_tol=" << format_g17(config.em.rel_tol) << '\n';
  return os.str();
}

}  // namespace msvar
