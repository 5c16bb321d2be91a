// Command-line surface for the MS-VAR estimation library: simulate the
// Monte Carlo designs, estimate or tune penalized fits on CSV data, rerun
// the replication experiments, and run the expanding-window forecast
// pipeline with its comparison tests.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include "msvar/artifacts.hpp"
#include "msvar/csv.hpp"
#include "msvar/forecast.hpp"
#include "msvar/preprocess.hpp"
#include "msvar/replicate.hpp"
#include "msvar/simulate.hpp"
#include "msvar/tuning.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace {

using namespace msvar;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file " + path);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::size_t b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw UsageError("config line " + std::to_string(lineno) +
                         ": expected key=value");
      auto trim = [](std::string s) {
        const std::size_t x = s.find_first_not_of(" \t\r");
        const std::size_t y = s.find_last_not_of(" \t\r");
        return x == std::string::npos ? std::string()
                                      : s.substr(x, y - x + 1);
      };
      values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
  }

  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }

  void restrict_keys(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_)
      if (!allowed.count(k))
        throw UsageError("unknown config key \"" + k + "\"");
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  long integer(const std::string& key, long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stol(it->second);
    } catch (...) {
      throw UsageError("config key \"" + key + "\" must be an integer");
    }
  }
  double real(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (...) {
      throw UsageError("config key \"" + key + "\" must be numeric");
    }
  }
  bool flag(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "1" || it->second == "true") return true;
    if (it->second == "0" || it->second == "false") return false;
    throw UsageError("config key \"" + key + "\" must be 0/1");
  }

  std::string resolved() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << '=' << v << '\n';
    return os.str();
  }

 private:
  std::map<std::string, std::string> values_;
};

std::filesystem::path prepare_out_dir(const Config& cfg) {
  const std::filesystem::path dir = cfg.str("out_dir", "msvar_out");
  std::filesystem::create_directories(dir);
  write_text_file((dir / "config_resolved.txt").string(), cfg.resolved());
  return dir;
}

DatasetT load_csv(const std::string& path) {
  try {
    return ingest_csv(path);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  if (out.empty()) throw UsageError("expected a comma-separated int list");
  return out;
}

ModelSpec spec_from_config(const Config& cfg, const DatasetT& data) {
  ModelSpec spec;
  spec.M = static_cast<int>(cfg.integer("M", 2));
  spec.p = static_cast<int>(cfg.integer("p", 1));
  spec.q = static_cast<int>(cfg.integer("q", 0));
  spec.intercept = cfg.flag("intercept", true);
  spec.d = static_cast<int>(data.d());
  spec.dstar = static_cast<int>(data.dstar());
  spec.validate();
  return spec;
}

EmOptions em_from_config(const Config& cfg) {
  EmOptions opts;
  opts.n_restarts = static_cast<int>(cfg.integer("restarts", 5));
  opts.max_em_iter = static_cast<int>(cfg.integer("max_em_iter", 500));
  opts.rel_tol = cfg.real("rel_tol", 1e-6);
  opts.seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
  return opts;
}

const std::set<std::string> kCommonKeys = {"out_dir", "seed", "jobs"};

std::set<std::string> with_common(std::set<std::string> keys) {
  keys.insert(kCommonKeys.begin(), kCommonKeys.end());
  return keys;
}

int cmd_simulate(const Config& cfg) {
  cfg.restrict_keys(with_common({"experiment", "d", "T", "burn_in"}));
  const auto dir = prepare_out_dir(cfg);
  const MsVarModel model =
      dgp(static_cast<int>(cfg.integer("experiment", 1)),
          static_cast<int>(cfg.integer("d", 10)));
  const SimOutput sim = simulate_msvar(
      model, cfg.integer("T", 300),
      static_cast<int>(cfg.integer("burn_in", kDefaultBurnIn)),
      static_cast<std::uint64_t>(cfg.integer("seed", 1)));
  write_dataset_csv((dir / "data.csv").string(), sim.data);
  std::ostringstream st;
  st << "state\n";
  for (int s : sim.states) st << s + 1 << '\n';
  write_text_file((dir / "states.csv").string(), st.str());
  std::cout << "wrote " << (dir / "data.csv").string() << " ("
            << sim.data.rows() << " rows)\n";
  return 0;
}

int cmd_estimate(const Config& cfg) {
  cfg.restrict_keys(with_common({"data", "M", "p", "q", "intercept", "family",
                                 "lambda", "lambda_prec", "scad_a", "restarts",
                                 "max_em_iter", "rel_tol"}));
  const auto dir = prepare_out_dir(cfg);
  const std::string path = cfg.str("data", "");
  if (path.empty()) throw UsageError("estimate: data=<csv> is required");
  const DatasetT data = load_csv(path);
  const ModelSpec spec = spec_from_config(cfg, data);
  const EmOptions opts = em_from_config(cfg);
  const double lambda = cfg.real("lambda", 0.1);
  const double lambda_prec = cfg.real("lambda_prec", lambda);
  const std::string family = cfg.str("family", "lasso");

  FitResult fit;
  if (family == "lasso") {
    fit = fit_lasso(data, spec, lambda, lambda_prec, opts);
  } else if (family == "scad") {
    FitResult initial = fit_lasso(data, spec, lambda, lambda_prec, opts);
    if (initial.failed)
      throw std::runtime_error("initial Lasso stage failed: " +
                               initial.failure);
    initial.penalty.a = cfg.real("scad_a", 3.7);
    EmOptions sopts = opts;
    sopts.n_restarts = 0;
    fit = fit_scad(data, spec, lambda, lambda_prec, initial, sopts);
  } else {
    throw UsageError("family must be lasso or scad");
  }
  if (fit.failed) throw std::runtime_error("fit failed: " + fit.failure);

  save_fit((dir / "fit.json").string(), fit);
  std::ostringstream sm;
  sm << "t";
  for (int s = 0; s < spec.M; ++s) sm << ",gamma" << s + 1;
  sm << '\n';
  for (Eigen::Index t = 0; t < fit.smoothed.gamma.rows(); ++t) {
    sm << t + spec.lag() + 1;
    for (int s = 0; s < spec.M; ++s)
      sm << ',' << format_g17(fit.smoothed.gamma(t, s));
    sm << '\n';
  }
  write_text_file((dir / "smoothed.csv").string(), sm.str());
  std::cout << "objective " << fit.objective << ", loglik " << fit.loglik
            << ", nonzero penalized " << fit.support.size() << ", converged "
            << fit.converged << "\n";
  return 0;
}

int cmd_tune(const Config& cfg) {
  cfg.restrict_keys(with_common({"data", "M", "p", "q", "intercept", "family",
                                 "grid_n", "grid_lo", "grid_hi", "ratio",
                                 "restarts", "max_em_iter", "rel_tol"}));
  const auto dir = prepare_out_dir(cfg);
  const std::string path = cfg.str("data", "");
  if (path.empty()) throw UsageError("tune: data=<csv> is required");
  const DatasetT data = load_csv(path);
  const ModelSpec spec = spec_from_config(cfg, data);
  const EmOptions opts = em_from_config(cfg);
  TuningGrid grid =
      default_grid(data, spec, static_cast<int>(cfg.integer("grid_n", 10)),
                   cfg.real("grid_lo", 0.01), cfg.real("grid_hi", 0.30));
  grid.ratio = cfg.real("ratio", 1.0);
  const std::string family = cfg.str("family", "lasso");
  if (family != "lasso" && family != "scad")
    throw UsageError("family must be lasso or scad");
  const PenaltyFamily pf =
      family == "scad" ? PenaltyFamily::ScadLla : PenaltyFamily::Lasso;

  const TuneResult result = tune(data, spec, pf, grid, opts);
  write_text_file((dir / "bic_table.csv").string(), result.table_csv());
  save_fit((dir / "fit.json").string(), result.best);
  std::cout << "selected lambda "
            << result.table[result.best_index].lambda_coef << " (bic "
            << result.table[result.best_index].bic << ")\n";
  return 0;
}

int cmd_replicate(const Config& cfg) {
  cfg.restrict_keys(with_common({"experiment", "d", "T", "reps", "estimators",
                                 "burn_in", "grid_n", "grid_lo", "grid_hi",
                                 "restarts", "max_em_iter", "rel_tol"}));
  const auto dir = prepare_out_dir(cfg);
  ReplicateConfig rc;
  rc.experiment = static_cast<int>(cfg.integer("experiment", 1));
  rc.d = static_cast<int>(cfg.integer("d", 10));
  rc.t_values = parse_int_list(cfg.str("T", "300"));
  rc.replications = static_cast<int>(cfg.integer("reps", 100));
  rc.master_seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
  rc.jobs = static_cast<int>(cfg.integer("jobs", 1));
  rc.burn_in = static_cast<int>(cfg.integer("burn_in", kDefaultBurnIn));
  rc.grid_n = static_cast<int>(cfg.integer("grid_n", 10));
  rc.grid_lo = cfg.real("grid_lo", 0.01);
  rc.grid_hi = cfg.real("grid_hi", 0.0);  // 0 = per-design default
  const std::string estimators = cfg.str("estimators", "lasso,scad");
  rc.run_lasso = estimators.find("lasso") != std::string::npos;
  rc.run_scad = estimators.find("scad") != std::string::npos;
  rc.em = em_from_config(cfg);

  const ReplicateOutput out = replicate_experiments(rc);
  write_text_file((dir / "table1.csv").string(), out.table_csv());
  write_text_file((dir / "provenance.txt").string(), out.provenance());
  if (!out.failure_log.empty()) {
    std::ostringstream fl;
    for (const auto& f : out.failure_log) fl << f << '\n';
    write_text_file((dir / "failures.txt").string(), fl.str());
  }
  std::cout << out.table_csv();
  std::cout << "failed replications: " << out.failure_log.size() << "\n";
  return 0;
}

int cmd_forecast(const Config& cfg) {
  cfg.restrict_keys(with_common(
      {"data", "M", "p", "q", "intercept", "family", "preprocess",
       "oos_start", "refit_every", "grid_n", "grid_lo", "grid_hi", "restarts",
       "max_em_iter", "rel_tol", "rc_bootstrap", "rc_block", "target"}));
  const auto dir = prepare_out_dir(cfg);
  const std::string path = cfg.str("data", "");
  if (path.empty()) throw UsageError("forecast: data=<csv> is required");
  DatasetT data = load_csv(path);
  if (cfg.flag("preprocess", true)) data = preprocess_dataset(data);
  const ModelSpec spec = spec_from_config(cfg, data);
  const EmOptions opts = em_from_config(cfg);

  ExpandingOptions fopts;
  fopts.family = cfg.str("family", "scad") == "scad" ? PenaltyFamily::ScadLla
                                                     : PenaltyFamily::Lasso;
  fopts.origin_end = data.rows();
  const double oos = cfg.real("oos_start", 0.8);
  fopts.origin_begin =
      oos < 1.0 ? static_cast<Eigen::Index>(oos * data.rows())
                : static_cast<Eigen::Index>(oos);
  fopts.refit_every = static_cast<int>(cfg.integer("refit_every", 1));
  fopts.target = static_cast<int>(cfg.integer("target", 0));
  fopts.grid_n = static_cast<int>(cfg.integer("grid_n", 10));
  fopts.grid_lo = cfg.real("grid_lo", 0.01);
  fopts.grid_hi = cfg.real("grid_hi", 0.30);

  const ForecastRun msvar_run = expanding_eval(data, spec, fopts, opts);
  const ForecastRun hist = historical_average_run(
      data, fopts.target, fopts.origin_begin, fopts.origin_end);
  const ForecastRun arma = arma11_run(data, fopts.target, fopts.origin_begin,
                                      fopts.origin_end, fopts.refit_every);

  const auto dump = [&](const ForecastRun& run) {
    std::ostringstream os;
    os << "origin,forecast,realized,error\n";
    for (std::size_t i = 0; i < run.origins.size(); ++i)
      os << run.origins[i] << ',' << format_g17(run.forecasts[i]) << ','
         << format_g17(run.realized[i]) << ',' << format_g17(run.errors[i])
         << '\n';
    write_text_file((dir / (run.method + ".csv")).string(), os.str());
  };
  dump(msvar_run);
  dump(hist);
  dump(arma);

  // align baseline errors with the (possibly skipped) model origins
  std::vector<double> he, ae;
  for (std::size_t i = 0, j = 0; i < hist.origins.size(); ++i) {
    if (j < msvar_run.origins.size() &&
        hist.origins[i] == msvar_run.origins[j]) {
      he.push_back(hist.errors[i]);
      ae.push_back(arma.errors[i]);
      ++j;
    }
  }
  const int B = static_cast<int>(cfg.integer("rc_bootstrap", 999));
  const double block = cfg.real("rc_block", 12.0);
  const std::uint64_t seed =
      static_cast<std::uint64_t>(cfg.integer("seed", 1));

  std::ostringstream ts;
  ts << "comparison,msfe_model,msfe_benchmark,dm_p,rc_p\n";
  const auto against = [&](const std::string& name,
                           const std::vector<double>& bench_errors,
                           double bench_msfe) {
    const DmResult dm = dm_test(msvar_run.errors, bench_errors, true);
    const RealityCheckResult rc =
        reality_check(bench_errors, {msvar_run.errors}, B, block, seed);
    ts << name << ',' << format_g17(msvar_run.msfe) << ','
       << format_g17(bench_msfe) << ',' << format_g17(dm.p_value) << ','
       << format_g17(rc.p_value) << '\n';
  };
  against("vs_hist_avg", he, hist.msfe);
  against("vs_arma11", ae, arma.msfe);
  write_text_file((dir / "tests.csv").string(), ts.str());
  std::cout << ts.str();
  std::cout << "msvar msfe " << msvar_run.msfe << ", skipped origins "
            << msvar_run.skipped.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized EM estimation of Markov-switching VARs"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  long seed = -1, jobs = -1;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--seed", seed, "master seed override");
  app.add_option("--jobs", jobs, "worker threads");
  std::vector<std::string> overrides;
  app.add_option("--set", overrides, "extra key=value overrides");

  auto* c_sim = app.add_subcommand("simulate", "draw a Monte Carlo dataset");
  auto* c_est = app.add_subcommand("estimate", "single penalized fit");
  auto* c_tune = app.add_subcommand("tune", "BIC selection over a path");
  auto* c_rep = app.add_subcommand("replicate", "full experiment tables");
  auto* c_fc = app.add_subcommand("forecast", "expanding-window evaluation");
  for (CLI::App* sub : {c_sim, c_est, c_tune, c_rep, c_fc})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    Config cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const std::string& kv : overrides) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw UsageError("--set expects key=value, got " + kv);
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!out_dir.empty()) cfg.set("out_dir", out_dir);
    if (seed >= 0) cfg.set("seed", std::to_string(seed));
    if (jobs >= 0) cfg.set("jobs", std::to_string(jobs));

    if (c_sim->parsed()) return cmd_simulate(cfg);
    if (c_est->parsed()) return cmd_estimate(cfg);
    if (c_tune->parsed()) return cmd_tune(cfg);
    if (c_rep->parsed()) return cmd_replicate(cfg);
    if (c_fc->parsed()) return cmd_forecast(cfg);
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
