#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "msvar/simulate.hpp"
#include "msvar/tuning.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace msvar;

namespace {

FitResult toy_fit(const DatasetT& data, const ModelSpec& spec, double lam,
                  std::uint64_t seed = 0) {
  EmOptions opts;
  opts.n_restarts = 2;
  opts.seed = seed;
  return fit_lasso(data, spec, lam, lam, opts);
}

}  // namespace

TEST_CASE("pooled_ssr") {
  Rng rng(71);

  SUBCASE("M=1 with unit weights is the classical SSR") {
    ModelSpec spec{1, 1, 0, 2, 0, false};
    const MsVarModel m = dgp(1, 2);
    ModelSpec s1 = m.spec;
    const SimOutput sim = simulate_msvar(m, 60, 50, 3ULL);
    ModelSpec single{1, 1, 0, 2, 0, false};
    MsVarModel one = testutil::random_model(single, rng, 0.2);
    one.trans = Mat::Ones(1, 1);
    one.init = Vec::Ones(1);
    SmoothedState ss;
    ss.gamma = Mat::Ones(59, 1);
    ss.xi.assign(58, Mat::Ones(1, 1));
    const LaggedDesign design = build_design(sim.data, single);
    const Mat E =
        design.y - design.z * one.regimes[0].coef_matrix(single);
    CHECK(pooled_ssr(one, ss, sim.data) ==
          doctest::Approx(E.squaredNorm()).epsilon(1e-12));
    (void)spec;
    (void)s1;
  }

  SUBCASE("zero residuals in every state give zero") {
    ModelSpec spec{2, 1, 0, 1, 0, false};
    MsVarModel m = testutil::random_model(spec, rng, 0.0);
    for (int s = 0; s < 2; ++s) m.regimes[s].A[0].setZero();
    DatasetT data;
    data.y = Mat::Zero(20, 1);
    SmoothedState ss;
    ss.gamma = Mat::Constant(19, 2, 0.5);
    CHECK(pooled_ssr(m, ss, data) == 0.0);
  }

  SUBCASE("random instance matches the naive triple loop") {
    ModelSpec spec{2, 1, 0, 3, 0, false};
    const MsVarModel m = testutil::random_model(spec, rng, 0.2);
    DatasetT data;
    data.y = testutil::random_mat(15, 3, rng);
    SmoothedState ss;
    ss.gamma.resize(14, 2);
    for (int t = 0; t < 14; ++t) {
      const double g = rng.uniform();
      ss.gamma(t, 0) = g;
      ss.gamma(t, 1) = 1.0 - g;
    }
    double naive = 0.0;
    for (int t = 1; t < 15; ++t)
      for (int s = 0; s < 2; ++s) {
        const Vec w = residual(m, s, t, data);
        naive += ss.gamma(t - 1, s) * w.squaredNorm();
      }
    CHECK(pooled_ssr(m, ss, data) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("bic_value") {
  // log(1) = 0 leaves only the complexity term
  CHECK(bic_value(1.0, 314, 40, 300) ==
        doctest::Approx(std::log(314.0) * 40.0 * std::log(300.0) / 300.0)
            .epsilon(1e-15));
  // hand-checked instance
  CHECK(bic_value(12.5, 314, 40, 300) ==
        doctest::Approx(std::log(12.5) +
                        std::log(314.0) * 40.0 * std::log(300.0) / 300.0)
            .epsilon(1e-15));
  CHECK(bic_value(12.5, 314, 40, 300) == doctest::Approx(6.898).epsilon(1e-3));
  // the complexity term shrinks as log(T)/T for fixed SSR and support
  const double b1 = bic_value(12.5, 314, 40, 300);
  const double b2 = bic_value(12.5, 314, 40, 3000);
  CHECK(b2 < b1);
  CHECK(b1 - std::log(12.5) ==
        doctest::Approx((b2 - std::log(12.5)) *
                        (std::log(300.0) / 300.0) /
                        (std::log(3000.0) / 3000.0))
            .epsilon(1e-12));
  CHECK_THROWS(bic_value(0.0, 314, 40, 300));
}

TEST_CASE("count_nonzero_system counts the K_T universe") {
  Rng rng(72);
  ModelSpec spec{2, 1, 0, 2, 0, false};
  MsVarModel m = testutil::random_model(spec, rng);
  for (int s = 0; s < 2; ++s) {
    m.regimes[s].A[0] << 0.5, 0.0, 0.0, 0.0;
    m.regimes[s].Q = Mat::Identity(2, 2);
  }
  m.trans << 0.8, 0.2, 0.3, 0.7;
  m.init << 0.5, 0.5;
  // per state: 1 coefficient + 2 diagonals; plus 4 transition entries
  CHECK(count_nonzero_system(m) == 2 * (1 + 2) + 4);
}

TEST_CASE("tune selects by BIC over the path") {
  const MsVarModel truth = dgp(1, 4);
  const SimOutput sim = simulate_msvar(truth, 200, 200, 55ULL);

  SUBCASE("single-point grid returns that fit") {
    TuningGrid grid;
    grid.lambdas = {0.1};
    EmOptions opts;
    opts.n_restarts = 2;
    const TuneResult r = tune_lasso(sim.data, truth.spec, grid, opts);
    CHECK(r.best_index == 0);
    CHECK(r.table.size() == 1);
    CHECK(r.table[0].ok);
  }

  SUBCASE("absurdly large lambda loses to a moderate one") {
    // the all-zero fit drops every true coefficient and its pooled SSR
    // penalty outweighs the complexity saving at this sample size
    const MsVarModel small = dgp(1, 2);
    const SimOutput longer = simulate_msvar(small, 400, 200, 56ULL);
    TuningGrid grid;
    grid.lambdas = {50.0, 0.1};
    EmOptions opts;
    opts.n_restarts = 4;
    const TuneResult r = tune_lasso(longer.data, small.spec, grid, opts);
    CHECK(r.best_index == 1);
    CHECK(r.table[0].n_nonzero < r.table[1].n_nonzero);
  }

  SUBCASE("bit-for-bit reproducible given the seed") {
    TuningGrid grid = default_grid(sim.data, truth.spec, 4);
    EmOptions opts;
    opts.n_restarts = 2;
    opts.seed = 12345;
    const TuneResult a = tune_lasso(sim.data, truth.spec, grid, opts);
    const TuneResult b = tune_lasso(sim.data, truth.spec, grid, opts);
    CHECK(a.table_csv() == b.table_csv());
    CHECK(a.best_index == b.best_index);
    CHECK((flatten(a.best.model).values - flatten(b.best.model).values)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("default grid is descending and scaled to the data") {
  const MsVarModel truth = dgp(1, 3);
  const SimOutput sim = simulate_msvar(truth, 150, 200, 4ULL);
  const TuningGrid grid = default_grid(sim.data, truth.spec);
  grid.validate();
  CHECK(grid.lambdas.size() == 10);
  CHECK(grid.lambdas.front() / grid.lambdas.back() ==
        doctest::Approx(30.0).epsilon(1e-9));
  // the AR(1)-style data has first-order autocorrelation near 0.8
  CHECK(grid.lambdas.front() > 0.1);
  CHECK(grid.lambdas.front() < 0.3);
}

TEST_CASE("warm path fits do not lose to cold fits (statistical)") {
  int wins = 0, total = 0;
  for (int trial = 0; trial < 6; ++trial) {
    const MsVarModel truth = dgp(1, 3);
    const SimOutput sim = simulate_msvar(truth, 120, 200, 1000 + trial);
    const ModelSpec spec = truth.spec;
    TuningGrid grid = default_grid(sim.data, spec, 5);
    EmOptions opts;
    opts.n_restarts = 2;
    opts.seed = trial;
    const TuneResult path = tune_lasso(sim.data, spec, grid, opts);
    // cold fit at the smallest lambda with a single random restart
    EmOptions cold = opts;
    cold.n_restarts = 1;
    cold.seed = derive_seed(opts.seed, grid.lambdas.size() - 1);
    const FitResult cold_fit = fit_lasso(sim.data, spec, grid.lambdas.back(),
                                          grid.lambdas.back(), cold);
    if (cold_fit.failed) continue;
    ++total;
    if (path.table.back().objective >= cold_fit.objective - 1e-9) ++wins;
  }
  CHECK(total >= 4);
  CHECK(wins * 10 >= total * 9);  // >= 90 percent
}
