#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "msvar/simulate.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace msvar;

TEST_CASE("dgp matrices pin the published designs (1-based indices)") {
  SUBCASE("design 1, d = 10") {
    const MsVarModel m = dgp_matrices(1, 10);
    CHECK(m.regimes[0].A[0](2, 2) == 0.8);
    CHECK(m.regimes[0].A[0](2, 3) == 0.0);
    CHECK(m.regimes[1].A[0](2, 2) == -0.8);
    CHECK(m.trans(0, 0) == 0.8);
    CHECK(m.trans(1, 1) == 0.8);
    CHECK((m.regimes[0].Q - Mat::Identity(10, 10)).cwiseAbs().maxCoeff() ==
          0.0);
  }
  SUBCASE("design 2, d = 10") {
    const MsVarModel m = dgp_matrices(2, 10);
    CHECK(m.regimes[0].A[0](0, 1) == -0.45);
    CHECK(m.regimes[0].A[0](0, 0) == 0.5);
    CHECK(m.regimes[0].A[0](4, 5) == 0.0);  // cross-block entry
    CHECK(m.regimes[1].A[0](0, 1) == 0.45);
    // Sigma(1)[1,3] = 0.7^2
    const Mat sigma1 =
        m.regimes[0].Q.llt().solve(Mat::Identity(10, 10));
    CHECK(sigma1(0, 2) == doctest::Approx(0.49).epsilon(1e-10));
    const Mat sigma2 =
        m.regimes[1].Q.llt().solve(Mat::Identity(10, 10));
    CHECK(sigma2(0, 1) == doctest::Approx(0.4).epsilon(1e-10));
  }
  SUBCASE("design 3, d = 10") {
    const MsVarModel m = dgp_matrices(3, 10);
    CHECK(m.regimes[0].A[1](0, 1) == doctest::Approx(0.2025).epsilon(1e-15));
    CHECK(m.regimes[1].A[1](0, 1) == doctest::Approx(-0.2025).epsilon(1e-15));
    CHECK(m.regimes[0].Q(0, 0) == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(m.regimes[1].Q(0, 0) == doctest::Approx(2.5).epsilon(1e-12));
  }
  SUBCASE("unsupported combinations") {
    CHECK_THROWS(dgp_matrices(4, 10));
    CHECK_THROWS(dgp_matrices(2, 9));
  }
}

TEST_CASE("simulation-ready dgp is stationary with structure preserved") {
  for (int exp = 1; exp <= 3; ++exp) {
    for (int d : {10, 16}) {
      const MsVarModel m = dgp(exp, d);
      CHECK(companion_radius(m) < 1.0);
      const MsVarModel lit = dgp_matrices(exp, d);
      // identical sparsity pattern and proportional entries per lag
      for (int s = 0; s < 2; ++s)
        for (std::size_t j = 0; j < m.regimes[s].A.size(); ++j) {
          const Mat& a = m.regimes[s].A[j];
          const Mat& b = lit.regimes[s].A[j];
          double ratio = 0.0;
          for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
              CHECK((a(r, c) == 0.0) == (b(r, c) == 0.0));
              if (b(r, c) != 0.0) {
                const double q = a(r, c) / b(r, c);
                if (ratio == 0.0) ratio = q;
                CHECK(q == doctest::Approx(ratio).epsilon(1e-12));
                CHECK(q > 0.0);
                CHECK(q <= 1.0);
              }
            }
        }
    }
  }
  // design 1 is already stationary and must come back untouched
  const MsVarModel m1 = dgp(1, 10);
  CHECK(m1.regimes[0].A[0](0, 0) == 0.8);
  // design 3 keeps the squared-coefficient relation after rescaling
  const MsVarModel m3 = dgp(3, 10);
  const double a1 = m3.regimes[0].A[0](0, 1);
  const double a2 = m3.regimes[0].A[1](0, 1);
  CHECK(a2 == doctest::Approx(a1 * a1).epsilon(1e-12));
}

TEST_CASE("simulate_chain") {
  SUBCASE("absorbing identity transition") {
    Vec init(2);
    init << 0.0, 1.0;
    const auto states = simulate_chain(Mat::Identity(2, 2), init, 50, 7ULL);
    for (int s : states) CHECK(s == 1);
  }
  SUBCASE("deterministic two-cycle") {
    Mat trans(2, 2);
    trans << 0.0, 1.0, 1.0, 0.0;
    Vec init(2);
    init << 1.0, 0.0;
    const auto states = simulate_chain(trans, init, 6, 11ULL);
    for (int t = 0; t < 6; ++t) CHECK(states[t] == t % 2);
  }
  SUBCASE("long-run transition frequencies") {
    Mat trans(2, 2);
    trans << 0.8, 0.2, 0.2, 0.8;
    const auto states =
        simulate_chain(trans, Vec::Constant(2, 0.5), 100000, 13ULL);
    long stay = 0, total = 0;
    for (std::size_t t = 1; t < states.size(); ++t) {
      if (states[t - 1] == 0) {
        ++total;
        if (states[t] == 0) ++stay;
      }
    }
    CHECK(std::abs(static_cast<double>(stay) / total - 0.8) < 0.01);
  }
}

TEST_CASE("simulate_msvar") {
  SUBCASE("degenerate noise and zero coefficients give zeros") {
    MsVarModel m;
    m.spec = ModelSpec{1, 1, 0, 2, 0, false};
    m.regimes.resize(1);
    m.regimes[0].A = {Mat::Zero(2, 2)};
    m.regimes[0].Q = Mat::Identity(2, 2) * 1e12;  // vanishing variance
    m.trans = Mat::Ones(1, 1);
    m.init = Vec::Ones(1);
    const SimOutput sim = simulate_msvar(m, 50, 10, 3ULL);
    CHECK(sim.data.y.cwiseAbs().maxCoeff() < 1e-4);
  }

  SUBCASE("AR(1) stationary variance") {
    MsVarModel m;
    m.spec = ModelSpec{1, 1, 0, 1, 0, false};
    m.regimes.resize(1);
    m.regimes[0].A = {Mat::Constant(1, 1, 0.8)};
    m.regimes[0].Q = Mat::Identity(1, 1);
    m.trans = Mat::Ones(1, 1);
    m.init = Vec::Ones(1);
    const SimOutput sim = simulate_msvar(m, 100000, 200, 17ULL);
    const double var =
        (sim.data.y.col(0).array() - sim.data.y.col(0).mean()).square().mean();
    CHECK(std::abs(var - 1.0 / (1.0 - 0.64)) < 0.03 * (1.0 / 0.36));
  }

  SUBCASE("regime occupancy of the symmetric chain") {
    const MsVarModel m = dgp(1, 4);
    const SimOutput sim = simulate_msvar(m, 10000, 200, 23ULL);
    double occ = 0.0;
    for (int s : sim.states) occ += s == 0 ? 1.0 : 0.0;
    occ /= static_cast<double>(sim.states.size());
    CHECK(std::abs(occ - 0.5) < 0.05);
  }

  SUBCASE("same seed gives byte-identical output") {
    const MsVarModel m = dgp(2, 10);
    const SimOutput a = simulate_msvar(m, 200, 200, 99ULL);
    const SimOutput b = simulate_msvar(m, 200, 200, 99ULL);
    CHECK((a.data.y - b.data.y).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.states == b.states);
  }

  SUBCASE("state-conditional innovation covariance converges to Sigma(s)") {
    const MsVarModel m = dgp(2, 4);
    const int T = 100000;
    const SimOutput sim = simulate_msvar(m, T, 200, 31ULL);
    for (int s = 0; s < 2; ++s) {
      Mat acc = Mat::Zero(4, 4);
      long n = 0;
      for (int t = 1; t < T; ++t) {
        if (sim.states[t] != s) continue;
        const Vec eps = sim.data.y.row(t).transpose() -
                        m.regimes[s].A[0] * sim.data.y.row(t - 1).transpose();
        acc += eps * eps.transpose();
        ++n;
      }
      acc /= static_cast<double>(n);
      const Mat sigma = m.regimes[s].Q.llt().solve(Mat::Identity(4, 4));
      CHECK((acc - sigma).norm() / sigma.norm() < 0.05);
    }
  }

  SUBCASE("exogenous block must cover burn-in") {
    MsVarModel m;
    m.spec = ModelSpec{1, 1, 1, 1, 1, false};
    m.regimes.resize(1);
    m.regimes[0].A = {Mat::Constant(1, 1, 0.3)};
    m.regimes[0].B = {Mat::Constant(1, 1, 0.5)};
    m.regimes[0].Q = Mat::Identity(1, 1);
    m.trans = Mat::Ones(1, 1);
    m.init = Vec::Ones(1);
    CHECK_THROWS(simulate_msvar(m, 50, 10, 3ULL));
    Rng rng(4);
    const Mat x = testutil::random_mat(60, 1, rng);
    const SimOutput sim = simulate_msvar(m, 50, 10, 3ULL, &x);
    CHECK(sim.data.x.rows() == 50);
    CHECK(sim.data.x(0, 0) == x(10, 0));
  }
}
