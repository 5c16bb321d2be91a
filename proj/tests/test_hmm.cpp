#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "msvar/hmm.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace msvar;

TEST_CASE("gaussian_logdensity closed forms") {
  CHECK(gaussian_logdensity(Vec::Zero(1), Mat::Identity(1, 1)) ==
        doctest::Approx(-0.91893853320467274).epsilon(1e-14));
  CHECK(gaussian_logdensity(Vec::Zero(2), Mat::Identity(2, 2)) ==
        doctest::Approx(-std::log(2.0 * M_PI) * 2.0 / 2.0).epsilon(1e-14));

  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat Q = testutil::random_spd(4, rng);
    const Vec omega = testutil::random_mat(4, 1, rng).col(0);
    CHECK(gaussian_logdensity(omega, Q) ==
          doctest::Approx(oracle::mvn_logpdf_cov(omega, Q)).epsilon(1e-10));
  }

  Mat bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS(gaussian_logdensity(Vec::Zero(2), bad));
}

TEST_CASE("forward_filter degenerate cases") {
  Rng rng(22);

  SUBCASE("M=1 sums the log densities") {
    const Mat logdens = testutil::random_mat(20, 1, rng);
    const FilterResult f =
        forward_filter(logdens, Mat::Ones(1, 1), Vec::Ones(1));
    CHECK(f.loglik == doctest::Approx(logdens.sum()).epsilon(1e-13));
    CHECK(f.filtered.minCoeff() == 1.0);
  }

  SUBCASE("uninformative observations reproduce the chain's predictions") {
    Mat trans(2, 2);
    trans << 0.7, 0.3, 0.4, 0.6;
    Vec init(2);
    init << 0.9, 0.1;
    const Mat logdens = Mat::Constant(6, 2, -1.3);
    const FilterResult f = forward_filter(logdens, trans, init);
    Vec pred = init;
    for (int t = 0; t < 6; ++t) {
      CHECK((f.filtered.row(t).transpose() - pred).cwiseAbs().maxCoeff() <=
            1e-14);
      pred = trans.transpose() * pred;
    }
  }

  SUBCASE("no underflow over long horizons") {
    const int n = 10000;
    Mat logdens = Mat::Constant(n, 2, -700.0);
    logdens.col(1).array() -= 5.0;
    Mat trans(2, 2);
    trans << 0.95, 0.05, 0.05, 0.95;
    const FilterResult f =
        forward_filter(logdens, trans, Vec::Constant(2, 0.5));
    CHECK(std::isfinite(f.loglik));
    CHECK(f.loglik < -700.0 * n + 10.0);
  }
}

TEST_CASE("smoother matches exhaustive path enumeration") {
  Rng rng(23);

  SUBCASE("pinned small case") {
    Mat trans(2, 2);
    trans << 0.8, 0.2, 0.3, 0.7;
    Vec init(2);
    init << 0.6, 0.4;
    const Mat logdens = testutil::random_mat(5, 2, rng);
    const auto ref = oracle::enumerate_paths(logdens, trans, init);
    const FilterResult f = forward_filter(logdens, trans, init);
    CHECK(f.loglik == doctest::Approx(ref.loglik).epsilon(1e-12));
    const SmoothedState ss = smooth(logdens, trans, init);
    CHECK((ss.gamma - ref.gamma).cwiseAbs().maxCoeff() <= 1e-12);
    for (std::size_t t = 0; t < ss.xi.size(); ++t)
      CHECK((ss.xi[t] - ref.xi[t]).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("random instances across M and n") {
    for (int trial = 0; trial < 60; ++trial) {
      const int M = 1 + static_cast<int>(rng.uniform() * 3);
      const int n = 2 + static_cast<int>(rng.uniform() * 6);
      Mat trans(M, M);
      for (int i = 0; i < M; ++i)
        trans.row(i) = testutil::random_simplex(M, rng).transpose();
      const Vec init = testutil::random_simplex(M, rng);
      const Mat logdens = testutil::random_mat(n, M, rng, 2.0);
      const auto ref = oracle::enumerate_paths(logdens, trans, init);
      const SmoothedState ss = smooth(logdens, trans, init);
      CHECK(std::abs(ss.loglik - ref.loglik) <= 1e-10 * (1 + std::abs(ref.loglik)));
      CHECK((ss.gamma - ref.gamma).cwiseAbs().maxCoeff() <= 1e-10);
      for (std::size_t t = 0; t < ss.xi.size(); ++t)
        CHECK((ss.xi[t] - ref.xi[t]).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("smoother structural properties") {
  Rng rng(24);

  SUBCASE("M=1 is all ones") {
    const SmoothedState ss = smooth(testutil::random_mat(8, 1, rng),
                                    Mat::Ones(1, 1), Vec::Ones(1));
    CHECK(ss.gamma.minCoeff() == 1.0);
    for (const Mat& slice : ss.xi) CHECK(slice(0, 0) == doctest::Approx(1.0));
  }

  SUBCASE("absorbing start pins the path") {
    Vec init(2);
    init << 1.0, 0.0;
    const SmoothedState ss = smooth(testutil::random_mat(6, 2, rng),
                                    Mat::Identity(2, 2), init);
    for (int t = 0; t < 6; ++t) CHECK(ss.gamma(t, 0) == doctest::Approx(1.0));
  }

  SUBCASE("row sums, slice sums, and marginalization identities") {
    for (int trial = 0; trial < 25; ++trial) {
      const int M = 2 + static_cast<int>(rng.uniform() * 2);
      const int n = 4 + static_cast<int>(rng.uniform() * 20);
      Mat trans(M, M);
      for (int i = 0; i < M; ++i)
        trans.row(i) = testutil::random_simplex(M, rng).transpose();
      const Vec init = testutil::random_simplex(M, rng);
      const Mat logdens = testutil::random_mat(n, M, rng, 3.0);
      const SmoothedState ss = smooth(logdens, trans, init);
      for (int t = 0; t < n; ++t)
        CHECK(ss.gamma.row(t).sum() == doctest::Approx(1.0).epsilon(1e-8));
      for (int t = 0; t + 1 < n; ++t) {
        CHECK(ss.xi[t].sum() == doctest::Approx(1.0).epsilon(1e-8));
        // xi_t marginalized over the second state reproduces gamma_t
        CHECK((ss.xi[t].rowwise().sum() - ss.gamma.row(t).transpose())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-8);
        CHECK((ss.xi[t].colwise().sum().transpose() -
               ss.gamma.row(t + 1).transpose())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-8);
      }
    }
  }

  SUBCASE("shift invariance in the log densities") {
    Mat trans(2, 2);
    trans << 0.85, 0.15, 0.25, 0.75;
    const Vec init = Vec::Constant(2, 0.5);
    Mat logdens = testutil::random_mat(10, 2, rng);
    const SmoothedState base = smooth(logdens, trans, init);
    Mat shifted = logdens;
    const double c = 3.25;
    shifted.row(4).array() += c;
    const SmoothedState moved = smooth(shifted, trans, init);
    CHECK(moved.loglik - base.loglik == doctest::Approx(c).epsilon(1e-12));
    CHECK((moved.gamma - base.gamma).cwiseAbs().maxCoeff() <= 1e-12);
    for (std::size_t t = 0; t < base.xi.size(); ++t)
      CHECK((moved.xi[t] - base.xi[t]).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
