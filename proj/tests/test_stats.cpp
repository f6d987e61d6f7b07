#include "helpers.hpp"
#include "mkv/errors.hpp"
#include "mkv/rng.hpp"
#include "mkv/stats.hpp"

#include <doctest.h>

using namespace mkv;
using testing::row;

TEST_CASE("moments") {
  const auto m = moments(Ensemble(row({0, 2}), 0.0), 0.0);
  CHECK(m.mean[0] == 1.0);
  CHECK(m.cov(0, 0) == 2.0);

  const Mat same = Vec::Constant(3, 0.7).replicate(1, 5);
  const auto s = moments(Ensemble(same, 0.0), 1e-4);
  CHECK(s.mean.isApprox(Vec::Constant(3, 0.7)));
  CHECK((s.cov - 1e-4 * Mat::Identity(3, 3)).isZero(1e-18));

  CHECK_THROWS_AS(Ensemble(row({1}), 0.0), InsufficientEnsemble);
  CHECK_THROWS_AS(moments(row({1}), 0.0), InsufficientEnsemble);
}

TEST_CASE("moments of N(0, I) samples") {
  const CounterRng rng(11, Stream::samples);
  Mat x(2, 10000);
  for (Eigen::Index i = 0; i < x.cols(); ++i) rng.normals(0, static_cast<std::uint64_t>(i), x.col(i));
  const auto m = moments(x, 0.0);
  CHECK((m.cov - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("cross covariance") {
  const CounterRng rng(5, Stream::samples);
  Mat x(3, 40);
  for (Eigen::Index i = 0; i < x.cols(); ++i) rng.normals(0, static_cast<std::uint64_t>(i), x.col(i));
  const Ensemble e(x, 0.0);
  CHECK(cross_cov(e, [](const Vec& v) { return v; }) == moments(e, 0.0).cov);
  CHECK(cross_cov(e, [](const Vec&) { return Vec::Constant(2, 3.0); }).isZero(0.0));
  CHECK(cross_cov(Ensemble(row({-1, 1}), 0.0), [](const Vec& v) { return Vec(v.array().square()); })(0, 0) == 0.0);
}

TEST_CASE("moment properties on random ensembles") {
  const CounterRng rng(99, Stream::samples);
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(trial % 4);
    const int m = 2 + static_cast<int>(trial % 7);
    Mat x(d, m);
    for (int i = 0; i < m; ++i) rng.normals(trial, static_cast<std::uint64_t>(i), x.col(i));
    const double delta = 1e-3 * static_cast<double>(trial % 3);
    const auto mo = moments(x, delta);
    CHECK(mo.cov == mo.cov.transpose());
    const Mat raw = mo.cov - delta * Mat::Identity(d, d);
    CHECK(Eigen::SelfAdjointEigenSolver<Mat>(raw).eigenvalues().minCoeff() > -1e-12);

    const Vec shift = Vec::LinSpaced(d, -3.0, 2.0);
    const Mat moved = x.colwise() + shift;
    const auto mv = moments(moved, delta);
    CHECK((mv.mean - mo.mean - shift).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((mv.cov - mo.cov).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((cross_cov(moved, moved) - cross_cov(x, x)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("factored moments") {
  const auto f = FactoredMoments::from(moments(row({0, 2, 4}), 0.0));
  CHECK(f.precision(0, 0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(FactoredMoments::from(Vec::Zero(2), Mat::Zero(2, 2)), std::domain_error);
}
