#include "helpers.hpp"
#include "mkv/enkf.hpp"
#include "mkv/rng.hpp"
#include "mkv/scenarios.hpp"
#include "mkv/solver.hpp"

#include <doctest.h>

using namespace mkv;
using testing::row;
using testing::scalar;
using testing::vec;

namespace {

FactoredMoments gaussian(double m, double c) { return FactoredMoments::from(vec({m}), scalar(c)); }

ProblemSpec zero_cost_spec() {
  ProblemSpec s = ou_diffusion_spec();
  s.start_cov.reset();
  return s;
}

}  // namespace

TEST_CASE("g_bar_kf") {
  const ControlProblem p = testing::linear_problem();
  CHECK(g_bar_kf(p, vec({1}), scalar(2), vec({0}))[0] == doctest::Approx(1.0));
  CHECK(g_bar_kf(p, vec({5}), scalar(0), vec({3}))[0] == 0.0);

  ProblemSpec s = lq_spec();
  s.running_map = [](const Vec&) { return Vec::Constant(1, 3.0); };
  const ControlProblem constant_h(s);
  const Mat x = row({-1, 0.5, 2});
  const RunningCoupling rc = RunningCoupling::from(constant_h, x);
  CHECK(rc.cxh.isZero(0.0));
  CHECK(g_bar_kf(constant_h, vec({0.5}), rc.cxh, rc.mh)[0] == 0.0);
}

TEST_CASE("forward drift") {
  const ControlProblem ou(ou_diffusion_spec());
  const auto std_normal = gaussian(0, 1);
  for (double x : {-3.0, -0.4, 0.0, 1.7}) {
    CHECK(std::abs(forward_drift(ou, vec({x}), std_normal, scalar(0), vec({0}), 0.0)[0]) < 1e-15);
  }

  const ControlProblem lq = testing::linear_problem(-0.5);
  const auto bar = gaussian(0.3, 0.8);
  const Vec x = vec({1.4});
  CHECK(forward_drift(lq, x, bar, scalar(0.6), vec({0.2}), 1.0)[0] ==
        doctest::Approx((lq.drift(x) - g_bar_kf(lq, x, scalar(0.6), vec({0.2})))[0]));

  ProblemSpec s = zero_cost_spec();
  s.drift = [](const Vec& v) { return Vec::Zero(v.size()); };
  const ControlProblem still(s);
  CHECK(forward_drift(still, vec({2}), gaussian(1, 2), scalar(0), vec({0}), 0.0)[0] == doctest::Approx(0.25));
}

TEST_CASE("terminal update") {
  const ControlProblem lq = testing::linear_problem();
  const Ensemble same(Vec::Constant(1, 0.4).replicate(1, 4).eval(), 1.0);
  const Ensemble out = terminal_update(lq, same, CounterRng(3, Stream::terminal));
  CHECK(out.particles() == same.particles());

  // Two particles {1, 3}: C^{xξ} = C^{ξξ} = 2, V = 1; with Ξ = 0 each X moves by −(2/3)X.
  const Ensemble two(row({1, 3}), 1.0);
  const Ensemble upd = terminal_update(lq, two, Mat::Zero(1, 2));
  CHECK(upd.particles()(0, 0) == doctest::Approx(1.0 - 2.0 / 3.0));
  CHECK(upd.particles()(0, 1) == doctest::Approx(3.0 - 2.0));

  // Ensemble with C^{xξ} = C^{ξξ} = 1 around the particle at 2.
  const Ensemble e(row({1, 2, 3}), 1.0);
  CHECK(terminal_update(lq, e, Mat::Zero(1, 3)).particles()(0, 1) == doctest::Approx(1.0));

  // Linear ξ: the mean moves by exactly −K ξ(m̄).
  const Mat x = row({-0.3, 0.9, 2.2, 0.1});
  const auto m = moments(x, 0.0);
  const double k = m.cov(0, 0) / (m.cov(0, 0) + 1.0);
  const auto mu = moments(terminal_update(lq, Ensemble(x, 1.0), Mat::Zero(1, 4)).particles(), 0.0);
  CHECK(mu.mean[0] == doctest::Approx(m.mean[0] - k * m.mean[0]).epsilon(1e-14));
}

TEST_CASE("pendulum terminal update clusters at the origin") {
  const ControlProblem p(pendulum_spec());
  const SolverConfig cfg = find_scenario("pendulum").defaults;
  const ForwardSweep fw = forward_sweep(p, cfg);
  const Ensemble upd = terminal_update(p, fw.terminal, CounterRng(cfg.seed, Stream::terminal));
  const Vec mean = upd.particles().rowwise().mean();
  CHECK(std::abs(mean[0]) < 0.1);
  CHECK(std::abs(mean[1]) < 0.1);
}

TEST_CASE("gain from moments") {
  const auto id = FactoredMoments::from(Vec::Zero(2), Mat::Identity(2, 2));
  const GainPair z = gain_from_moments(id, id);
  CHECK(z.A.isZero(0.0));
  CHECK(z.c.isZero(0.0));

  const GainPair g = gain_from_moments(gaussian(0, 2), gaussian(1, 1));
  CHECK(g.A(0, 0) == doctest::Approx(-0.5));
  CHECK(g.c[0] == doctest::Approx(1.0));

  const auto wide = FactoredMoments::from(Vec::Zero(2), 2.0 * Mat::Identity(2, 2));
  const GainPair neg = gain_from_moments(wide, id);
  CHECK(Eigen::SelfAdjointEigenSolver<Mat>(neg.A).eigenvalues().maxCoeff() < 0.0);

  Mat c1(2, 2), c2(2, 2);
  c1 << 2.0, 0.3, 0.3, 1.0;
  c2 << 0.7, -0.1, -0.1, 0.5;
  const auto a = FactoredMoments::from(vec({0.2, -1}), c1);
  const auto b = FactoredMoments::from(vec({1.5, 0.4}), c2);
  const GainPair ab = gain_from_moments(a, b), ba = gain_from_moments(b, a);
  CHECK((ab.A + ba.A).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((ab.c + ba.c).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(ab.A == ab.A.transpose());
}

TEST_CASE("g_tilde_kf") {
  const ControlProblem ou(ou_diffusion_spec());
  const GainPair g{scalar(-0.8), vec({0.3})};
  CHECK(g_tilde_kf(ou, vec({1.2}), gaussian(0.1, 0.9), g)[0] == 0.0);
  CHECK(g_tilde_kf(ou, vec({1.2}), gaussian(0.1, 0.9), {scalar(0), vec({0})})[0] == 0.0);

  ProblemSpec s = lq_spec();
  s.noise = [](const Vec&) { return Mat::Constant(1, 1, std::sqrt(2.0)); };
  const ControlProblem p(s);
  CHECK(g_tilde_kf(p, vec({1}), gaussian(0, 1), {scalar(-1), vec({0})})[0] == doctest::Approx(0.5));
  const TildeCoupling shared(p, gaussian(0.4, 1.3), {scalar(-0.6), vec({0.2})});
  for (double x : {-1.0, 0.0, 2.5}) {
    CHECK(shared(vec({x}))[0] ==
          doctest::Approx(g_tilde_kf(p, vec({x}), gaussian(0.4, 1.3), {scalar(-0.6), vec({0.2})})[0]).epsilon(1e-14));
  }
}

TEST_CASE("reverse drift") {
  const ControlProblem ou(ou_diffusion_spec());
  const auto n01 = gaussian(0, 1);
  const GainPair zero = gain_from_moments(n01, n01);
  CHECK(reverse_drift(ou, vec({1}), n01, n01, zero, 1.0)[0] == doctest::Approx(-0.5));
  CHECK(std::abs(reverse_drift(ou, vec({1}), n01, n01, zero, 0.0)[0]) < 1e-15);
}

TEST_CASE("reverse OU moments stay at the N(0, 1) fixed point") {
  // Moment ODEs of the ε = 0 reverse flow: the drift is affine, so integrate
  // (m̃, C̃) with the drift's slope and intercept read off at two points.
  const ControlProblem ou(ou_diffusion_spec());
  const auto bar = gaussian(0, 1);
  double m = 0.0, c = 1.0;
  const double dt = 1e-3;
  for (int k = 0; k < 1000; ++k) {
    const auto tilde = gaussian(m, c);
    const GainPair g = gain_from_moments(bar, tilde);
    const double f0 = reverse_drift(ou, vec({0}), bar, tilde, g, 0.0)[0];
    const double slope = reverse_drift(ou, vec({1}), bar, tilde, g, 0.0)[0] - f0;
    m += dt * (f0 + slope * m);
    c += dt * 2 * slope * c;
  }
  CHECK(std::abs(m) < 1e-6);
  CHECK(std::abs(c - 1.0) < 1e-6);
}

TEST_CASE("the g-tilde term contracts the reverse covariance when A < 0") {
  ProblemSpec s = lq_spec();
  s.noise = [](const Vec&) { return Mat::Constant(1, 1, std::sqrt(2.0)); };
  const ControlProblem p(s);
  const Mat x = row({-1.2, -0.3, 0.4, 0.9, 1.6});
  const auto tilde = FactoredMoments::from(moments(x, 0.0));
  const TildeCoupling g(p, tilde, {scalar(-0.7), vec({0.1})});
  const double dt = 1e-3;
  Mat moved = x;
  for (Eigen::Index i = 0; i < x.cols(); ++i) moved.col(i) -= dt * g(Vec(x.col(i)));
  CHECK(moments(moved, 0.0).cov(0, 0) < tilde.cov(0, 0));
}
