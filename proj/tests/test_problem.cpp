#include "helpers.hpp"
#include "mkv/problem.hpp"
#include "mkv/scenarios.hpp"

#include <doctest.h>

#include <cmath>

using namespace mkv;
using testing::scalar;
using testing::vec;

TEST_CASE("running cost") {
  const ControlProblem pend(pendulum_spec());
  CHECK(pend.running_cost(vec({0, 1})) == doctest::Approx(5.0).epsilon(1e-14));
  const ControlProblem lq = testing::linear_problem();
  CHECK(lq.running_cost(vec({0})) == 0.0);
  const ControlProblem lang(langevin_spec());
  CHECK(lang.running_cost(vec({0.5})) == doctest::Approx(12.5).epsilon(1e-14));
  CHECK_THROWS_AS(lang.running_cost(vec({0.5, 1.0})), std::invalid_argument);
}

TEST_CASE("terminal cost") {
  const ControlProblem pend(pendulum_spec());
  CHECK(pend.terminal_cost(vec({0.1, 0})) == doctest::Approx(5.0).epsilon(1e-12));
  ProblemSpec s = lq_spec();
  s.terminal_weight = scalar(7.0);
  CHECK(ControlProblem(s).terminal_cost(vec({0})) == 0.0);
  const ControlProblem lang(langevin_spec());
  CHECK(lang.terminal_cost(vec({2})) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(pend.terminal_cost(vec({0.1})), std::invalid_argument);
}

TEST_CASE("running cost is unchanged by h -> 2h, S -> 4S") {
  ProblemSpec s = pendulum_spec();
  const ControlProblem base(s);
  s.running_map = [](const Vec& x) { return Vec(2.0 * x.tail(1)); };
  s.running_weight *= 4.0;
  const ControlProblem scaled(s);
  for (const Vec& x : {vec({0, 1}), vec({1.3, -0.7}), vec({-2, 0.25})}) {
    CHECK(scaled.running_cost(x) == doctest::Approx(base.running_cost(x)).epsilon(1e-14));
  }
}

TEST_CASE("apply_control") {
  const ControlProblem lq = testing::linear_problem();
  const auto zero = AffineControlSchedule::zero(1.0, 10, 1);
  CHECK(apply_control(lq, zero, 0.3, vec({4.0}))[0] == 0.0);

  const ControlProblem pend(pendulum_spec());
  const AffineControlSchedule neg({0.0, 1.0}, {-Mat::Identity(2, 2), -Mat::Identity(2, 2)},
                                  {Vec::Zero(2), Vec::Zero(2)});
  CHECK(apply_control(pend, neg, 0.5, vec({0, 0}))[0] == 0.0);

  ProblemSpec s = lq_spec();
  s.control_weight = scalar(2.0);
  const ControlProblem r2(s);
  const AffineControlSchedule one({0.0, 1.0}, {scalar(-0.5), scalar(-0.5)}, {vec({1}), vec({1})});
  CHECK(apply_control(r2, one, 0.2, vec({3}))[0] == doctest::Approx(-1.0).epsilon(1e-15));

  const AffineControlSchedule doubled({0.0, 1.0}, {scalar(-1.0), scalar(-1.0)}, {vec({2}), vec({2})});
  for (double x : {-2.0, 0.5, 3.0}) {
    CHECK(apply_control(r2, doubled, 0.7, vec({x}))[0] ==
          doctest::Approx(2.0 * apply_control(r2, one, 0.7, vec({x}))[0]).epsilon(1e-15));
  }
  CHECK_THROWS_AS(apply_control(r2, one, -0.1, vec({3})), std::out_of_range);
  CHECK_THROWS_AS(apply_control(r2, one, 1.1, vec({3})), std::out_of_range);
}

TEST_CASE("schedule lookup is left-closed") {
  const AffineControlSchedule s({0.0, 0.5, 1.0}, {scalar(1), scalar(2), scalar(3)}, {vec({0}), vec({0}), vec({0})});
  CHECK(s.index_at(0.0) == 0);
  CHECK(s.index_at(0.25) == 0);
  CHECK(s.index_at(0.5) == 1);
  CHECK(s.index_at(0.99) == 1);
  CHECK(s.index_at(1.0) == 2);
  CHECK_THROWS_AS(s.index_at(1.5), std::out_of_range);
}

TEST_CASE("schedule invariants") {
  Mat asym(2, 2);
  asym << 1, 2, 0, 1;
  CHECK_THROWS_AS(AffineControlSchedule({0.0, 1.0}, {asym, asym}, {Vec::Zero(2), Vec::Zero(2)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(AffineControlSchedule({0.0, 0.0}, {scalar(1), scalar(1)}, {vec({0}), vec({0})}),
                  std::invalid_argument);
  CHECK_THROWS_AS(AffineControlSchedule({0.0, 1.0}, {scalar(1)}, {vec({0}), vec({0})}), std::invalid_argument);
}

TEST_CASE("problem validation") {
  ProblemSpec s = lq_spec();
  s.running_weight = scalar(-1.0);
  CHECK_THROWS_AS(ControlProblem{s}, std::invalid_argument);

  s = pendulum_spec();
  Mat v(2, 2);
  v << 1, 0.5, 0, 1;
  s.terminal_weight = v;
  CHECK_THROWS_AS(ControlProblem{s}, std::invalid_argument);

  s = pendulum_spec();
  s.gain = [](const Vec&) { return Mat::Zero(3, 1).eval(); };
  CHECK_THROWS_AS(ControlProblem{s}, std::invalid_argument);

  s = lq_spec();
  s.constant_noise = false;
  s.noise = [](const Vec& x) { return Mat::Constant(1, 1, 1.0 + x[0] * x[0]); };
  CHECK_THROWS_AS(ControlProblem{s}, std::invalid_argument);
  s.div_sigma = [](const Vec& x) { return Vec::Constant(1, 4.0 * x[0] * (1.0 + x[0] * x[0])); };
  CHECK_NOTHROW(ControlProblem{s});
}

TEST_CASE("constant noise has zero divergence") {
  const ControlProblem pend(pendulum_spec());
  CHECK(pend.div_sigma(vec({0.3, 2.0})).isZero(0.0));
  CHECK(pend.diffusion(vec({0, 0}))(1, 1) == 1.0);
  CHECK(pend.control_diffusion(vec({0, 0}))(1, 1) == doctest::Approx(10.0));
}
