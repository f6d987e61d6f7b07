#include "mkv/scenarios.hpp"

#include <cmath>
#include <stdexcept>

namespace mkv {

namespace {

Mat scalar(double v) { return Mat::Constant(1, 1, v); }

VectorField identity() {
  return [](const Vec& x) { return x; };
}

}  // namespace

ProblemSpec pendulum_spec(double rho) {
  ProblemSpec s;
  s.dim_x = 2;
  s.dim_u = 1;
  s.dim_b = 1;
  s.dim_h = 1;
  s.dim_xi = 2;
  s.drift = [](const Vec& x) { return Vec((Vec(2) << x[1], std::sin(x[0])).finished()); };
  s.gain = [](const Vec& x) { return Mat((Mat(2, 1) << 0.0, -std::cos(x[0])).finished()); };
  s.noise = [rho](const Vec&) { return Mat((Mat(2, 1) << 0.0, rho).finished()); };
  s.constant_noise = true;
  s.running_map = [](const Vec& x) { return Vec(x.tail(1)); };
  s.running_weight = scalar(0.1);
  s.terminal_map = identity();
  s.terminal_weight = 1e-3 * Mat::Identity(2, 2);
  s.control_weight = scalar(10.0);
  s.horizon = 1.0;
  s.start = (Vec(2) << M_PI, 0.1).finished();
  return s;
}

ProblemSpec langevin_spec() {
  ProblemSpec s;
  s.drift = [](const Vec& x) { return Vec(-(x.array().cube() - x.array()).matrix()); };
  s.gain = [](const Vec&) { return scalar(1.0); };
  s.noise = [](const Vec&) { return scalar(1.0); };
  s.constant_noise = true;
  s.running_map = identity();
  s.running_weight = scalar(0.01);
  s.terminal_map = identity();
  s.terminal_weight = scalar(1.0);
  s.control_weight = scalar(1.0);
  s.horizon = 30.0;
  s.start = Vec::Constant(1, 1.0);
  return s;
}

ProblemSpec lq_spec(double a, double horizon, double start) {
  ProblemSpec s;
  s.drift = [a](const Vec& x) { return Vec(a * x); };
  s.gain = [](const Vec&) { return scalar(1.0); };
  s.noise = [](const Vec&) { return scalar(1.0); };
  s.constant_noise = true;
  s.running_map = identity();
  s.running_weight = scalar(1.0);
  s.terminal_map = identity();
  s.terminal_weight = scalar(1.0);
  s.control_weight = scalar(1.0);
  s.horizon = horizon;
  s.start = Vec::Constant(1, start);
  return s;
}

ProblemSpec ou_diffusion_spec() {
  ProblemSpec s;
  s.drift = [](const Vec& x) { return Vec(-0.5 * x); };
  s.gain = [](const Vec&) { return scalar(1.0); };
  s.noise = [](const Vec&) { return scalar(1.0); };
  s.constant_noise = true;
  s.running_map = [](const Vec&) { return Vec::Zero(1); };
  s.running_weight = scalar(1.0);
  s.terminal_map = [](const Vec&) { return Vec::Zero(1); };
  s.terminal_weight = scalar(1.0);
  s.control_weight = scalar(1.0);
  s.horizon = 1.0;
  s.start = Vec::Zero(1);
  s.start_cov = scalar(1.0);
  return s;
}

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> registry = [] {
    std::vector<Scenario> r;

    SolverConfig pend;
    pend.dt = 1e-4;
    pend.ensemble_size = 3;
    pend.inflation = 1e-4;
    pend.eps_forward = {0.01, 1, 0.0};
    pend.eps_reverse = NoiseSchedule::constant(0.0);
    r.push_back({"pendulum", "inverted pendulum swing-up from (pi, 0.1), T = 1", [] { return pendulum_spec(); },
                 pend});

    SolverConfig lang;
    lang.dt = 0.01;
    lang.ensemble_size = 8;
    lang.inflation = 1e-4;
    lang.eps_forward = {1.0, 10, 0.0};
    lang.eps_reverse = NoiseSchedule::constant(0.0);
    lang.backend = Backend::dmap_enkf;
    r.push_back({"langevin", "double-well Langevin stabilised at the saddle x = 0, T = 30", langevin_spec, lang});

    SolverConfig lq;
    lq.dt = 1e-3;
    lq.ensemble_size = 64;
    lq.inflation = 1e-6;
    lq.eps_forward = {1.0, 50, 0.0};
    lq.eps_reverse = NoiseSchedule::constant(0.0);
    r.push_back({"lq", "scalar linear-quadratic problem with a = -0.5, T = 1 (Riccati reference)",
                 [] { return lq_spec(); }, lq});

    SolverConfig ou;
    ou.dt = 1e-2;
    ou.ensemble_size = 64;
    ou.inflation = 1e-6;
    ou.eps_forward = NoiseSchedule::constant(0.0);
    ou.eps_reverse = NoiseSchedule::constant(0.0);
    r.push_back({"ou_diffusion", "Ornstein-Uhlenbeck process started in its N(0, 1) equilibrium, zero cost",
                 ou_diffusion_spec, ou});
    return r;
  }();
  return registry;
}

const Scenario& find_scenario(const std::string& name) {
  for (const auto& s : scenario_registry()) {
    if (s.name == name) return s;
  }
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

}  // namespace mkv
