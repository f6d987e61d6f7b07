#pragma once

#include "mkv/problem.hpp"
#include "mkv/solver.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mkv {

/// Inverted pendulum, state (θ, θ̇): dθ = θ̇dt, dθ̇ = sinθ dt − cosθ u dt + ρ dB.
ProblemSpec pendulum_spec(double rho = 1.0);
/// Double-well Langevin dynamics dX = −(X³ − X)dt + u dt + dB.
ProblemSpec langevin_spec();
/// Scalar linear-quadratic problem dX = aX dt + u dt + dB, h = ξ = x.
ProblemSpec lq_spec(double a = -0.5, double horizon = 1.0, double start = 1.0);
/// Ornstein–Uhlenbeck process at its N(0, 1) equilibrium with zero cost.
ProblemSpec ou_diffusion_spec();

struct Scenario {
  std::string name;
  std::string description;
  std::function<ProblemSpec()> spec;
  SolverConfig defaults;
};

const std::vector<Scenario>& scenario_registry();
/// Throws std::invalid_argument for an unknown name.
const Scenario& find_scenario(const std::string& name);

}  // namespace mkv
