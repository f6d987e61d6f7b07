#pragma once

#include "mkv/enkf.hpp"
#include "mkv/solver.hpp"

#include <cstddef>
#include <vector>

namespace mkv {

struct HorizonConfig {
  /// Discount rate γ > 0.
  double gamma = 1.0;
  /// Equilibrium when (‖Δm‖ + ‖ΔC‖_max)/Δt falls below this.
  double equilibrium_tol = 1e-6;
  /// Cap on the integration length of each of the two phases.
  double max_time = 1e3;
  /// dt, ensemble size, noise schedules, inflation and seed; the horizon of
  /// the problem is ignored.
  SolverConfig base;
};

/// ½ C̃ {γI + A(Σ(m̃) − G R Gᵀ(m̃))} (A x + A m̃ + 2c).
Vec g_tilde_kf_discounted(const ControlProblem& p, const Vec& x, const FactoredMoments& tilde, const GainPair& gain,
                          double gamma);

struct StationaryResult {
  GainPair gain;
  FactoredMoments bar;
  FactoredMoments tilde;
  std::size_t forward_steps = 0;
  std::size_t reverse_steps = 0;
  double forward_residual = 0.0;
  double reverse_residual = 0.0;
  /// Reverse-phase history, one entry per step (reverse time, from 0).
  std::vector<double> reverse_times;
  std::vector<Vec> tilde_mean;
  std::vector<Mat> tilde_cov;
};

/// Runs the forward EnKF dynamics to equilibrium, freezes (m̄, C̄), then runs
/// the discounted reverse dynamics from the forward equilibrium ensemble to
/// its own equilibrium. Throws ConvergenceFailure when either phase exceeds
/// max_time.
StationaryResult stationary_solve(const ControlProblem& p, const HorizonConfig& cfg);

}  // namespace mkv
