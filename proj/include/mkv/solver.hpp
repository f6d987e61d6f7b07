#pragma once

#include "mkv/dmap.hpp"
#include "mkv/enkf.hpp"
#include "mkv/problem.hpp"
#include "mkv/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace mkv {

enum class Backend { enkf, dmap_enkf };

/// ε = `initial` for the first `initial_steps` steps, `after` from then on.
struct NoiseSchedule {
  double initial = 0.0;
  std::size_t initial_steps = 0;
  double after = 0.0;

  double at(std::size_t step) const { return step < initial_steps ? initial : after; }
  static NoiseSchedule constant(double eps) { return {eps, 0, eps}; }
};

struct SolverConfig {
  double dt = 1e-3;
  int ensemble_size = 16;
  NoiseSchedule eps_forward{1.0, 1, 0.0};
  NoiseSchedule eps_reverse = NoiseSchedule::constant(0.0);
  double inflation = 1e-4;
  Backend backend = Backend::enkf;
  /// Kernel scale of the diffusion map; Δt when unset.
  std::optional<double> eps_dm;
  std::uint64_t seed = 0;
  /// Stride for emitted records and ensemble snapshots.
  int record_every = 1;
  bool keep_ensembles = false;
  SinkhornOptions sinkhorn;
};

/// Uniform grid t_n = n T / N with N = round(T/Δt).
struct TimeGrid {
  std::size_t steps = 0;
  double dt = 0.0;
  double horizon = 0.0;

  double time(std::size_t n) const { return n == steps ? horizon : static_cast<double>(n) * dt; }
  std::vector<double> times() const;
};

/// Throws std::invalid_argument on any inconsistent setting.
TimeGrid validate(const ControlProblem& p, const SolverConfig& cfg);

/// Certificates collected while the diffusion-map backend runs.
struct DmapDiagnostics {
  std::size_t kernels_built = 0;
  double max_row_error = 0.0;
  double max_col_error = 0.0;
  int max_sinkhorn_iterations = 0;
  std::size_t projections = 0;
  /// Projections whose weights were negative or did not sum to one.
  std::size_t hull_violations = 0;
  double min_weight = 1.0;
  double max_weight_sum_error = 0.0;
};

struct EnsembleSnapshot {
  std::size_t step = 0;
  Mat particles;
};

struct SweepRecord {
  std::vector<double> times;
  /// Inflated moments, exactly as used by the drifts and gains.
  std::vector<Vec> bar_mean;
  std::vector<Mat> bar_cov;
  std::vector<Vec> tilde_mean;
  std::vector<Mat> tilde_cov;
  std::vector<GainPair> gains;
  std::vector<EnsembleSnapshot> forward_snapshots;
  std::vector<EnsembleSnapshot> reverse_snapshots;
  DmapDiagnostics dmap;
};

struct ForwardSweep {
  TimeGrid grid;
  std::vector<FactoredMoments> moments;
  Ensemble terminal;
  /// Per-step diffusion maps on the forward ensemble (dmap backend only).
  std::vector<DiffusionMapOperator> operators;
  std::vector<EnsembleSnapshot> snapshots;
  DmapDiagnostics dmap;
};

ForwardSweep forward_sweep(const ControlProblem& p, const SolverConfig& cfg);

/// Reverse EnKF sweep from the transformed terminal ensemble down to t = 0.
SweepRecord reverse_sweep_enkf(const ControlProblem& p, const SolverConfig& cfg, const ForwardSweep& forward,
                               const Ensemble& terminal);

/// Split-step reverse sweep: drift/noise half step, then projection onto the
/// forward ensemble one step earlier through its diffusion map.
SweepRecord reverse_sweep_splitstep(const ControlProblem& p, const SolverConfig& cfg, const ForwardSweep& forward,
                                    const Ensemble& terminal);

struct Solution {
  AffineControlSchedule schedule;
  SweepRecord record;
};

Solution solve(const ControlProblem& p, const SolverConfig& cfg);

// -- controlled simulation --------------------------------------------------

enum class ControlStepping {
  /// Plain Euler–Maruyama with u = apply_control(t_n, X_n).
  explicit_euler,
  /// The feedback's linear part is taken at X_{n+1}:
  /// (I − Δt G R Gᵀ A) X_{n+1} = X_n + Δt(b + G R Gᵀ c) + √Δt σ Ξ,
  /// all state-dependent fields frozen at X_n. Stable for any gain size.
  linearly_implicit,
};

struct SimulationOptions {
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  /// Multiplies σ; 0 gives deterministic paths.
  std::optional<double> noise_scale;
  std::optional<Vec> start;
  ControlStepping stepping = ControlStepping::linearly_implicit;
};

struct Trajectories {
  std::vector<double> times;
  /// One d_x × (N+1) matrix per path.
  std::vector<Mat> states;
  /// One d_u × (N+1) matrix per path; column n is the control applied on [t_n, t_{n+1}).
  std::vector<Mat> controls;
  /// ∫(c + ½uᵀR⁻¹u)dt + f(X_T), left-endpoint rule.
  std::vector<double> costs;
};

Trajectories simulate_controlled(const ControlProblem& p, const AffineControlSchedule& sched,
                                 const SimulationOptions& opts);

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
};

CostEstimate estimate_cost(const ControlProblem& p, const AffineControlSchedule& sched, const SimulationOptions& opts);

}  // namespace mkv
