#pragma once
// Single-step particle updates shared by the finite-horizon sweeps and the
// stationary solver.

#include "mkv/enkf.hpp"
#include "mkv/errors.hpp"
#include "mkv/kernels.hpp"
#include "mkv/rng.hpp"
#include "mkv/stats.hpp"

#include <cmath>
#include <string>

namespace mkv::detail {

inline void check_finite(const Mat& x, std::size_t step, double t, const char* what) {
  if (x.allFinite()) return;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    if (!x.col(i).allFinite()) throw NumericalBlowup(what, step, t, static_cast<std::ptrdiff_t>(i));
  }
}

/// Inflated moments with a precision; a covariance that is no longer positive
/// definite is reported as a blowup at `step`.
inline FactoredMoments checked_moments(const Mat& x, double delta, std::size_t step, double t, const char* what) {
  check_finite(x, step, t, what);
  try {
    return FactoredMoments::from(moments(x, delta));
  } catch (const std::domain_error&) {
    throw NumericalBlowup(std::string(what) + ": covariance lost positive definiteness", step, t, -1);
  }
}

/// √(εΔt) σ(x) Ξ with Ξ drawn at counter (step, i); zero when ε = 0.
inline Vec noise_increment(const ControlProblem& p, const Vec& x, double eps, double dt, const CounterRng& rng,
                           std::uint64_t step, Eigen::Index i) {
  if (eps <= 0.0) return Vec::Zero(p.dim_x());
  const Vec xi = rng.normals(step, static_cast<std::uint64_t>(i), p.dim_b());
  return std::sqrt(eps * dt) * (p.noise(x) * xi);
}

/// X_{n+1} = X_n + Δt f̄ + √(εΔt) σ Ξ with the Gaussian score term.
inline Mat forward_step_enkf(const ControlProblem& p, const Mat& x, const FactoredMoments& bar,
                             const RunningCoupling& rc, double eps, double dt, const CounterRng& rng,
                             std::uint64_t counter) {
  return kernels::map_columns(x, x.rows(), [&](Eigen::Index i, const Vec& xi) -> Vec {
    return xi + dt * forward_drift(p, xi, bar, rc.cxh, rc.mh, eps) + noise_increment(p, xi, eps, dt, rng, counter, i);
  });
}

/// X̃_{n−1} = X̃_n + Δt f̃ + √(εΔt) σ Ξ.
inline Mat reverse_step_enkf(const ControlProblem& p, const Mat& y, const FactoredMoments& bar,
                             const FactoredMoments& tilde, const TildeCoupling& g, double eps, double dt,
                             const CounterRng& rng, std::uint64_t counter) {
  return kernels::map_columns(y, y.rows(), [&](Eigen::Index i, const Vec& yi) -> Vec {
    return yi + dt * reverse_drift(p, yi, bar, tilde, g, eps) + noise_increment(p, yi, eps, dt, rng, counter, i);
  });
}

}  // namespace mkv::detail
