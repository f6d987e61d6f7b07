#include "mkv/horizon.hpp"

#include "mkv/errors.hpp"
#include "steps.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mkv {

namespace {

double increment(const FactoredMoments& a, const FactoredMoments& b, double dt) {
  return ((a.mean - b.mean).norm() + (a.cov - b.cov).cwiseAbs().maxCoeff()) / dt;
}

}  // namespace

Vec g_tilde_kf_discounted(const ControlProblem& p, const Vec& x, const FactoredMoments& tilde, const GainPair& gain,
                          double gamma) {
  return TildeCoupling(p, tilde, gain, gamma)(x);
}

StationaryResult stationary_solve(const ControlProblem& p, const HorizonConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(cfg.equilibrium_tol > 0.0)) throw std::invalid_argument("equilibrium_tol must be positive");
  const SolverConfig& base = cfg.base;
  if (base.backend != Backend::enkf) throw std::invalid_argument("stationary solve supports the enkf backend only");
  const double dt = base.dt;
  if (!(dt > 0.0) || !(cfg.max_time > dt)) throw std::invalid_argument("need 0 < dt < max_time");
  if (base.ensemble_size < 2) throw InsufficientEnsemble(static_cast<std::size_t>(std::max(base.ensemble_size, 0)));
  const auto cap = static_cast<std::size_t>(std::ceil(cfg.max_time / dt));

  StationaryResult out;

  // Forward phase.
  const CounterRng fwd_rng(base.seed, Stream::forward_noise);
  Mat x = p.start().replicate(1, base.ensemble_size);
  if (p.start_cov().size() != 0 && !p.start_cov().isZero(0.0)) {
    const Mat root = Eigen::SelfAdjointEigenSolver<Mat>(p.start_cov()).operatorSqrt();
    const CounterRng init(base.seed, Stream::initial);
    for (int i = 0; i < base.ensemble_size; ++i) {
      x.col(i) += root * init.normals(0, static_cast<std::uint64_t>(i), p.dim_x());
    }
  }
  FactoredMoments bar = detail::checked_moments(x, base.inflation, 0, 0.0, "stationary forward phase");
  double residual = INFINITY;
  std::size_t n = 0;
  for (; n < cap; ++n) {
    const RunningCoupling rc = RunningCoupling::from(p, x);
    x = detail::forward_step_enkf(p, x, bar, rc, base.eps_forward.at(n), dt, fwd_rng, n);
    const double t = static_cast<double>(n + 1) * dt;
    FactoredMoments next = detail::checked_moments(x, base.inflation, n + 1, t, "stationary forward phase");
    residual = increment(next, bar, dt);
    bar = std::move(next);
    if (n + 1 >= base.eps_forward.initial_steps && residual < cfg.equilibrium_tol) break;
  }
  if (n == cap) throw ConvergenceFailure("forward phase did not reach equilibrium", residual);
  out.forward_steps = n + 1;
  out.forward_residual = residual;
  out.bar = bar;

  // Reverse phase from the forward equilibrium ensemble with frozen (m̄, C̄).
  const CounterRng rev_rng(base.seed, Stream::reverse_noise);
  Mat y = x;
  FactoredMoments tilde = detail::checked_moments(y, base.inflation, 0, 0.0, "stationary reverse phase");
  out.reverse_times.push_back(0.0);
  out.tilde_mean.push_back(tilde.mean);
  out.tilde_cov.push_back(tilde.cov);
  residual = INFINITY;
  std::size_t k = 0;
  for (; k < cap; ++k) {
    const GainPair gain = gain_from_moments(bar, tilde);
    const TildeCoupling g(p, tilde, gain, cfg.gamma);
    y = detail::reverse_step_enkf(p, y, bar, tilde, g, base.eps_reverse.at(k), dt, rev_rng, k);
    const double s = static_cast<double>(k + 1) * dt;
    FactoredMoments next = detail::checked_moments(y, base.inflation, k + 1, s, "stationary reverse phase");
    residual = increment(next, tilde, dt);
    tilde = std::move(next);
    out.reverse_times.push_back(s);
    out.tilde_mean.push_back(tilde.mean);
    out.tilde_cov.push_back(tilde.cov);
    if (k + 1 >= base.eps_reverse.initial_steps && residual < cfg.equilibrium_tol) break;
  }
  if (k == cap) throw ConvergenceFailure("reverse phase did not reach equilibrium", residual);
  out.reverse_steps = k + 1;
  out.reverse_residual = residual;
  out.tilde = tilde;
  out.gain = gain_from_moments(bar, tilde);
  return out;
}

}  // namespace mkv
