#include "mkv/errors.hpp"
#include "mkv/kernels.hpp"
#include "mkv/rng.hpp"
#include "mkv/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace mkv {

Trajectories simulate_controlled(const ControlProblem& p, const AffineControlSchedule& sched,
                                 const SimulationOptions& opts) {
  if (opts.n_paths < 1) throw std::invalid_argument("n_paths must be at least 1");
  if (sched.dim_x() != p.dim_x()) throw std::invalid_argument("schedule dimension does not match the problem");
  if (std::abs(sched.horizon() - p.horizon()) > 1e-9 * p.horizon() || sched.times().front() != 0.0) {
    throw std::invalid_argument("schedule must cover [0, T]");
  }
  const Vec x0 = opts.start.value_or(p.start());
  if (x0.size() != p.dim_x()) throw std::invalid_argument("start has the wrong dimension");
  const double rho = opts.noise_scale.value_or(1.0);
  const std::vector<double>& times = sched.times();
  const std::size_t last = times.size() - 1;
  const CounterRng rng(opts.seed, Stream::paths);
  const Mat eye = Mat::Identity(p.dim_x(), p.dim_x());

  Trajectories out;
  out.times = times;
  out.states.resize(opts.n_paths);
  out.controls.resize(opts.n_paths);
  out.costs.resize(opts.n_paths);

  kernels::for_each_index(static_cast<Eigen::Index>(opts.n_paths), [&](Eigen::Index path) {
    const auto k = static_cast<std::size_t>(path);
    Mat xs(p.dim_x(), static_cast<Eigen::Index>(last + 1));
    Mat us(p.dim_u(), static_cast<Eigen::Index>(last + 1));
    double cost = 0.0;
    Vec x = x0;
    xs.col(0) = x;
    for (std::size_t n = 0; n < last; ++n) {
      const double t = times[n];
      const double dt = times[n + 1] - t;
      Vec dx = dt * p.drift(x);
      if (rho != 0.0) {
        const Vec xi = rng.normals(n, static_cast<std::uint64_t>(path), p.dim_b());
        dx += rho * std::sqrt(dt) * (p.noise(x) * xi);
      }
      Vec u;
      Vec next;
      if (opts.stepping == ControlStepping::explicit_euler) {
        u = apply_control(p, sched, t, x);
        next = x + dx + dt * (p.gain(x) * u);
      } else {
        const std::size_t idx = sched.index_at(t);
        const Mat& a = sched.gain(idx);
        const Vec& c = sched.shift(idx);
        const Mat g = p.gain(x);
        const Mat k_ctrl = p.control_diffusion(x);
        next = (eye - dt * k_ctrl * a).partialPivLu().solve(Vec(x + dx + dt * (k_ctrl * c)));
        u = p.control_weight() * (g.transpose() * (a * next + c));
      }
      if (!next.allFinite()) throw NumericalBlowup("controlled simulation diverged", n + 1, times[n + 1], path);
      cost += dt * (p.running_cost(x) + p.control_cost(u));
      us.col(static_cast<Eigen::Index>(n)) = u;
      x = std::move(next);
      xs.col(static_cast<Eigen::Index>(n + 1)) = x;
    }
    us.col(static_cast<Eigen::Index>(last)) = apply_control(p, sched, times[last], x);
    out.costs[k] = cost + p.terminal_cost(x);
    out.states[k] = std::move(xs);
    out.controls[k] = std::move(us);
  });
  return out;
}

CostEstimate estimate_cost(const ControlProblem& p, const AffineControlSchedule& sched, const SimulationOptions& opts) {
  const Trajectories tr = simulate_controlled(p, sched, opts);
  const auto n = static_cast<double>(tr.costs.size());
  double mean = 0.0;
  for (double c : tr.costs) mean += c;
  mean /= n;
  double ss = 0.0;
  for (double c : tr.costs) ss += (c - mean) * (c - mean);
  const double se = tr.costs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return {mean, se, tr.costs.size()};
}

}  // namespace mkv
