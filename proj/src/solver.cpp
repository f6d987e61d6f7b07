#include "mkv/solver.hpp"

#include "mkv/errors.hpp"
#include "mkv/kernels.hpp"
#include "mkv/rng.hpp"
#include "steps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mkv {

namespace {

void check_schedule(const NoiseSchedule& s, const char* name) {
  for (double e : {s.initial, s.after}) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

Mat initial_ensemble(const ControlProblem& p, const SolverConfig& cfg) {
  const int m = cfg.ensemble_size;
  Mat x = p.start().replicate(1, m);
  const Mat& c0 = p.start_cov();
  if (c0.size() == 0 || c0.isZero(0.0)) return x;
  const Mat root = Eigen::SelfAdjointEigenSolver<Mat>(c0).operatorSqrt();
  const CounterRng rng(cfg.seed, Stream::initial);
  for (int i = 0; i < m; ++i) x.col(i) += root * rng.normals(0, static_cast<std::uint64_t>(i), p.dim_x());
  return x;
}

bool snapshot_due(const SolverConfig& cfg, std::size_t n, std::size_t last) {
  return cfg.keep_ensembles && (n % static_cast<std::size_t>(cfg.record_every) == 0 || n == last);
}

void note_operator(DmapDiagnostics& d, const DiffusionMapOperator& op) {
  ++d.kernels_built;
  d.max_row_error = std::max(d.max_row_error, op.normalization_error().rows);
  d.max_col_error = std::max(d.max_col_error, op.normalization_error().cols);
  d.max_sinkhorn_iterations = std::max(d.max_sinkhorn_iterations, op.sinkhorn_iterations());
}

SweepRecord empty_record(const ForwardSweep& fw) {
  SweepRecord r;
  const std::size_t n = fw.grid.steps + 1;
  r.times = fw.grid.times();
  r.bar_mean.reserve(n);
  r.bar_cov.reserve(n);
  for (const auto& m : fw.moments) {
    r.bar_mean.push_back(m.mean);
    r.bar_cov.push_back(m.cov);
  }
  r.tilde_mean.resize(n);
  r.tilde_cov.resize(n);
  r.gains.resize(n);
  r.dmap = fw.dmap;
  return r;
}

// Shared reverse loop; `advance` maps the ensemble at t_n to t_{n−1}.
template <class Advance>
SweepRecord reverse_loop(const ControlProblem& p, const SolverConfig& cfg, const ForwardSweep& fw,
                         const Ensemble& terminal, Advance&& advance) {
  const std::size_t last = fw.grid.steps;
  if (fw.moments.size() != last + 1) throw std::invalid_argument("forward sweep is incomplete");
  if (terminal.dim() != p.dim_x() || terminal.size() != cfg.ensemble_size) {
    throw std::invalid_argument("terminal ensemble does not match the configuration");
  }
  SweepRecord rec = empty_record(fw);
  Mat y = terminal.particles();
  for (std::size_t n = last;; --n) {
    const double t = fw.grid.time(n);
    const FactoredMoments tilde = detail::checked_moments(y, cfg.inflation, n, t, "reverse sweep");
    const GainPair gain = gain_from_moments(fw.moments[n], tilde);
    if (!gain.A.allFinite() || !gain.c.allFinite()) throw NumericalBlowup("reverse sweep: non-finite gain", n, t, -1);
    rec.tilde_mean[n] = tilde.mean;
    rec.tilde_cov[n] = tilde.cov;
    rec.gains[n] = gain;
    if (snapshot_due(cfg, n, last)) rec.reverse_snapshots.push_back({n, y});
    if (n == 0) break;
    y = advance(n, y, tilde, gain, rec.dmap);
    detail::check_finite(y, n - 1, fw.grid.time(n - 1), "reverse sweep");
  }
  std::reverse(rec.reverse_snapshots.begin(), rec.reverse_snapshots.end());
  return rec;
}

}  // namespace

std::vector<double> TimeGrid::times() const {
  std::vector<double> t(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) t[n] = time(n);
  return t;
}

TimeGrid validate(const ControlProblem& p, const SolverConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("dt must be positive");
  if (cfg.ensemble_size < 2) throw InsufficientEnsemble(static_cast<std::size_t>(std::max(cfg.ensemble_size, 0)));
  if (!(cfg.inflation >= 0.0)) throw std::invalid_argument("inflation must be non-negative");
  if (cfg.record_every < 1) throw std::invalid_argument("record_every must be positive");
  check_schedule(cfg.eps_forward, "forward noise level");
  check_schedule(cfg.eps_reverse, "reverse noise level");
  const double ratio = p.horizon() / cfg.dt;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (steps < 1) throw std::invalid_argument("dt exceeds the horizon");
  if (cfg.backend == Backend::dmap_enkf) {
    if (cfg.eps_dm && !(*cfg.eps_dm > 0.0)) throw std::invalid_argument("eps_dm must be positive");
    if (p.dim_b() < p.dim_x()) throw std::invalid_argument("dmap backend needs a full-rank diffusion matrix");
    Eigen::LLT<Mat> llt(p.diffusion(p.start()));
    if (llt.info() != Eigen::Success) throw std::invalid_argument("dmap backend needs a full-rank diffusion matrix");
  }
  return {steps, p.horizon() / static_cast<double>(steps), p.horizon()};
}

ForwardSweep forward_sweep(const ControlProblem& p, const SolverConfig& cfg) {
  struct {
    TimeGrid grid;
    std::vector<FactoredMoments> moments;
    std::vector<DiffusionMapOperator> operators;
    std::vector<EnsembleSnapshot> snapshots;
    DmapDiagnostics dmap;
  } fw;
  fw.grid = validate(p, cfg);
  const std::size_t last = fw.grid.steps;
  const double dt = fw.grid.dt;
  const bool dmap = cfg.backend == Backend::dmap_enkf;
  const double eps_dm = cfg.eps_dm.value_or(dt);
  const CounterRng rng(cfg.seed, Stream::forward_noise);

  Mat x = initial_ensemble(p, cfg);
  fw.moments.reserve(last + 1);
  if (dmap) fw.operators.reserve(last);
  for (std::size_t n = 0;; ++n) {
    const double t = fw.grid.time(n);
    fw.moments.push_back(detail::checked_moments(x, cfg.inflation, n, t, "forward sweep"));
    if (snapshot_due(cfg, n, last)) fw.snapshots.push_back({n, x});
    if (n == last) break;

    const RunningCoupling rc = RunningCoupling::from(p, x);
    const double eps = cfg.eps_forward.at(n);
    if (dmap) {
      fw.operators.push_back(DiffusionMapOperator::build(p, x, eps_dm, cfg.sinkhorn, false));
      const DiffusionMapOperator& op = fw.operators.back();
      note_operator(fw.dmap, op);
      x = kernels::map_columns(x, x.rows(), [&](Eigen::Index i, const Vec& xi) -> Vec {
        const Vec score = eps < 1.0 ? op.grad_log_estimate(xi) : Vec::Zero(xi.size());
        return xi + dt * forward_drift_from_score(p, xi, score, rc.cxh, rc.mh, eps) +
               detail::noise_increment(p, xi, eps, dt, rng, n, i);
      });
    } else {
      x = detail::forward_step_enkf(p, x, fw.moments.back(), rc, eps, dt, rng, n);
    }
    detail::check_finite(x, n + 1, fw.grid.time(n + 1), "forward sweep");
  }
  return {fw.grid,           std::move(fw.moments),  Ensemble(std::move(x), p.horizon()),
          std::move(fw.operators), std::move(fw.snapshots), fw.dmap};
}

SweepRecord reverse_sweep_enkf(const ControlProblem& p, const SolverConfig& cfg, const ForwardSweep& forward,
                               const Ensemble& terminal) {
  const std::size_t last = forward.grid.steps;
  const double dt = forward.grid.dt;
  const CounterRng rng(cfg.seed, Stream::reverse_noise);
  return reverse_loop(p, cfg, forward, terminal,
                      [&](std::size_t n, const Mat& y, const FactoredMoments& tilde, const GainPair& gain,
                          DmapDiagnostics&) {
                        const double eps = cfg.eps_reverse.at(last - n);
                        return detail::reverse_step_enkf(p, y, forward.moments[n], tilde,
                                                         TildeCoupling(p, tilde, gain), eps, dt, rng, last - n);
                      });
}

SweepRecord reverse_sweep_splitstep(const ControlProblem& p, const SolverConfig& cfg, const ForwardSweep& forward,
                                    const Ensemble& terminal) {
  const std::size_t last = forward.grid.steps;
  if (forward.operators.size() != last) {
    throw std::invalid_argument("split-step reverse sweep needs the forward diffusion maps");
  }
  const double dt = forward.grid.dt;
  const CounterRng rng(cfg.seed, Stream::reverse_noise);
  return reverse_loop(
      p, cfg, forward, terminal,
      [&](std::size_t n, const Mat& y, const FactoredMoments& tilde, const GainPair& gain, DmapDiagnostics& diag) {
        const double eps = cfg.eps_reverse.at(last - n);
        const TildeCoupling g(p, tilde, gain);
        const Mat half = kernels::map_columns(y, y.rows(), [&](Eigen::Index i, const Vec& yi) -> Vec {
          const Vec drift = -p.drift(yi) - g(yi) - 0.5 * (1.0 - eps) * gaussian_score_term(p, yi, tilde);
          return yi + dt * drift + detail::noise_increment(p, yi, eps, dt, rng, last - n, i);
        });
        detail::check_finite(half, n, forward.grid.time(n), "split-step half step");

        const DiffusionMapOperator& op = forward.operators[n - 1];
        const Mat w = kernels::map_columns(half, op.anchors().cols(),
                                           [&](Eigen::Index, const Vec& hi) -> Vec { return op.weights(hi); });
        for (Eigen::Index i = 0; i < w.cols(); ++i) {
          const double lo = w.col(i).minCoeff();
          const double sum_err = std::abs(w.col(i).sum() - 1.0);
          ++diag.projections;
          diag.min_weight = std::min(diag.min_weight, lo);
          diag.max_weight_sum_error = std::max(diag.max_weight_sum_error, sum_err);
          if (!(lo >= 0.0) || !(sum_err <= 1e-12)) ++diag.hull_violations;
        }
        return Mat(op.anchors() * w);
      });
}

Solution solve(const ControlProblem& p, const SolverConfig& cfg) {
  ForwardSweep fw = forward_sweep(p, cfg);
  const Ensemble terminal = terminal_update(p, fw.terminal, CounterRng(cfg.seed, Stream::terminal));
  SweepRecord rec = cfg.backend == Backend::dmap_enkf ? reverse_sweep_splitstep(p, cfg, fw, terminal)
                                                      : reverse_sweep_enkf(p, cfg, fw, terminal);
  rec.forward_snapshots = std::move(fw.snapshots);
  std::vector<Mat> a;
  std::vector<Vec> c;
  a.reserve(rec.gains.size());
  c.reserve(rec.gains.size());
  for (const auto& g : rec.gains) {
    a.push_back(g.A);
    c.push_back(g.c);
  }
  AffineControlSchedule sched(rec.times, std::move(a), std::move(c));
  return {std::move(sched), std::move(rec)};
}

}  // namespace mkv
