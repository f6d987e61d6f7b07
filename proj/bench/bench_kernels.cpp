#include "mkv/dmap.hpp"
#include "mkv/enkf.hpp"
#include "mkv/kernels.hpp"
#include "mkv/rng.hpp"
#include "mkv/scenarios.hpp"
#include "mkv/solver.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>

using namespace mkv;

namespace {

Mat normals(int d, int m, std::uint64_t seed) {
  const CounterRng rng(seed, Stream::samples);
  Mat x(d, m);
  for (int i = 0; i < m; ++i) rng.normals(0, static_cast<std::uint64_t>(i), x.col(i));
  return x;
}

PairFunction gaussian_pairs(const Mat& x) {
  const Eigen::LLT<Mat> llt(2.0 * Mat::Identity(x.rows(), x.rows()));
  return [&x, llt](Eigen::Index i, Eigen::Index j) {
    const Vec d = x.col(i) - x.col(j);
    return std::exp(-d.dot(llt.solve(d)) / 0.02);
  };
}

void BM_PairwiseReference(benchmark::State& st) {
  const Mat x = normals(2, static_cast<int>(st.range(0)), 1);
  const auto k = gaussian_pairs(x);
  for (auto _ : st) benchmark::DoNotOptimize(reference::symmetric_pairwise(x.cols(), k));
}

void BM_PairwiseParallel(benchmark::State& st) {
  const Mat x = normals(2, static_cast<int>(st.range(0)), 1);
  const auto k = gaussian_pairs(x);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::symmetric_pairwise(x.cols(), k));
}

void BM_MatvecReference(benchmark::State& st) {
  const Mat x = normals(1, static_cast<int>(st.range(0)), 2);
  const Mat k = reference::symmetric_pairwise(x.cols(), gaussian_pairs(x));
  const Vec v = Vec::Ones(x.cols());
  for (auto _ : st) benchmark::DoNotOptimize(reference::symmetric_matvec(k, v));
}

void BM_MatvecParallel(benchmark::State& st) {
  const Mat x = normals(1, static_cast<int>(st.range(0)), 2);
  const Mat k = reference::symmetric_pairwise(x.cols(), gaussian_pairs(x));
  const Vec v = Vec::Ones(x.cols());
  for (auto _ : st) benchmark::DoNotOptimize(kernels::symmetric_matvec(k, v));
}

ColumnMap forward_step(const ControlProblem& p, const FactoredMoments& bar, const RunningCoupling& rc) {
  return [&](Eigen::Index, const Vec& x) -> Vec { return x + 1e-3 * forward_drift(p, x, bar, rc.cxh, rc.mh, 0.0); };
}

void BM_DriftReference(benchmark::State& st) {
  const ControlProblem p(pendulum_spec());
  const Mat x = normals(2, static_cast<int>(st.range(0)), 3);
  const auto bar = FactoredMoments::from(moments(x, 1e-4));
  const auto rc = RunningCoupling::from(p, x);
  const auto f = forward_step(p, bar, rc);
  for (auto _ : st) benchmark::DoNotOptimize(reference::map_columns(x, 2, f));
}

void BM_DriftParallel(benchmark::State& st) {
  const ControlProblem p(pendulum_spec());
  const Mat x = normals(2, static_cast<int>(st.range(0)), 3);
  const auto bar = FactoredMoments::from(moments(x, 1e-4));
  const auto rc = RunningCoupling::from(p, x);
  const auto f = forward_step(p, bar, rc);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::map_columns(x, 2, f));
}

// Path simulation with range(1) threads; 0 means one per processor.
void BM_Paths(benchmark::State& st) {
  const ControlProblem p(langevin_spec());
  const auto sched = AffineControlSchedule::zero(30.0, 3000, 1);
  SimulationOptions o;
  o.n_paths = static_cast<std::size_t>(st.range(0));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(st.range(1) > 0 ? static_cast<int>(st.range(1)) : omp_get_num_procs());
  for (auto _ : st) benchmark::DoNotOptimize(simulate_controlled(p, sched, o));
  omp_set_num_threads(saved);
}

}  // namespace

BENCHMARK(BM_PairwiseReference)->Arg(128)->Arg(512);
BENCHMARK(BM_PairwiseParallel)->Arg(128)->Arg(512);
BENCHMARK(BM_MatvecReference)->Arg(512)->Arg(2048);
BENCHMARK(BM_MatvecParallel)->Arg(512)->Arg(2048);
BENCHMARK(BM_DriftReference)->Arg(64)->Arg(4096);
BENCHMARK(BM_DriftParallel)->Arg(64)->Arg(4096);
BENCHMARK(BM_Paths)->Args({64, 1})->Args({64, 0})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
