#include "mkv/kernels.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <string>

namespace mkv {

namespace {
constexpr Eigen::Index kMinParallelWork = 16;

// Exceptions must not escape an OpenMP region; keep the first and rethrow.
class FirstError {
 public:
  template <class F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
#pragma omp critical(mkv_first_error)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};
}  // namespace

int configure_threads_from_env() {
  if (const char* env = std::getenv("MKV_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) omp_set_num_threads(n);
    } catch (const std::exception&) {
      // Ignore malformed values; the default team size stays in effect.
    }
  }
  return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

namespace kernels {

Mat map_columns(const Mat& x, Eigen::Index out_rows, const ColumnMap& f) {
  const Eigen::Index m = x.cols();
  Mat out(out_rows, m);
  FirstError err;
#pragma omp parallel for schedule(static) if (m >= kMinParallelWork)
  for (Eigen::Index i = 0; i < m; ++i) {
    err.run([&] { out.col(i) = f(i, x.col(i)); });
  }
  err.rethrow();
  return out;
}

Mat symmetric_pairwise(Eigen::Index m, const PairFunction& k) {
  Mat out(m, m);
  FirstError err;
#pragma omp parallel for schedule(dynamic, 8) if (m >= kMinParallelWork)
  for (Eigen::Index i = 0; i < m; ++i) {
    err.run([&] {
      for (Eigen::Index j = i; j < m; ++j) {
        const double v = k(i, j);
        out(i, j) = v;
        out(j, i) = v;
      }
    });
  }
  err.rethrow();
  return out;
}

Vec symmetric_matvec(const Mat& k, const Vec& v) {
  const Eigen::Index m = k.cols();
  Vec y(m);
  const double* data = k.data();
#pragma omp parallel for schedule(static) if (m >= 4 * kMinParallelWork)
  for (Eigen::Index i = 0; i < m; ++i) {
    // Column i equals row i by symmetry and is contiguous.
    const double* col = data + i * m;
    double acc = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) acc += col[j] * v[j];
    y[i] = acc;
  }
  return y;
}

void for_each_index(Eigen::Index n, const IndexTask& f) {
  FirstError err;
#pragma omp parallel for schedule(dynamic, 1) if (n > 1)
  for (Eigen::Index i = 0; i < n; ++i) {
    err.run([&] { f(i); });
  }
  err.rethrow();
}

}  // namespace kernels
}  // namespace mkv
