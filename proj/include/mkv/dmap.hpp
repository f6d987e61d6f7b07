#pragma once

#include "mkv/problem.hpp"

#include <vector>

namespace mkv {

struct SinkhornOptions {
  double tol = 1e-8;
  int max_iter = 10000;
  bool keep_history = false;
};

struct SinkhornResult {
  Vec scaling;
  int iterations = 0;
  /// max_i |(D(v)RD(v)1)_i − 1/M| at return.
  double residual = 0.0;
  std::vector<double> history;
};

/// Symmetric fixed point v ← sqrt(v / (M·Rv)) until every row sum of
/// D(v)RD(v) is within tol of 1/M. Throws ConvergenceFailure at max_iter.
SinkhornResult sinkhorn(const Mat& kernel, const SinkhornOptions& opts = {});

/// R_ij = exp(−dᵀ(Σ(Xⁱ)+Σ(Xʲ))⁻¹d / (2ε)), d = Xⁱ − Xʲ.
Mat build_kernel(const Mat& anchors, const std::vector<Mat>& sigma_at_anchors, double eps_dm);
/// Constant-Σ specialization: one factorization of 2Σ.
Mat build_kernel(const Mat& anchors, const Mat& sigma, double eps_dm);

/// Max deviation of the row and column sums of D(v)RD(v) from 1/M.
struct BistochasticError {
  double rows = 0.0;
  double cols = 0.0;
};
BistochasticError bistochastic_error(const Mat& kernel, const Vec& scaling);

/// Sinkhorn-normalized diffusion-map approximation of exp(ε L) built on a
/// forward ensemble. Immutable after build; all queries are thread-safe.
class DiffusionMapOperator {
 public:
  /// With keep_kernel = false only the anchors and the scaling are retained,
  /// which is all that out-of-sample evaluation needs.
  static DiffusionMapOperator build(const ControlProblem& p, Mat anchors, double eps_dm,
                                    const SinkhornOptions& opts = {}, bool keep_kernel = true);

  const Mat& anchors() const { return anchors_; }
  const Mat& kernel() const { return kernel_; }
  const Vec& scaling() const { return scaling_; }
  double bandwidth() const { return eps_; }
  int sinkhorn_iterations() const { return iterations_; }
  /// Row/column-sum error of D(v)RD(v), measured at build time.
  const BistochasticError& normalization_error() const { return normalization_error_; }

  /// p(x) = D(v) r(x) / (vᵀ r(x)); non-negative and summing to one.
  Vec weights(const Vec& x) const;
  /// 𝒳̄ p(x), a convex combination of the anchors.
  Vec semigroup_apply(const Vec& x) const;
  /// (semigroup_apply(x) − x) / ε ≈ ∇·Σ(x) + Σ(x)∇log π̄(x).
  Vec grad_log_estimate(const Vec& x) const;

 private:
  DiffusionMapOperator() = default;
  double quadratic(Eigen::Index i, const Vec& x, const Mat* sigma_x, const Eigen::LLT<Mat>* pair) const;

  Mat anchors_;
  Mat kernel_;
  Vec scaling_;
  double eps_ = 0.0;
  int iterations_ = 0;
  BistochasticError normalization_error_;
  bool constant_ = false;
  MatrixField noise_;
  std::vector<Mat> sigma_;
  Eigen::LLT<Mat> constant_llt_;
};

}  // namespace mkv
