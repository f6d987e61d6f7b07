#include "mkv/dmap.hpp"

#include "mkv/errors.hpp"
#include "mkv/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace mkv {

namespace {

Eigen::LLT<Mat> pair_factor(const Mat& s, std::size_t i, std::size_t j) {
  Eigen::LLT<Mat> llt(s);
  if (llt.info() != Eigen::Success) throw FullRankViolation(i, j);
  // LLT succeeds on some numerically singular inputs; reject those too.
  const Vec d = llt.matrixLLT().diagonal();
  if (d.minCoeff() <= 1e-12 * std::max(1.0, d.maxCoeff())) throw FullRankViolation(i, j);
  return llt;
}

void check_eps(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("diffusion-map bandwidth must be positive");
}

}  // namespace

SinkhornResult sinkhorn(const Mat& kernel, const SinkhornOptions& opts) {
  const Eigen::Index m = kernel.rows();
  if (m < 2 || kernel.cols() != m) throw std::invalid_argument("sinkhorn needs a square kernel of size >= 2");
  const double target = 1.0 / static_cast<double>(m);

  SinkhornResult out;
  Vec v = kernel.rowwise().sum().cwiseInverse().cwiseSqrt() / std::sqrt(static_cast<double>(m));
  for (int it = 0;; ++it) {
    const Vec rv = kernels::symmetric_matvec(kernel, v);
    const double residual = (v.cwiseProduct(rv).array() - target).abs().maxCoeff();
    if (opts.keep_history) out.history.push_back(residual);
    if (residual <= opts.tol) {
      out.scaling = std::move(v);
      out.iterations = it;
      out.residual = residual;
      return out;
    }
    if (it >= opts.max_iter) throw ConvergenceFailure("sinkhorn did not converge", residual);
    v = (v.array() / (static_cast<double>(m) * rv.array())).sqrt().matrix();
  }
}

BistochasticError bistochastic_error(const Mat& kernel, const Vec& scaling) {
  const double target = 1.0 / static_cast<double>(kernel.rows());
  const Mat p = scaling.asDiagonal() * kernel * scaling.asDiagonal();
  return {(p.rowwise().sum().array() - target).abs().maxCoeff(),
          (p.colwise().sum().array() - target).abs().maxCoeff()};
}

Mat build_kernel(const Mat& anchors, const std::vector<Mat>& sigma_at_anchors, double eps_dm) {
  check_eps(eps_dm);
  const Eigen::Index m = anchors.cols();
  if (m < 2) throw InsufficientEnsemble(static_cast<std::size_t>(m));
  if (static_cast<Eigen::Index>(sigma_at_anchors.size()) != m) {
    throw std::invalid_argument("build_kernel: one Sigma per anchor required");
  }
  return kernels::symmetric_pairwise(m, [&](Eigen::Index i, Eigen::Index j) {
    if (i == j) return 1.0;
    const auto llt = pair_factor(sigma_at_anchors[i] + sigma_at_anchors[j], static_cast<std::size_t>(i),
                                 static_cast<std::size_t>(j));
    const Vec d = anchors.col(i) - anchors.col(j);
    return std::exp(-d.dot(llt.solve(d)) / (2.0 * eps_dm));
  });
}

Mat build_kernel(const Mat& anchors, const Mat& sigma, double eps_dm) {
  check_eps(eps_dm);
  const Eigen::Index m = anchors.cols();
  if (m < 2) throw InsufficientEnsemble(static_cast<std::size_t>(m));
  const auto llt = pair_factor(2.0 * sigma, 0, 1);
  return kernels::symmetric_pairwise(m, [&](Eigen::Index i, Eigen::Index j) {
    if (i == j) return 1.0;
    const Vec d = anchors.col(i) - anchors.col(j);
    return std::exp(-d.dot(llt.solve(d)) / (2.0 * eps_dm));
  });
}

DiffusionMapOperator DiffusionMapOperator::build(const ControlProblem& p, Mat anchors, double eps_dm,
                                                 const SinkhornOptions& opts, bool keep_kernel) {
  check_eps(eps_dm);
  if (anchors.rows() != p.dim_x()) throw std::invalid_argument("anchors have the wrong dimension");
  DiffusionMapOperator op;
  op.eps_ = eps_dm;
  op.constant_ = p.constant_noise();
  op.noise_ = p.spec().noise;
  if (op.constant_) {
    const Mat sigma = p.diffusion(anchors.col(0));
    op.kernel_ = build_kernel(anchors, sigma, eps_dm);
    op.constant_llt_ = pair_factor(2.0 * sigma, 0, 0);
  } else {
    op.sigma_.reserve(static_cast<std::size_t>(anchors.cols()));
    for (Eigen::Index i = 0; i < anchors.cols(); ++i) op.sigma_.push_back(p.diffusion(anchors.col(i)));
    op.kernel_ = build_kernel(anchors, op.sigma_, eps_dm);
  }
  auto sk = sinkhorn(op.kernel_, opts);
  op.scaling_ = std::move(sk.scaling);
  op.iterations_ = sk.iterations;
  op.normalization_error_ = bistochastic_error(op.kernel_, op.scaling_);
  if (!keep_kernel) op.kernel_.resize(0, 0);
  op.anchors_ = std::move(anchors);
  return op;
}

double DiffusionMapOperator::quadratic(Eigen::Index i, const Vec& x, const Mat* sigma_x,
                                       const Eigen::LLT<Mat>* pair) const {
  const Vec d = anchors_.col(i) - x;
  if (pair != nullptr) return d.dot(pair->solve(d));
  const auto llt = pair_factor(sigma_[static_cast<std::size_t>(i)] + *sigma_x, static_cast<std::size_t>(i),
                               static_cast<std::size_t>(i));
  return d.dot(llt.solve(d));
}

Vec DiffusionMapOperator::weights(const Vec& x) const {
  const Eigen::Index m = anchors_.cols();
  Mat sigma_x;
  if (!constant_) {
    const Mat s = noise_(x);
    sigma_x = s * s.transpose();
  }
  // Work in logs so that far-away queries still pick out the nearest anchor.
  Vec logw(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double q = quadratic(i, x, constant_ ? nullptr : &sigma_x, constant_ ? &constant_llt_ : nullptr);
    logw[i] = std::log(scaling_[i]) - q / (2.0 * eps_);
  }
  const double top = logw.maxCoeff();
  Vec w = (logw.array() - top).exp().matrix();
  return w / w.sum();
}

Vec DiffusionMapOperator::semigroup_apply(const Vec& x) const { return anchors_ * weights(x); }

Vec DiffusionMapOperator::grad_log_estimate(const Vec& x) const { return (semigroup_apply(x) - x) / eps_; }

}  // namespace mkv
