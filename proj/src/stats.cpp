#include "mkv/stats.hpp"

#include "mkv/errors.hpp"

#include <stdexcept>

namespace mkv {

namespace {
// Rank-one accumulation in particle order: entry (i,j) sees the same products
// as (j,i), so the result is exactly symmetric when cx == cf.
Mat centered_product(const Mat& cx, const Mat& cf) {
  Mat acc = Mat::Zero(cx.rows(), cf.rows());
  for (Eigen::Index k = 0; k < cx.cols(); ++k) acc.noalias() += cx.col(k) * cf.col(k).transpose();
  return acc / static_cast<double>(cx.cols() - 1);
}
}  // namespace

Ensemble::Ensemble(Mat particles, double time) : particles_(std::move(particles)), time_(time) {
  if (particles_.cols() < 2) throw InsufficientEnsemble(static_cast<std::size_t>(particles_.cols()));
  if (particles_.rows() < 1) throw std::invalid_argument("ensemble particles need a positive dimension");
  if (!particles_.allFinite()) throw std::invalid_argument("ensemble contains non-finite entries");
}

EmpiricalMoments moments(const Ensemble& e, double delta) { return moments(e.particles(), delta); }

EmpiricalMoments moments(const Mat& particles, double delta) {
  const auto m = particles.cols();
  if (m < 2) throw InsufficientEnsemble(static_cast<std::size_t>(m));
  if (delta < 0.0) throw std::invalid_argument("inflation must be non-negative");
  EmpiricalMoments out;
  out.mean = particles.rowwise().mean();
  const Mat centered = particles.colwise() - out.mean;
  out.cov = centered_product(centered, centered);
  out.cov.diagonal().array() += delta;
  out.inflation = delta;
  return out;
}

Mat cross_cov(const Mat& particles, const Mat& values) {
  const auto m = particles.cols();
  if (m < 2) throw InsufficientEnsemble(static_cast<std::size_t>(m));
  if (values.cols() != m) throw std::invalid_argument("cross_cov: value count differs from particle count");
  const Mat cx = particles.colwise() - particles.rowwise().mean();
  const Mat cf = values.colwise() - values.rowwise().mean();
  return centered_product(cx, cf);
}

Mat cross_cov(const Ensemble& e, const VectorField& f) {
  const Mat& x = e.particles();
  const Vec first = f(x.col(0));
  Mat values(first.size(), x.cols());
  values.col(0) = first;
  for (Eigen::Index i = 1; i < x.cols(); ++i) values.col(i) = f(x.col(i));
  return cross_cov(x, values);
}

FactoredMoments FactoredMoments::from(const EmpiricalMoments& m) { return from(m.mean, m.cov); }

FactoredMoments FactoredMoments::from(Vec mean, Mat cov) {
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) throw std::domain_error("covariance is not positive definite");
  FactoredMoments out;
  out.precision = llt.solve(Mat::Identity(cov.rows(), cov.cols()));
  out.precision = 0.5 * (out.precision + out.precision.transpose()).eval();
  out.mean = std::move(mean);
  out.cov = std::move(cov);
  return out;
}

}  // namespace mkv
