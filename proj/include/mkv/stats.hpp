#pragma once

#include "mkv/types.hpp"

namespace mkv {

/// M particles stored as the columns of a d_x × M matrix.
class Ensemble {
 public:
  Ensemble(Mat particles, double time);

  const Mat& particles() const { return particles_; }
  Eigen::Index size() const { return particles_.cols(); }
  Eigen::Index dim() const { return particles_.rows(); }
  double time() const { return time_; }

 private:
  Mat particles_;
  double time_;
};

/// Empirical mean and δ-inflated covariance (1/(M−1) normalization).
struct EmpiricalMoments {
  Vec mean;
  Mat cov;
  double inflation = 0.0;
};

EmpiricalMoments moments(const Ensemble& e, double delta);
EmpiricalMoments moments(const Mat& particles, double delta);

/// (1/(M−1)) Σ (Xⁱ−m)(f(Xⁱ)−m^f)ᵀ, no inflation.
Mat cross_cov(const Ensemble& e, const VectorField& f);
/// Same, with f already evaluated column-wise.
Mat cross_cov(const Mat& particles, const Mat& values);

/// Moments together with the precision C⁻¹, computed once from a Cholesky factor.
struct FactoredMoments {
  Vec mean;
  Mat cov;
  Mat precision;

  /// Throws std::domain_error when cov is not positive definite.
  static FactoredMoments from(const EmpiricalMoments& m);
  static FactoredMoments from(Vec mean, Mat cov);
};

}  // namespace mkv
