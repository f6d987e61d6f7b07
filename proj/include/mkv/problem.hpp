#pragma once

#include "mkv/types.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace mkv {

/// Raw problem data for dX = b(X)dt + G(X)u dt + σ(X)dB with cost
/// ∫ ½hᵀS⁻¹h + ½uᵀR⁻¹u dt + ½ξᵀV⁻¹ξ at T.
struct ProblemSpec {
  int dim_x = 1;
  int dim_u = 1;
  int dim_b = 1;
  int dim_h = 1;
  int dim_xi = 1;

  VectorField drift;
  MatrixField gain;
  MatrixField noise;
  /// When σ is constant the divergence of Σ vanishes and this may stay empty.
  bool constant_noise = false;
  VectorField div_sigma;

  VectorField running_map;
  Mat running_weight;
  VectorField terminal_map;
  Mat terminal_weight;
  Mat control_weight;

  double horizon = 1.0;
  Vec start;
  /// Covariance of the initial ensemble around `start`; zero means a point start.
  std::optional<Mat> start_cov;
};

/// Immutable, validated control problem. Every weight matrix is held with its
/// Cholesky factor; quadratic forms are evaluated by solves.
class ControlProblem {
 public:
  explicit ControlProblem(ProblemSpec spec);

  int dim_x() const { return spec_.dim_x; }
  int dim_u() const { return spec_.dim_u; }
  int dim_b() const { return spec_.dim_b; }
  int dim_h() const { return spec_.dim_h; }
  int dim_xi() const { return spec_.dim_xi; }
  double horizon() const { return spec_.horizon; }
  const Vec& start() const { return spec_.start; }
  const Mat& start_cov() const { return start_cov_; }
  bool constant_noise() const { return spec_.constant_noise; }

  Vec drift(const Vec& x) const;
  Mat gain(const Vec& x) const;
  Mat noise(const Vec& x) const;
  /// Σ(x) = σ(x)σ(x)ᵀ.
  Mat diffusion(const Vec& x) const;
  Vec div_sigma(const Vec& x) const;
  Vec running_map(const Vec& x) const;
  Vec terminal_map(const Vec& x) const;

  const Mat& running_weight() const { return spec_.running_weight; }
  const Mat& terminal_weight() const { return spec_.terminal_weight; }
  const Mat& control_weight() const { return spec_.control_weight; }
  /// Symmetric square root V^{1/2}.
  const Mat& terminal_weight_sqrt() const { return terminal_sqrt_; }

  /// S⁻¹ y, V⁻¹ y, R⁻¹ y via the stored factorizations.
  Vec solve_running(const Vec& y) const;
  Mat solve_running(const Mat& y) const;
  Vec solve_terminal(const Vec& y) const;
  Vec solve_control(const Vec& y) const;

  /// G(x) R G(x)ᵀ.
  Mat control_diffusion(const Vec& x) const;

  double running_cost(const Vec& x) const;
  double terminal_cost(const Vec& x) const;
  /// ½ uᵀR⁻¹u.
  double control_cost(const Vec& u) const;

  const ProblemSpec& spec() const { return spec_; }

 private:
  void check_state(const Vec& x) const;

  ProblemSpec spec_;
  Eigen::LLT<Mat> running_llt_;
  Eigen::LLT<Mat> terminal_llt_;
  Eigen::LLT<Mat> control_llt_;
  Mat terminal_sqrt_;
  Mat start_cov_;
};

/// Piecewise-constant affine feedback schedule u_t(x) = R G(x)ᵀ(A_t x + c_t).
class AffineControlSchedule {
 public:
  AffineControlSchedule(std::vector<double> times, std::vector<Mat> gains, std::vector<Vec> shifts);

  /// All-zero schedule on a uniform grid with `steps` intervals over [0, horizon].
  static AffineControlSchedule zero(double horizon, std::size_t steps, int dim_x);

  /// Index n with t ∈ [t_n, t_{n+1}); the last index at t = T.
  std::size_t index_at(double t) const;

  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const Mat& gain(std::size_t n) const { return gains_.at(n); }
  const Vec& shift(std::size_t n) const { return shifts_.at(n); }
  double horizon() const { return times_.back(); }
  int dim_x() const { return static_cast<int>(shifts_.front().size()); }

 private:
  std::vector<double> times_;
  std::vector<Mat> gains_;
  std::vector<Vec> shifts_;
};

/// R G(x)ᵀ (A_t x + c_t).
Vec apply_control(const ControlProblem& p, const AffineControlSchedule& sched, double t, const Vec& x);

}  // namespace mkv
