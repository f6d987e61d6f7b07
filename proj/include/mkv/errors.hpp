#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mkv {

/// Fewer than two particles: covariances are undefined.
class InsufficientEnsemble : public std::invalid_argument {
 public:
  explicit InsufficientEnsemble(std::size_t size);
};

/// A drift or particle update produced a non-finite value.
class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(const std::string& what, std::size_t step, double time, std::ptrdiff_t particle);

  std::size_t step() const { return step_; }
  double time() const { return time_; }
  /// -1 when the failure is not attributable to a single particle.
  std::ptrdiff_t particle() const { return particle_; }

 private:
  std::size_t step_;
  double time_;
  std::ptrdiff_t particle_;
};

/// An iterative scheme hit its iteration or time cap.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, double residual);
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Σ(Xⁱ)+Σ(Xʲ) is singular, so the diffusion-map kernel is undefined.
class FullRankViolation : public std::runtime_error {
 public:
  FullRankViolation(std::size_t i, std::size_t j);
  std::size_t first() const { return i_; }
  std::size_t second() const { return j_; }

 private:
  std::size_t i_;
  std::size_t j_;
};

}  // namespace mkv
