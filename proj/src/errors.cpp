#include "mkv/errors.hpp"

#include <sstream>

namespace mkv {

InsufficientEnsemble::InsufficientEnsemble(std::size_t size)
    : std::invalid_argument("ensemble needs at least 2 particles, got " + std::to_string(size)) {}

namespace {
std::string blowup_message(const std::string& what, std::size_t step, double time, std::ptrdiff_t particle) {
  std::ostringstream os;
  os << what << " at step " << step << " (t=" << time << ")";
  if (particle >= 0) os << ", particle " << particle;
  return os.str();
}
}  // namespace

NumericalBlowup::NumericalBlowup(const std::string& what, std::size_t step, double time, std::ptrdiff_t particle)
    : std::runtime_error(blowup_message(what, step, time, particle)), step_(step), time_(time), particle_(particle) {}

ConvergenceFailure::ConvergenceFailure(const std::string& what, double residual)
    : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

FullRankViolation::FullRankViolation(std::size_t i, std::size_t j)
    : std::runtime_error("Sigma(X_" + std::to_string(i) + ") + Sigma(X_" + std::to_string(j) +
                         ") is singular; the diffusion-map backend needs full-rank noise"),
      i_(i),
      j_(j) {}

}  // namespace mkv
