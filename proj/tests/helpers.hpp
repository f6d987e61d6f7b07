#pragma once

#include "mkv/problem.hpp"
#include "mkv/scenarios.hpp"

#include <initializer_list>

namespace testing {

inline mkv::Vec vec(std::initializer_list<double> v) {
  mkv::Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline mkv::Mat scalar(double v) { return mkv::Mat::Constant(1, 1, v); }

/// Row vector of scalar particles.
inline mkv::Mat row(std::initializer_list<double> v) { return vec(v).transpose(); }

/// Scalar problem with b = a·x and everything else from lq_spec.
inline mkv::ControlProblem linear_problem(double a = -0.5) { return mkv::ControlProblem(mkv::lq_spec(a)); }

}  // namespace testing
