#pragma once

#include <Eigen/Dense>

#include <functional>

namespace mkv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using VectorField = std::function<Vec(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;

}  // namespace mkv
