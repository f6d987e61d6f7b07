#pragma once

#include "mkv/problem.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mkv::csv {

/// `t,m_1..m_d,C_11..C_dd` (C row-major), every `stride`-th row plus the last.
void write_moments(std::ostream& os, const std::vector<double>& times, const std::vector<Vec>& means,
                   const std::vector<Mat>& covs, int stride = 1);

/// `t,A_11..A_dd,c_1..c_d`, one row per schedule entry.
void write_control(std::ostream& os, const AffineControlSchedule& sched);
AffineControlSchedule read_control(std::istream& is);

/// `t,x_1..x_d,u_1..u_k`.
void write_trajectory(std::ostream& os, const std::vector<double>& times, const Mat& states, const Mat& controls);

/// Header cell for a matrix entry, e.g. C_12 (C_1_12 once d ≥ 10).
std::string matrix_label(const std::string& name, int i, int j, int dim);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace mkv::csv
