#pragma once

// Data-parallel building blocks. Every kernel here has a plain-loop twin in
// mkv::reference with identical arithmetic per output element, so the OpenMP
// versions are bitwise reproducible against it for any thread count.

#include "mkv/types.hpp"

#include <functional>

namespace mkv {

using ColumnMap = std::function<Vec(Eigen::Index, const Vec&)>;
using PairFunction = std::function<double(Eigen::Index, Eigen::Index)>;
using IndexTask = std::function<void(Eigen::Index)>;

/// Caps the OpenMP team size from MKV_THREADS when set; returns the cap in use.
int configure_threads_from_env();
int max_threads();

namespace kernels {

/// out.col(i) = f(i, x.col(i)); parallel over columns.
Mat map_columns(const Mat& x, Eigen::Index out_rows, const ColumnMap& f);

/// Symmetric m × m matrix with K(i,j) = k(i,j) for i ≤ j; parallel over rows.
Mat symmetric_pairwise(Eigen::Index m, const PairFunction& k);

/// y = K v for symmetric K; parallel over rows.
Vec symmetric_matvec(const Mat& k, const Vec& v);

/// Runs f(0), ..., f(n-1); tasks must write to disjoint outputs.
void for_each_index(Eigen::Index n, const IndexTask& f);

}  // namespace kernels

namespace reference {

Mat map_columns(const Mat& x, Eigen::Index out_rows, const ColumnMap& f);
Mat symmetric_pairwise(Eigen::Index m, const PairFunction& k);
Vec symmetric_matvec(const Mat& k, const Vec& v);
void for_each_index(Eigen::Index n, const IndexTask& f);

}  // namespace reference

}  // namespace mkv
