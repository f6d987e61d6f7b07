#include "mkv/kernels.hpp"

namespace mkv::reference {

Mat map_columns(const Mat& x, Eigen::Index out_rows, const ColumnMap& f) {
  Mat out(out_rows, x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) out.col(i) = f(i, x.col(i));
  return out;
}

Mat symmetric_pairwise(Eigen::Index m, const PairFunction& k) {
  Mat out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      out(i, j) = k(i, j);
      out(j, i) = out(i, j);
    }
  }
  return out;
}

Vec symmetric_matvec(const Mat& k, const Vec& v) {
  Vec y(k.cols());
  for (Eigen::Index i = 0; i < k.cols(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < k.rows(); ++j) acc += k(j, i) * v[j];
    y[i] = acc;
  }
  return y;
}

void for_each_index(Eigen::Index n, const IndexTask& f) {
  for (Eigen::Index i = 0; i < n; ++i) f(i);
}

}  // namespace mkv::reference
