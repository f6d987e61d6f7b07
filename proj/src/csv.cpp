#include "mkv/csv.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mkv::csv {

namespace {

class Row {
 public:
  explicit Row(std::ostream& os) : os_(os) { os_ << std::setprecision(std::numeric_limits<double>::max_digits10); }
  Row& operator<<(double v) {
    sep();
    os_ << v;
    return *this;
  }
  Row& cell(const std::string& s) {
    sep();
    os_ << s;
    return *this;
  }
  void end() {
    os_ << '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) os_ << ',';
    first_ = false;
  }
  std::ostream& os_;
  bool first_ = true;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

int square_root_dim(std::size_t cells) {
  // Control rows carry 1 + d² + d cells.
  for (int d = 1; d <= 1000; ++d) {
    const auto n = static_cast<std::size_t>(1 + d * d + d);
    if (n == cells) return d;
    if (n > cells) break;
  }
  throw std::invalid_argument("control.csv: header width does not match any state dimension");
}

}  // namespace

std::string matrix_label(const std::string& name, int i, int j, int dim) {
  if (dim < 10) return name + "_" + std::to_string(i) + std::to_string(j);
  return name + "_" + std::to_string(i) + "_" + std::to_string(j);
}

void write_moments(std::ostream& os, const std::vector<double>& times, const std::vector<Vec>& means,
                   const std::vector<Mat>& covs, int stride) {
  if (times.empty() || means.size() != times.size() || covs.size() != times.size()) {
    throw std::invalid_argument("write_moments: inconsistent lengths");
  }
  if (stride < 1) throw std::invalid_argument("write_moments: stride must be positive");
  const int d = static_cast<int>(means.front().size());
  Row row(os);
  row.cell("t");
  for (int i = 1; i <= d; ++i) row.cell("m_" + std::to_string(i));
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) row.cell(matrix_label("C", i, j, d));
  row.end();
  const std::size_t last = times.size() - 1;
  for (std::size_t n = 0; n <= last; ++n) {
    if (n % static_cast<std::size_t>(stride) != 0 && n != last) continue;
    row << times[n];
    for (int i = 0; i < d; ++i) row << means[n][i];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) row << covs[n](i, j);
    row.end();
  }
}

void write_control(std::ostream& os, const AffineControlSchedule& sched) {
  const int d = sched.dim_x();
  Row row(os);
  row.cell("t");
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) row.cell(matrix_label("A", i, j, d));
  for (int i = 1; i <= d; ++i) row.cell("c_" + std::to_string(i));
  row.end();
  for (std::size_t n = 0; n < sched.size(); ++n) {
    row << sched.times()[n];
    const Mat& a = sched.gain(n);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) row << a(i, j);
    for (int i = 0; i < d; ++i) row << sched.shift(n)[i];
    row.end();
  }
}

AffineControlSchedule read_control(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("control.csv: empty input");
  const auto header = split(line);
  if (header.empty() || header.front() != "t") throw std::invalid_argument("control.csv: bad header");
  const int d = square_root_dim(header.size());
  std::vector<double> times;
  std::vector<Mat> gains;
  std::vector<Vec> shifts;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("control.csv: wrong number of cells on line " + std::to_string(lineno));
    }
    std::vector<double> v(cells.size());
    try {
      for (std::size_t k = 0; k < cells.size(); ++k) v[k] = std::stod(cells[k]);
    } catch (const std::exception&) {
      throw std::invalid_argument("control.csv: unparsable number on line " + std::to_string(lineno));
    }
    times.push_back(v[0]);
    Mat a(d, d);
    Vec c(d);
    std::size_t k = 1;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = v[k++];
    for (int i = 0; i < d; ++i) c[i] = v[k++];
    gains.push_back(std::move(a));
    shifts.push_back(std::move(c));
  }
  return AffineControlSchedule(std::move(times), std::move(gains), std::move(shifts));
}

void write_trajectory(std::ostream& os, const std::vector<double>& times, const Mat& states, const Mat& controls) {
  const auto n = static_cast<Eigen::Index>(times.size());
  if (states.cols() != n || controls.cols() != n) throw std::invalid_argument("write_trajectory: inconsistent lengths");
  Row row(os);
  row.cell("t");
  for (Eigen::Index i = 1; i <= states.rows(); ++i) row.cell("x_" + std::to_string(i));
  for (Eigen::Index i = 1; i <= controls.rows(); ++i) row.cell("u_" + std::to_string(i));
  row.end();
  for (Eigen::Index k = 0; k < n; ++k) {
    row << times[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < states.rows(); ++i) row << states(i, k);
    for (Eigen::Index i = 0; i < controls.rows(); ++i) row << controls(i, k);
    row.end();
  }
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << contents;
  if (!f) throw std::runtime_error("failed writing " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace mkv::csv
