#include "helpers.hpp"
#include "mkv/csv.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mkv;
using testing::vec;

TEST_CASE("control round trip is exact") {
  std::vector<double> t{0.0, 0.1, 0.30000000000000004, 1.0 / 3.0};
  std::vector<Mat> a;
  std::vector<Vec> c;
  for (int n = 0; n < 4; ++n) {
    Mat m(2, 2);
    m << std::exp(n + 0.1), 1.0 / 7.0, 1.0 / 7.0, -std::sqrt(2.0) * n;
    a.push_back(m);
    c.push_back(vec({M_PI * n, -1e-300}));
  }
  const AffineControlSchedule s(t, a, c);
  std::stringstream ss;
  csv::write_control(ss, s);
  CHECK(ss.str().substr(0, ss.str().find('\n')) == "t,A_11,A_12,A_21,A_22,c_1,c_2");
  const AffineControlSchedule back = csv::read_control(ss);
  REQUIRE(back.size() == 4);
  for (std::size_t n = 0; n < 4; ++n) {
    CHECK(back.times()[n] == t[n]);
    CHECK(back.gain(n) == a[n]);
    CHECK(back.shift(n) == c[n]);
  }
}

TEST_CASE("moment and trajectory headers") {
  std::stringstream ss;
  csv::write_moments(ss, {0.0, 0.5, 1.0}, {vec({1, 2}), vec({1, 2}), vec({3, 4})},
                     {Mat::Identity(2, 2), Mat::Identity(2, 2), Mat::Identity(2, 2)}, 2);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "t,m_1,m_2,C_11,C_12,C_21,C_22");
  std::getline(ss, line);
  CHECK(line == "0,1,2,1,0,0,1");
  std::getline(ss, line);
  CHECK(line == "1,3,4,1,0,0,1");
  CHECK_FALSE(std::getline(ss, line));

  std::stringstream tr;
  Mat x(2, 2), u(1, 2);
  x << 0.1, 0.2, 0.3, 0.4;
  u << -1, 1;
  csv::write_trajectory(tr, {0.0, 1.0}, x, u);
  std::getline(tr, line);
  CHECK(line == "t,x_1,x_2,u_1");
  std::getline(tr, line);
  CHECK(line == "0,0.10000000000000001,0.29999999999999999,-1");

  CHECK(csv::matrix_label("C", 1, 12, 12) == "C_1_12");
}

TEST_CASE("malformed control files are rejected") {
  std::stringstream empty;
  CHECK_THROWS_AS(csv::read_control(empty), std::invalid_argument);
  std::stringstream bad_header("x,A_11,c_1\n0,1,2\n");
  CHECK_THROWS_AS(csv::read_control(bad_header), std::invalid_argument);
  std::stringstream short_row("t,A_11,c_1\n0,1\n");
  CHECK_THROWS_AS(csv::read_control(short_row), std::invalid_argument);
  std::stringstream junk("t,A_11,c_1\n0,abc,1\n");
  CHECK_THROWS_AS(csv::read_control(junk), std::invalid_argument);
}
