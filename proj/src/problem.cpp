#include "mkv/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mkv {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Eigen::LLT<Mat> spd_factor(const Mat& m, int dim, const char* name) {
  require(m.rows() == dim && m.cols() == dim, std::string(name) + " has the wrong shape");
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()),
          std::string(name) + " is not symmetric");
  Eigen::LLT<Mat> llt(m);
  require(llt.info() == Eigen::Success, std::string(name) + " is not positive definite");
  return llt;
}

}  // namespace

ControlProblem::ControlProblem(ProblemSpec spec) : spec_(std::move(spec)) {
  require(spec_.dim_x > 0 && spec_.dim_u > 0 && spec_.dim_b > 0 && spec_.dim_h > 0 && spec_.dim_xi > 0,
          "all dimensions must be positive");
  require(spec_.drift && spec_.gain && spec_.noise && spec_.running_map && spec_.terminal_map,
          "drift, gain, noise, running_map and terminal_map are required");
  require(spec_.horizon > 0.0, "horizon must be positive");
  require(spec_.start.size() == spec_.dim_x, "start has the wrong dimension");
  if (!spec_.div_sigma) {
    require(spec_.constant_noise, "div_sigma must be supplied for state-dependent noise");
    const int d = spec_.dim_x;
    spec_.div_sigma = [d](const Vec&) { return Vec::Zero(d); };
  }

  running_llt_ = spd_factor(spec_.running_weight, spec_.dim_h, "running weight S");
  terminal_llt_ = spd_factor(spec_.terminal_weight, spec_.dim_xi, "terminal weight V");
  control_llt_ = spd_factor(spec_.control_weight, spec_.dim_u, "control weight R");

  Eigen::SelfAdjointEigenSolver<Mat> eig(spec_.terminal_weight);
  terminal_sqrt_ = eig.operatorSqrt();

  start_cov_ = spec_.start_cov.value_or(Mat::Zero(spec_.dim_x, spec_.dim_x));
  require(start_cov_.rows() == spec_.dim_x && start_cov_.cols() == spec_.dim_x, "start_cov has the wrong shape");

  // Probe the user fields once at the start point for declared shapes.
  const Vec& x = spec_.start;
  require(spec_.drift(x).size() == spec_.dim_x, "drift returns the wrong dimension");
  const Mat g = spec_.gain(x);
  require(g.rows() == spec_.dim_x && g.cols() == spec_.dim_u, "gain returns the wrong shape");
  const Mat s = spec_.noise(x);
  require(s.rows() == spec_.dim_x && s.cols() == spec_.dim_b, "noise returns the wrong shape");
  require(spec_.div_sigma(x).size() == spec_.dim_x, "div_sigma returns the wrong dimension");
  require(spec_.running_map(x).size() == spec_.dim_h, "running_map returns the wrong dimension");
  require(spec_.terminal_map(x).size() == spec_.dim_xi, "terminal_map returns the wrong dimension");
}

void ControlProblem::check_state(const Vec& x) const {
  if (x.size() != spec_.dim_x) {
    throw std::invalid_argument("state has dimension " + std::to_string(x.size()) + ", expected " +
                                std::to_string(spec_.dim_x));
  }
}

Vec ControlProblem::drift(const Vec& x) const { return spec_.drift(x); }
Mat ControlProblem::gain(const Vec& x) const { return spec_.gain(x); }
Mat ControlProblem::noise(const Vec& x) const { return spec_.noise(x); }

Mat ControlProblem::diffusion(const Vec& x) const {
  const Mat s = spec_.noise(x);
  return s * s.transpose();
}

Vec ControlProblem::div_sigma(const Vec& x) const { return spec_.div_sigma(x); }
Vec ControlProblem::running_map(const Vec& x) const { return spec_.running_map(x); }
Vec ControlProblem::terminal_map(const Vec& x) const { return spec_.terminal_map(x); }

Vec ControlProblem::solve_running(const Vec& y) const { return running_llt_.solve(y); }
Mat ControlProblem::solve_running(const Mat& y) const { return running_llt_.solve(y); }
Vec ControlProblem::solve_terminal(const Vec& y) const { return terminal_llt_.solve(y); }
Vec ControlProblem::solve_control(const Vec& y) const { return control_llt_.solve(y); }

Mat ControlProblem::control_diffusion(const Vec& x) const {
  const Mat g = spec_.gain(x);
  return g * spec_.control_weight * g.transpose();
}

double ControlProblem::running_cost(const Vec& x) const {
  check_state(x);
  const Vec h = spec_.running_map(x);
  return std::max(0.0, 0.5 * h.dot(running_llt_.solve(h)));
}

double ControlProblem::terminal_cost(const Vec& x) const {
  check_state(x);
  const Vec xi = spec_.terminal_map(x);
  return std::max(0.0, 0.5 * xi.dot(terminal_llt_.solve(xi)));
}

double ControlProblem::control_cost(const Vec& u) const {
  if (u.size() != spec_.dim_u) throw std::invalid_argument("control has the wrong dimension");
  return std::max(0.0, 0.5 * u.dot(control_llt_.solve(u)));
}

AffineControlSchedule::AffineControlSchedule(std::vector<double> times, std::vector<Mat> gains,
                                             std::vector<Vec> shifts)
    : times_(std::move(times)), gains_(std::move(gains)), shifts_(std::move(shifts)) {
  require(!times_.empty(), "schedule needs at least one grid point");
  require(gains_.size() == times_.size() && shifts_.size() == times_.size(),
          "schedule gains/shifts/times lengths differ");
  for (std::size_t n = 1; n < times_.size(); ++n) {
    require(times_[n] > times_[n - 1], "schedule times must be strictly increasing");
  }
  const auto d = shifts_.front().size();
  for (std::size_t n = 0; n < times_.size(); ++n) {
    require(gains_[n].rows() == d && gains_[n].cols() == d && shifts_[n].size() == d,
            "schedule entry has inconsistent dimension");
    const double scale = std::max(1.0, gains_[n].cwiseAbs().maxCoeff());
    require((gains_[n] - gains_[n].transpose()).cwiseAbs().maxCoeff() <= 1e-9 * scale,
            "schedule gain is not symmetric");
  }
}

AffineControlSchedule AffineControlSchedule::zero(double horizon, std::size_t steps, int dim_x) {
  require(steps > 0, "zero schedule needs at least one step");
  std::vector<double> t(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) t[n] = horizon * static_cast<double>(n) / static_cast<double>(steps);
  t.back() = horizon;
  return AffineControlSchedule(std::move(t), std::vector<Mat>(steps + 1, Mat::Zero(dim_x, dim_x)),
                               std::vector<Vec>(steps + 1, Vec::Zero(dim_x)));
}

std::size_t AffineControlSchedule::index_at(double t) const {
  if (!(t >= times_.front() && t <= times_.back())) {
    throw std::out_of_range("time " + std::to_string(t) + " outside the schedule range");
  }
  // Last grid point with times_[n] <= t.
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
}

Vec apply_control(const ControlProblem& p, const AffineControlSchedule& sched, double t, const Vec& x) {
  if (x.size() != p.dim_x()) throw std::invalid_argument("state has the wrong dimension");
  if (t < 0.0 || t > p.horizon()) throw std::out_of_range("control time outside [0, T]");
  const std::size_t n = sched.index_at(t);
  return p.control_weight() * p.gain(x).transpose() * (sched.gain(n) * x + sched.shift(n));
}

}  // namespace mkv
