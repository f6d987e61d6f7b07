#include "mkv/enkf.hpp"

#include <stdexcept>

namespace mkv {

RunningCoupling RunningCoupling::from(const ControlProblem& p, const Mat& particles) {
  Mat h(p.dim_h(), particles.cols());
  for (Eigen::Index i = 0; i < particles.cols(); ++i) h.col(i) = p.running_map(particles.col(i));
  return {cross_cov(particles, h), h.rowwise().mean()};
}

Vec g_bar_kf(const ControlProblem& p, const Vec& x, const Mat& cxh, const Vec& mh) {
  if (cxh.rows() != p.dim_x() || cxh.cols() != p.dim_h() || mh.size() != p.dim_h()) {
    throw std::invalid_argument("g_bar_kf: inconsistent shapes");
  }
  return 0.5 * cxh * p.solve_running(Vec(p.running_map(x) + mh));
}

Vec gaussian_score_term(const ControlProblem& p, const Vec& x, const FactoredMoments& m) {
  return p.div_sigma(x) - p.diffusion(x) * (m.precision * (x - m.mean));
}

Vec forward_drift_from_score(const ControlProblem& p, const Vec& x, const Vec& score, const Mat& cxh, const Vec& mh,
                             double eps_noise) {
  return p.drift(x) - 0.5 * (1.0 - eps_noise) * score - g_bar_kf(p, x, cxh, mh);
}

Vec forward_drift(const ControlProblem& p, const Vec& x, const FactoredMoments& bar, const Mat& cxh, const Vec& mh,
                  double eps_noise) {
  return forward_drift_from_score(p, x, gaussian_score_term(p, x, bar), cxh, mh, eps_noise);
}

Ensemble terminal_update(const ControlProblem& p, const Ensemble& e, const Mat& perturbations) {
  const Mat& x = e.particles();
  const auto m = x.cols();
  if (perturbations.rows() != p.dim_xi() || perturbations.cols() != m) {
    throw std::invalid_argument("terminal_update: perturbations must be d_xi x M");
  }
  Mat xi(p.dim_xi(), m);
  for (Eigen::Index i = 0; i < m; ++i) xi.col(i) = p.terminal_map(x.col(i));
  const Mat cxxi = cross_cov(x, xi);
  const Mat cxixi = cross_cov(xi, xi);
  const Mat innovation_cov = cxixi + p.terminal_weight();
  Eigen::LLT<Mat> llt(innovation_cov);
  if (llt.info() != Eigen::Success) throw std::domain_error("terminal_update: C^xixi + V not positive definite");
  const Mat innovations = xi + p.terminal_weight_sqrt() * perturbations;
  // K y with K = C^{xξ}(C^{ξξ}+V)⁻¹.
  Mat updated = x - cxxi * llt.solve(innovations);
  return Ensemble(std::move(updated), e.time());
}

Ensemble terminal_update(const ControlProblem& p, const Ensemble& e, const CounterRng& rng) {
  Mat noise(p.dim_xi(), e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) rng.normals(0, static_cast<std::uint64_t>(i), noise.col(i));
  return terminal_update(p, e, noise);
}

GainPair gain_from_moments(const FactoredMoments& bar, const FactoredMoments& tilde) {
  GainPair g;
  g.A = bar.precision - tilde.precision;
  g.A = 0.5 * (g.A + g.A.transpose()).eval();
  g.c = tilde.precision * tilde.mean - bar.precision * bar.mean;
  return g;
}

TildeCoupling::TildeCoupling(const ControlProblem& p, const FactoredMoments& tilde, const GainPair& gain,
                             double gamma)
    : gain_(gain.A) {
  const Mat w = p.diffusion(tilde.mean) - p.control_diffusion(tilde.mean);
  const Mat inner = gamma * Mat::Identity(p.dim_x(), p.dim_x()) + gain.A * w;
  factor_ = 0.5 * tilde.cov * inner;
  offset_ = gain.A * tilde.mean + 2.0 * gain.c;
}

Vec g_tilde_kf(const ControlProblem& p, const Vec& x, const FactoredMoments& tilde, const GainPair& gain) {
  const Mat w = p.diffusion(tilde.mean) - p.control_diffusion(tilde.mean);
  return 0.5 * tilde.cov * gain.A * w * (gain.A * x + gain.A * tilde.mean + 2.0 * gain.c);
}

Vec reverse_drift(const ControlProblem& p, const Vec& x, const FactoredMoments& bar, const FactoredMoments& tilde,
                  const TildeCoupling& g_tilde, double eps_noise) {
  return -p.drift(x) + gaussian_score_term(p, x, bar) - 0.5 * (1.0 - eps_noise) * gaussian_score_term(p, x, tilde) -
         g_tilde(x);
}

Vec reverse_drift(const ControlProblem& p, const Vec& x, const FactoredMoments& bar, const FactoredMoments& tilde,
                  const GainPair& gain, double eps_noise) {
  return reverse_drift(p, x, bar, tilde, TildeCoupling(p, tilde, gain), eps_noise);
}

}  // namespace mkv
