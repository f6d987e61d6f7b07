#pragma once

#include "mkv/problem.hpp"
#include "mkv/rng.hpp"
#include "mkv/stats.hpp"

namespace mkv {

/// Affine approximation ∇log v(x) ≈ A x + c.
struct GainPair {
  Mat A;
  Vec c;
};

/// C^{xh} and m^h of an ensemble: the running-cost coupling of the forward drift.
struct RunningCoupling {
  Mat cxh;
  Vec mh;

  static RunningCoupling from(const ControlProblem& p, const Mat& particles);
};

/// ½ C^{xh} S⁻¹ (h(x) + m^h).
Vec g_bar_kf(const ControlProblem& p, const Vec& x, const Mat& cxh, const Vec& mh);

/// Gaussian closure of ∇·Σ + Σ∇log π: ∇·Σ(x) − Σ(x) C⁻¹(x − m).
Vec gaussian_score_term(const ControlProblem& p, const Vec& x, const FactoredMoments& m);

/// b(x) − ((1−ε)/2)·score − ḡ(x), for any estimate `score` of ∇·Σ + Σ∇log π̄.
Vec forward_drift_from_score(const ControlProblem& p, const Vec& x, const Vec& score, const Mat& cxh, const Vec& mh,
                             double eps_noise);

/// EnKF forward drift with the Gaussian score term.
Vec forward_drift(const ControlProblem& p, const Vec& x, const FactoredMoments& bar, const Mat& cxh, const Vec& mh,
                  double eps_noise);

/// Stochastic EnKF map X̄_T → X̃_T under the terminal cost. Draws Ξⁱ from `rng`
/// at counter (0, i).
Ensemble terminal_update(const ControlProblem& p, const Ensemble& e, const CounterRng& rng);
/// Same with caller-supplied perturbations (d_ξ × M).
Ensemble terminal_update(const ControlProblem& p, const Ensemble& e, const Mat& perturbations);

/// A = C̄⁻¹ − C̃⁻¹ (symmetrized), c = C̃⁻¹m̃ − C̄⁻¹m̄.
GainPair gain_from_moments(const FactoredMoments& bar, const FactoredMoments& tilde);

/// g̃ with Σ and G frozen at m̃; the matrix factor and offset are computed once
/// per step and shared by every particle:
///   g̃(x) = ½ C̃ {γI + A(Σ(m̃) − G R Gᵀ(m̃))} (A x + A m̃ + 2c).
/// γ = 0 is the finite-horizon drift.
class TildeCoupling {
 public:
  TildeCoupling(const ControlProblem& p, const FactoredMoments& tilde, const GainPair& gain, double gamma = 0.0);

  Vec operator()(const Vec& x) const { return factor_ * (gain_ * x + offset_); }
  const Mat& factor() const { return factor_; }

 private:
  Mat factor_;
  Mat gain_;
  Vec offset_;
};

Vec g_tilde_kf(const ControlProblem& p, const Vec& x, const FactoredMoments& tilde, const GainPair& gain);

/// Reverse drift f̃; the sweep steps X̃_{n−1} = X̃_n + Δt f̃(X̃_n) + √(εΔt) σ Ξ.
Vec reverse_drift(const ControlProblem& p, const Vec& x, const FactoredMoments& bar, const FactoredMoments& tilde,
                  const TildeCoupling& g_tilde, double eps_noise);
Vec reverse_drift(const ControlProblem& p, const Vec& x, const FactoredMoments& bar, const FactoredMoments& tilde,
                  const GainPair& gain, double eps_noise);

}  // namespace mkv
