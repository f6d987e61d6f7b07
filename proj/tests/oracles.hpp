#pragma once
// Independent reference solutions for the scalar linear-quadratic problem
// dX = aX dt + u dt + dB, running cost ½x², terminal cost ½x², R = 1.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

inline double rk4(const std::function<double(double)>& f, double y, double h) {
  const double k1 = f(y);
  const double k2 = f(y + 0.5 * h * k1);
  const double k3 = f(y + 0.5 * h * k2);
  const double k4 = f(y + h * k3);
  return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

/// Value-function curvature P(t_n), t_n = nT/N, from −Ṗ = 2aP + 1 − P², P(T) = 1.
/// The optimal gain is A_t = −P(t).
inline std::vector<double> riccati_on_grid(double a, double horizon, std::size_t steps, int substeps = 64) {
  std::vector<double> p(steps + 1);
  const double h = horizon / static_cast<double>(steps) / substeps;
  auto rhs = [a](double v) { return 2 * a * v + 1 - v * v; };
  double v = 1.0;
  p[steps] = v;
  for (std::size_t n = steps; n-- > 0;) {
    for (int k = 0; k < substeps; ++k) v = rk4(rhs, v, h);
    p[n] = v;
  }
  return p;
}

/// Positive root of P² + (γ − 2a)P − 1 = 0 by bisection.
inline double stationary_riccati(double a, double gamma) {
  auto f = [&](double v) { return v * v + (gamma - 2 * a) * v - 1; };
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) < 0) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Closed moment equations of the forward EnKF dynamics with ε = 0:
///   ṁ = (a − C) m,  Ċ = 2aC + C/(C + δ) − C².
/// Integrated with dense RK4 from (m0, C0) at t0; values at t0 + k·dt.
inline std::pair<std::vector<double>, std::vector<double>> lq_moments(double a, double delta, double m0, double c0,
                                                                      double dt, std::size_t steps,
                                                                      int substeps = 64) {
  std::vector<double> m(steps + 1), c(steps + 1);
  m[0] = m0;
  c[0] = c0;
  const double h = dt / substeps;
  double mv = m0, cv = c0;
  for (std::size_t n = 0; n < steps; ++n) {
    for (int k = 0; k < substeps; ++k) {
      // Coupled RK4 on (m, C).
      auto fm = [&](double mm, double cc) { return (a - cc) * mm; };
      auto fc = [&](double cc) { return 2 * a * cc + cc / (cc + delta) - cc * cc; };
      const double km1 = fm(mv, cv), kc1 = fc(cv);
      const double km2 = fm(mv + 0.5 * h * km1, cv + 0.5 * h * kc1), kc2 = fc(cv + 0.5 * h * kc1);
      const double km3 = fm(mv + 0.5 * h * km2, cv + 0.5 * h * kc2), kc3 = fc(cv + 0.5 * h * kc2);
      const double km4 = fm(mv + h * km3, cv + h * kc3), kc4 = fc(cv + h * kc3);
      mv += h / 6 * (km1 + 2 * km2 + 2 * km3 + km4);
      cv += h / 6 * (kc1 + 2 * kc2 + 2 * kc3 + kc4);
    }
    m[n + 1] = mv;
    c[n + 1] = cv;
  }
  return {m, c};
}

/// Stationary density of dX = −(X³ − X)dt + dB is ∝ exp(x² − x⁴/2); returns
/// its mass on |x| > r by trapezoidal quadrature.
inline double langevin_tail_mass(double r) {
  const double lim = 4.0;
  const int n = 400000;
  const double h = 2 * lim / n;
  double total = 0, tail = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = -lim + i * h;
    const double w = (i == 0 || i == n ? 0.5 : 1.0) * std::exp(x * x - 0.5 * x * x * x * x);
    total += w;
    if (std::abs(x) > r) tail += w;
  }
  return tail / total;
}

}  // namespace oracle
