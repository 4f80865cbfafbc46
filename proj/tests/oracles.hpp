#ifndef IONFLUX_TESTS_ORACLES_HPP
#define IONFLUX_TESTS_ORACLES_HPP

/**
 * @file oracles.hpp
 * @brief Reference numerics used only by the test suite.
 *
 * Everything here is deliberately implemented with textbook methods that are
 * independent of the production code paths (different quadrature family,
 * different ODE stepper), so agreement between the two is meaningful.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracles {

/// Recursive adaptive Simpson quadrature with Richardson correction.
inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// Classic fixed-step fourth-order Runge-Kutta integrator for small systems.
template <std::size_t N>
using VecN = std::array<double, N>;

template <std::size_t N>
VecN<N> axpy(double alpha, const VecN<N>& x, const VecN<N>& y) {
  VecN<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = alpha * x[i] + y[i];
  return r;
}

template <std::size_t N>
void rk4_step(const std::function<VecN<N>(const VecN<N>&)>& f, VecN<N>& y,
              double dt) {
  const VecN<N> k1 = f(y);
  const VecN<N> k2 = f(axpy(0.5 * dt, k1, y));
  const VecN<N> k3 = f(axpy(0.5 * dt, k2, y));
  const VecN<N> k4 = f(axpy(dt, k3, y));
  for (std::size_t i = 0; i < N; ++i)
    y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

/// Integrate y' = f(y) over [0, T] with n fixed RK4 steps (T may be negative).
template <std::size_t N>
VecN<N> rk4_integrate(const std::function<VecN<N>(const VecN<N>&)>& f,
                      VecN<N> y, double T, int n) {
  const double dt = T / n;
  for (int i = 0; i < n; ++i) rk4_step<N>(f, y, dt);
  return y;
}

/// Integrate y' = f(y) with fixed RK4 steps of size h (sign gives the
/// direction) until component `comp` crosses `target`, then refine the
/// crossing by a secant iteration on the final partial step. Throws if the
/// section is not reached within max_span or the state leaves [-1e6, 1e6].
template <std::size_t N>
VecN<N> integrate_to_section(const std::function<VecN<N>(const VecN<N>&)>& f,
                             VecN<N> y, std::size_t comp, double target,
                             double h, double max_span) {
  const int max_steps = static_cast<int>(max_span / std::abs(h)) + 1;
  double side = y[comp] - target;
  for (int i = 0; i < max_steps; ++i) {
    VecN<N> prev = y;
    rk4_step<N>(f, y, h);
    for (double v : y)
      if (!(std::abs(v) < 1e6))
        throw std::runtime_error("integrate_to_section: state diverged");
    const double now = y[comp] - target;
    if (side * now <= 0.0 && side != now) {
      // Secant on the step fraction s in [0, 1]: g(s) = y(prev + s*h)[comp].
      double s0 = 0.0, g0 = side, s1 = 1.0, g1 = now;
      VecN<N> ys = y;
      for (int it = 0; it < 60 && g1 != g0; ++it) {
        const double s2 = s1 - g1 * (s1 - s0) / (g1 - g0);
        const double sc = std::min(1.0, std::max(0.0, s2));
        ys = prev;
        rk4_step<N>(f, ys, sc * h);
        s0 = s1;
        g0 = g1;
        s1 = sc;
        g1 = ys[comp] - target;
        if (std::abs(g1) < 1e-14 * (1.0 + std::abs(target))) break;
      }
      return ys;
    }
    side = now;
  }
  throw std::runtime_error("integrate_to_section: section not reached");
}

} // namespace oracles

#endif // IONFLUX_TESTS_ORACLES_HPP
