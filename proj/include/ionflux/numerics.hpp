#ifndef IONFLUX_NUMERICS_HPP
#define IONFLUX_NUMERICS_HPP

/**
 * @file numerics.hpp
 * @brief Small numerical kernels shared across the library.
 *
 * The closed-form profile and flux expressions in this project are full of
 * difference quotients such as (e^x - 1)/x and (ln p - ln q)/(p - q) that are
 * exact algebraic rearrangements of well-conditioned quantities but suffer
 * catastrophic cancellation when evaluated verbatim near the degenerate point.
 * Everything here evaluates those kernels with series fallbacks so the
 * higher-level formulas stay accurate uniformly in their parameters.
 */

#include <functional>

namespace ionflux {

/// Sign of x as -1, 0, +1.
inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

/// phi1(x) = (e^x - 1)/x, extended by continuity to phi1(0) = 1.
double phi1(double x);

/// phi2(x) = (e^x - 1 - x)/x^2, with phi2(0) = 1/2.
double phi2(double x);

/// psi_a(x) = (phi1(2x) - phi1(x))/x, with psi_a(0) = 1/2.
double psi_a(double x);

/// psi_b(x) = (phi1(2x) - 2*phi1(x) + 1)/x^2, with psi_b(0) = 1/3.
double psi_b(double x);

/// psi_c(x) = (phi2(x) - phi2(-x))/x, with psi_c(0) = 1/3.
double psi_c(double x);

/// ln(p) - ln(q) for p, q > 0, accurate when p is close to q.
double dlog(double p, double q);

/// Logarithmic mean (p - q)/(ln p - ln q), continuous value p at p = q.
double logmean(double p, double q);

/// Difference quotient (ln p - ln q)/(p - q) = 1/logmean(p, q).
double logquot(double p, double q);

/// Result of a bracketed scalar root solve.
struct RootResult {
  double x = 0.0;         ///< root estimate
  double residual = 0.0;  ///< f(x) at the estimate
  int iterations = 0;
  bool converged = false;
};

/// Brent's method on [lo, hi]; requires f(lo) and f(hi) of opposite sign.
/// Throws BracketFailure if the interval does not bracket a sign change.
RootResult brent(const std::function<double(double)>& f, double lo, double hi,
                 double xtol = 1e-14, int max_iter = 200);

/// Grow an interval geometrically around x0 (initial half-width delta0,
/// factor 2 per step) until f changes sign across it. Throws BracketFailure
/// after max_grow doublings.
void bracket_expand(const std::function<double(double)>& f, double x0,
                    double delta0, int max_grow, double& lo, double& hi);

/// Safeguarded Newton iteration that keeps iterates inside a bracketing
/// interval and falls back to bisection whenever the Newton step leaves it.
/// Converges on |f| <= ftol (residual criterion).
RootResult newton_bisect(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double lo,
                         double hi, double ftol = 1e-12, int max_iter = 100);

/// Adaptive Gauss-Kronrod (G7, K15) quadrature of f over [a, b] with
/// absolute tolerance tol. Bisection-based; max_depth limits recursion.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double tol = 1e-12, int max_depth = 48);

/// Non-adaptive 15-point Gauss-Legendre rule on [a, b].
double gauss15(const std::function<double(double)>& f, double a, double b);

}  // namespace ionflux

#endif  // IONFLUX_NUMERICS_HPP
