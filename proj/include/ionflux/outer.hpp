#ifndef IONFLUX_OUTER_HPP
#define IONFLUX_OUTER_HPP

/**
 * @file outer.hpp
 * @brief Closed-form slow-manifold solutions between the transition layers.
 *
 * Away from x = 0, a, b, 1 the solution follows the slow (electroneutral)
 * manifold.  On the uncharged end intervals [0, a] and [b, 1] the profiles
 * are explicit in the channel resistance coordinate H(x) = int_0^x ds/h(s);
 * on the charged interior interval [a, b] they are explicit in a stretched
 * arclength y with dx/dy = h*sigma, whose total span y* is fixed by a scalar
 * root solve.  Every formula below is an exact algebraic rearrangement of
 * the corresponding quotient form into difference-quotient kernels
 * (phi1, phi2, psi_*, logmean), so the evaluations stay accurate through the
 * removable degeneracies (equal end concentrations, vanishing net flux,
 * vanishing permanent charge) without explicit branching.
 *
 * All solution objects copy their inputs (including the geometry) and are
 * immutable after construction, so they can be shared freely.
 */

#include <vector>

#include "ionflux/layers.hpp"
#include "ionflux/model.hpp"

namespace ionflux {

/**
 * @brief Slow-manifold solution on an uncharged end interval ([0, a] or
 *        [b, 1]), determined by the layer limits at its two ends.
 *
 * The zeroth-order concentration is affine in H(x) and the potential follows
 * a logarithmic profile; the first-order corrections are quadratic/log
 * profiles driven by the two matching scalars M and N, from which the
 * first-order flux densities follow.  c20 = -z1 c10 / z2 and likewise for
 * the first-order correction (electroneutral manifold with Q = 0).
 */
class OuterEndRegion {
 public:
  /**
   * @param start  layer limit at the low-x end (x = 0 or x = b).
   * @param end    layer limit at the high-x end (x = a or x = 1).
   * @param x_start,x_end  interval endpoints inside [0, 1].
   * @param geom   channel geometry (copied).
   * @param ions   valences and size parameters (copied).
   * @throws InvalidLimits if an end concentration is nonpositive.
   */
  OuterEndRegion(const LayerLimit& start, const LayerLimit& end,
                 double x_start, double x_end, const ChannelGeometry& geom,
                 const IonPair& ions);

  /// Flux densities of both species at both expansion orders.
  double J10() const { return J10_; }
  double J20() const { return J20_; }
  double J11() const { return J11_; }
  double J21() const { return J21_; }
  /// Matching scalars driving the first-order fluxes:
  /// J11 = (M + z1 N)/span, J21 = -(z1/z2)(M + z2 N)/span,
  /// where span is the H-length of the interval.
  double M() const { return M_; }
  double N() const { return N_; }
  /// H-length of the interval, H(x_end) - H(x_start).
  double span() const { return span_; }

  double phi0(double x) const;
  double c10(double x) const;
  double c20(double x) const { return -ions_.z1 * c10(x) / ions_.z2; }
  double phi1(double x) const;
  double c11(double x) const;
  double c21(double x) const { return -ions_.z1 * c11(x) / ions_.z2; }

  /// First-order profile correction P(x): the weighted resistance integral
  /// int_start^x I0 c11 / (z1 (z1-z2) h c10^2) ds equals
  /// (dphi0/dln) * P(x); it enters phi1 and vanishes at x_start.
  double P(double x) const;

  double x_start() const { return xs_; }
  double x_end() const { return xe_; }
  const IonPair& ions() const { return ions_; }
  const ChannelGeometry& geometry() const { return geom_; }

 private:
  /// Fraction of the interval's H-length covered up to x, in [0, 1].
  double theta(double x) const;

  ChannelGeometry geom_;
  IonPair ions_;
  double xs_, xe_, Hs_, span_;
  double p_, q_;           ///< start/end zeroth-order concentrations
  double phi0s_, dphi0_;   ///< start potential and start-minus-end drop
  double phi1s_, c11s_, c11e_;
  double t_;               ///< ln(p/q)
  double lam_mean_;        ///< logmean(p, q)
  double kappa_;           ///< (lambda z1 - z2)/z2
  double W_;               ///< c11s/p - kappa*p
  double J10_, J20_, J11_, J21_, M_, N_;
};

/// Left end region on [0, a] from the layer limits at x = 0 and x = a-.
using OuterSolutionLeft = OuterEndRegion;
/// Right end region on [b, 1] from the layer limits at x = b+ and x = 1.
using OuterSolutionRight = OuterEndRegion;

OuterSolutionLeft outer_left(const LayerLimit& at_zero, const LayerLimit& at_a,
                             const ChannelGeometry& geom, const IonPair& ions);

OuterSolutionRight outer_right(const LayerLimit& at_b,
                               const LayerLimit& at_one,
                               const ChannelGeometry& geom,
                               const IonPair& ions);

/// Resistance-weighted integrals of the affine end-region concentration
/// profile, all taken from the interval start to x.
struct ProfileIntegrals {
  double inv_c = 0.0;       ///< int 1/(h c10)
  double c = 0.0;           ///< int c10/h
  double inv_c_sq = 0.0;    ///< int 1/(h c10^2)
  double h_inv_c_sq = 0.0;  ///< int H/(h c10^2)
};

/**
 * @brief Closed forms of the four resistance-weighted profile integrals on
 *        the left interval [0, x], x <= a.
 *
 * The concentration profile is the affine-in-H interpolant between c_start
 * at x = 0 and c_end at x = a.  All four integrals vanish at x = 0 and are
 * evaluated in mean-value form (logarithmic/arithmetic/geometric means), so
 * they are exact for equal end concentrations as well.
 */
ProfileIntegrals profile_integrals_left(double x, double c_start, double c_end,
                                        const ChannelGeometry& geom);

/// Values of the interior-region integral family at a stretched coordinate y:
/// with m = z1 z2 T0,
///   S1 = int c10,           S2 = int c10^2,
///   S3 = int c10 e^{-m s},  S4 = int c10^2 e^{-m s}   (all over s in [0, y]),
/// while S5 and Sz are the antiderivative combinations (linear in y plus a
/// multiple of ln sigma(y) - ln sigma(0)) that absorb the sigma-quotient
/// terms of the first-order profiles.
struct SIntegrals {
  double Sz = 0.0;
  double S1 = 0.0;
  double S2 = 0.0;
  double S3 = 0.0;
  double S4 = 0.0;
  double S5 = 0.0;
};

/**
 * @brief Raw zeroth-order field data of the charged interior region: the
 *        minimal inputs the y-profile formulas consume, with the profile
 *        evaluators attached.
 *
 * The matching iteration fills this directly from trial unknowns, where the
 * span equation and landing conditions do not hold yet; OuterSolutionMiddle /
 * OuterMiddleFirst fill it from a solved state and delegate here, so both
 * paths evaluate identical expressions.  All formulas use difference-quotient
 * kernels and stay accurate uniformly as T0 -> 0 (exponential-affine profile
 * degenerating to affine) and as Q -> 0.
 */
struct MiddleField {
  IonPair ions;
  double Q = 0.0;
  double T0 = 0.0;         ///< J10 + J20
  double I0 = 0.0;         ///< z1 J10 + z2 J20
  double J10 = 0.0;
  double c10_entry = 0.0;  ///< concentration at y = 0

  double c10(double y) const;
  double c20(double y) const { return -(ions.z1 * c10(y) + Q) / ions.z2; }
  double phi0(double y, double phi0_entry) const { return phi0_entry - I0 * y; }
  /// Net charge density sigma(y) = (z1 - z2) z1 c10(y) - z2 Q.
  double sigma_at(double y) const;
  /// Resistance accumulated over [0, y]: (z1 - z2) z1 S1(y) - z2 Q y, which
  /// equals H(tau(y)) - H(a) along a solved profile.
  double resistance(double y) const;
  SIntegrals s_integrals(double y) const;
  /// First-order profiles, affine in the trial flux combinations (T1, J11)
  /// and anchored at the entry values at y = 0.
  double c11(double y, double T1, double J11, double c11_entry) const;
  double phi1(double y, double T1, double J11, double phi1_entry,
              double c11_entry) const;
};

/**
 * @brief Zeroth-order slow-manifold solution on the charged interior
 *        interval [a, b], parametrized by the stretched arclength y.
 *
 * The potential is linear and the concentration exponential-affine in y.
 * The span y* > 0 is the unique admissible root of the resistance relation
 * H(b) - H(a) = (z1 - z2) z1 S1(y*) - z2 Q y*, found with a geometrically
 * grown bracket and Brent's method; the physical position follows from
 * H(tau(y)) - H(a) = (z1 - z2) z1 S1(y) - z2 Q y.
 *
 * @throws InvalidLimits  if an input or profile concentration is nonpositive.
 * @throws SigmaVanishes  if sigma = (z1-z2) z1 c10 - z2 Q is nonpositive at
 *         the entry value or along the solved profile.
 * @throws NoYStar        if the resistance relation has no admissible
 *         positive root (inconsistent trial limits during matching).
 */
class OuterSolutionMiddle {
 public:
  OuterSolutionMiddle(const LayerLimit& at_a, const LayerLimit& at_b, double Q,
                      const ChannelGeometry& geom, const IonPair& ions);

  double y_star() const { return y_star_; }
  double T0() const { return T0_; }  ///< J10 + J20
  double I0() const { return I0_; }  ///< z1 J10 + z2 J20
  double J10() const { return J10_; }
  double J20() const { return J20_; }
  double Q() const { return Q_; }

  double phi0(double y) const;
  double c10(double y) const;
  double c20(double y) const { return -(ions_.z1 * c10(y) + Q_) / ions_.z2; }
  /// Net charge density sigma(y) = (z1 - z2) z1 c10(y) - z2 Q.
  double sigma_at(double y) const;
  /// Physical position tau(y) in [a, b] (monotone in y).
  double tau(double y) const;
  /// Inverse of tau: the stretched coordinate at position x in [a, b].
  double y_of_x(double x) const;

  /// Entry/exit values the solution was built from.
  double phi0_a() const { return phi0_a_; }
  double c10_a() const { return c10_a_; }
  double phi0_b() const { return phi0_b_; }
  double c10_b() const { return c10_b_; }

  const IonPair& ions() const { return ions_; }
  const ChannelGeometry& geometry() const { return geom_; }
  /// Raw field data (profile evaluators) of the solved state.
  const MiddleField& field() const { return field_; }

 private:
  ChannelGeometry geom_;
  IonPair ions_;
  double Q_;
  double phi0_a_, c10_a_, phi0_b_, c10_b_;
  double y_star_, T0_, I0_, J10_, J20_;
  MiddleField field_;
};

OuterSolutionMiddle outer_middle_zeroth(const LayerLimit& at_a,
                                        const LayerLimit& at_b, double Q,
                                        const ChannelGeometry& geom,
                                        const IonPair& ions);

/// Interior integral family at y of a solved zeroth-order state; shorthand
/// for zeroth.field().s_integrals(y).
SIntegrals s_integrals(double y, const OuterSolutionMiddle& zeroth);

/**
 * @brief First-order slow-manifold solution on the charged interior interval.
 *
 * The first-order profiles are affine in the two unknown flux combinations
 * (T1, J11); the constructor fixes them by interpolating the first-order
 * entry and exit values at y = 0 and y = y*.  The parametrized evaluators
 * phi1_with / c11_with expose the same profiles at trial (T1, J11) for the
 * matching solver, and t1_relation_residual reports the defect of the
 * integral identity that T1 must satisfy (which the interpolation makes
 * zero automatically, up to roundoff, at the solved values).
 *
 * @throws SingularJacobian if the 2x2 interpolation system degenerates.
 */
class OuterMiddleFirst {
 public:
  OuterMiddleFirst(const LayerLimit& at_a, const LayerLimit& at_b,
                   const OuterSolutionMiddle& zeroth);

  double T1() const { return T1_; }  ///< J11 + J21
  double I1() const { return I1_; }  ///< z1 J11 + z2 J21
  double J11() const { return J11_; }
  double J21() const { return J21_; }

  double phi1(double y) const { return phi1_with(y, T1_, J11_); }
  double c11(double y) const { return c11_with(y, T1_, J11_); }
  double c21(double y) const { return -zeroth_.ions().z1 * c11(y) / zeroth_.ions().z2; }

  /// First-order profiles at trial flux combinations (affine in T1 and J11).
  double phi1_with(double y, double T1, double J11) const;
  double c11_with(double y, double T1, double J11) const;

  /// Defect of the integral identity fixing T1: the difference between the
  /// flux form (T1/T0)(c10(y*) - c10(0)) - T1 z2 y* I0 Q /((z1-z2) T0) and
  /// its profile form; zero (to roundoff) at the solved T1.
  double t1_relation_residual(double T1) const;

  const OuterSolutionMiddle& zeroth() const { return zeroth_; }

 private:
  OuterSolutionMiddle zeroth_;
  double phi1_a_, c11_a_, phi1_b_, c11_b_;
  double T1_, I1_, J11_, J21_;
};

OuterMiddleFirst outer_middle_first(const LayerLimit& at_a,
                                    const LayerLimit& at_b,
                                    const OuterSolutionMiddle& zeroth);

}  // namespace ionflux

#endif  // IONFLUX_OUTER_HPP
