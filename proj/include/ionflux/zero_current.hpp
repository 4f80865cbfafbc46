#ifndef IONFLUX_ZERO_CURRENT_HPP
#define IONFLUX_ZERO_CURRENT_HPP

/**
 * @file zero_current.hpp
 * @brief Zero-current (reversal) analysis: fluxes under a vanishing total
 *        current, their small-charge expansion, and the critical voltage
 *        where the charge sensitivity of the size correction flips sign.
 *
 * Everything here specializes to equal valence magnitudes (z1 = -z2) and
 * electroneutral baths.  Under a vanishing current through first order in
 * the ion diameter, both species carry the same flux at each order, and the
 * common first-order flux expands in small permanent charge as
 *
 *     J11 = J21 = (M00 + M01 * Q) / H(a) + O(Q^2),
 *
 * with coefficients that depend only on the scaled bath concentrations
 * l = z1*l1, r = z1*r1, the diameter ratio lambda, the applied potential,
 * and the resistance fractions alpha = H(a)/H(1), beta = H(b)/H(1).
 *
 * A gauge subtlety runs through the whole module: the closed-form
 * coefficients below describe the charge response at a *fixed* applied
 * potential (the boundary potential held constant in the diameter d).  The
 * constrained zero-current solve instead releases the potential order by
 * order, and the released first-order potential feeds back into the charge
 * slopes of the fluxes.  Both responses are exposed — the closed forms and
 * fixed-potential finite differences on one side, the constrained solver on
 * the other — and at Q = 0 they coincide exactly because M00 is independent
 * of the potential.  The tests hold each route against its gauge partner.
 */

#include <vector>

#include "ionflux/model.hpp"

namespace ionflux {

/**
 * @brief Scaled data of an electroneutral two-bath problem.
 *
 * Collapses the model to the five numbers the zero-current closed forms
 * need.  Built by electroneutral_shorthand, which enforces the neutrality
 * preconditions.
 */
struct ElectroneutralShorthand {
  double l = 0.0;     ///< z1 * l1 (= -z2 * l2)
  double r = 0.0;     ///< z1 * r1 (= -z2 * r2)
  double alpha = 0.0; ///< H(a) / H(1)
  double beta = 0.0;  ///< H(b) / H(1)
  double PhiV = 0.0;  ///< interior potential drop at the model's V, see interior_drop
};

/**
 * @brief Build the scaled shorthand for @p m.
 * @throws NonNeutralBoundary unless z1*l1 + z2*l2 = 0 and z1*r1 + z2*r2 = 0.
 */
ElectroneutralShorthand electroneutral_shorthand(const ChannelModel& m);

/**
 * @brief Zeroth-order potential drop across the charged interval at applied
 *        potential @p V, for an uncharged channel.
 *
 * Proportional to V; evaluated through difference-of-logs kernels so the
 * equal-bath limit l = r is exact rather than 0/0.
 */
double interior_drop(const ElectroneutralShorthand& s, double V);

/** @name Small-charge expansion coefficients
 * Coefficients of the zero-current first-order flux J11 = J21 and of the
 * junction values entering it, expanded to linear order in the permanent
 * charge Q.  All take the scaled shorthand plus the applied potential where
 * the coefficient is V-dependent.
 */
///@{
/// Charge-free part M00 of H(a)*J11; independent of V.
double m00_coefficient(const ElectroneutralShorthand& s, const IonPair& ions);
/// Right-interval counterpart M20 with (1-beta) in place of alpha.
double m20_coefficient(const ElectroneutralShorthand& s, const IonPair& ions);
/// Charge-interaction part M01 of H(a)*J11; affine in V.
double m01_coefficient(const ElectroneutralShorthand& s, const IonPair& ions,
                       double V);
/// Charge slope of the zeroth-order outer concentration of species 1 at a.
double junction_c10_charge_slope_a(const ElectroneutralShorthand& s,
                                   const IonPair& ions, double V);
/// Charge slope of the zeroth-order outer concentration of species 1 at b.
double junction_c10_charge_slope_b(const ElectroneutralShorthand& s,
                                   const IonPair& ions, double V);
/// Charge-free value of the first-order outer potential at a.
double junction_phi1_chargefree_a(const ElectroneutralShorthand& s,
                                  const IonPair& ions, double V);
/// Charge-free value of the first-order outer potential at b.
double junction_phi1_chargefree_b(const ElectroneutralShorthand& s,
                                  const IonPair& ions, double V);
/// Charge slope of the first-order outer concentration of species 1 at a.
/// The species-2 slope follows from z1*(slope 1) + z2*(slope 2) = 0.
double junction_c11_charge_slope_a(const ElectroneutralShorthand& s,
                                   const IonPair& ions, double V);
///@}

/// How zero_current_fluxes treats the applied potential.
enum class ZeroCurrentMode {
  /// Release V: the solver finds the reversal potential of the data.
  Reversal,
  /// Keep the model's V, which must already carry zero current.
  Verification,
};

/// Zero-current fluxes and their small-charge expansion coefficients.
struct ZeroCurrentResult {
  double J10 = 0.0;        ///< zeroth-order flux of species 1 (= J20)
  double J20 = 0.0;        ///< zeroth-order flux of species 2
  double J11 = 0.0;        ///< first-order flux of species 1 (= J21)
  double J21 = 0.0;        ///< first-order flux of species 2
  double M00 = 0.0;        ///< charge-free coefficient of H(a)*J11
  double M01 = 0.0;        ///< charge-interaction coefficient at V_reversal
  double M20 = 0.0;        ///< right-interval analogue of M00
  double V_reversal = 0.0; ///< potential at which the current vanishes
  double V_critical = 0.0; ///< root of M01(V); NaN when no sign change found
};

/**
 * @brief Fluxes under a vanishing total current through first order in d.
 *
 * The fluxes come from the constrained matching solve (Reversal mode
 * releases V order by order; Verification mode keeps the model's V and
 * checks that the current already vanishes there through first order), so
 * J10 = J20 and J11 = J21 hold to solver tolerance.  The closed-form
 * expansion coefficients M00, M01, M20 are evaluated alongside at the
 * zero-current potential; (M00 + M01*Q)/H(a) reproduces the solved J11
 * exactly at Q = 0, while for Q != 0 the two differ by the fixed-potential
 * gauge feedback described in the file comment.
 *
 * @throws ValenceMismatch unless z1 = -z2.
 * @throws NonNeutralBoundary for non-neutral baths.
 * @throws InvalidModel in Verification mode when the data carry a
 *         measurably nonzero current at the supplied potential.
 */
ZeroCurrentResult zero_current_fluxes(
    const ChannelModel& m, ZeroCurrentMode mode = ZeroCurrentMode::Reversal);

/// The two first-order flux sums of an uncharged channel.
struct FluxSums {
  double total = 0.0;   ///< J11 + J21
  double current = 0.0; ///< z1*J11 + z2*J21
};

/**
 * @brief Closed forms for J11 + J21 and z1*J11 + z2*J21 of an uncharged
 *        channel with electroneutral baths (general valences).
 *
 * The total is independent of the applied potential; the current part is
 * affine in V.  Requires Q = 0.
 *
 * @throws InvalidModel when the permanent charge is nonzero.
 * @throws NonNeutralBoundary for non-neutral baths.
 */
FluxSums flux_sum_check(const ChannelModel& m);

/**
 * @brief Potential at which the zeroth-order current vanishes.
 *
 * Bracketed scalar root-find over the matching solver's current-vs-potential
 * map, independent of the constrained (reversal-mode) Newton solve; the two
 * routes are cross-checked in the tests.
 *
 * @throws BracketFailure when the current has constant sign on the expanded
 *         search interval.
 */
double reversal_potential_zeroth(const ChannelModel& m);

/// Root report for the charge-interaction coefficient M01(V).
struct CriticalVoltage {
  double V_c = 0.0;        ///< leading root (smallest V with a sign change)
  double J11_at_Vc = 0.0;  ///< zero-current first-order flux at V_c
  std::vector<double> roots; ///< every sign change found, ascending
};

/**
 * @brief Voltage at which the charge sensitivity of the zero-current
 *        first-order flux changes sign: the root of M01(V) = 0.
 *
 * M01 is affine in V so at most one root exists, but the scan reports every
 * sign change it finds rather than assuming uniqueness.  At the root,
 * J11 = M00/H(a) independent of small Q, so its sign is the sign of l - r.
 *
 * @throws ValenceMismatch, NonNeutralBoundary as in zero_current_fluxes.
 * @throws BracketFailure when M01 has constant sign on the scan interval.
 */
CriticalVoltage critical_voltage(const ChannelModel& m);

/// Charge slopes of the first-order fluxes and their current/total parts.
struct InteractionCoefficients {
  double J11_1 = 0.0; ///< d J11 / dQ at Q = 0
  double J21_1 = 0.0; ///< d J21 / dQ at Q = 0
  double I1 = 0.0;    ///< z1*J11_1 + z2*J21_1, charge slope of the current part
  double T1 = 0.0;    ///< J11_1 + J21_1, charge slope of the total part
  double M01 = 0.0;   ///< recovered from T1 = -(z1-z2)*M01/(z2*H(a))
  double N01 = 0.0;   ///< recovered from I1 = z1*(z1-z2)*N01/H(a)
};

/**
 * @brief Charge slopes of the first-order fluxes at Q = 0 by central
 *        finite differences over the matching solver, Richardson-refined.
 *
 * By default the model's potential stays fixed across the differentiated
 * solves; this is the gauge of the closed-form coefficients, so the
 * recovered M01 matches m01_coefficient at the model's V and N01 measures
 * the genuine charge slope of the first-order current.  With
 * @p zero_current true the differentiated solves are the constrained
 * (reversal) ones instead: there the current vanishes identically, so N01
 * is zero by construction, J11_1 = J21_1, and the common slope carries the
 * released-potential feedback on top of the fixed-potential M01.
 *
 * @throws ValenceMismatch, NonNeutralBoundary; solver errors propagate.
 */
InteractionCoefficients interaction_coefficients(const ChannelModel& m,
                                                 bool zero_current = false);

}  // namespace ionflux

#endif  // IONFLUX_ZERO_CURRENT_HPP
