#ifndef IONFLUX_LAYERS_HPP
#define IONFLUX_LAYERS_HPP

/**
 * @file layers.hpp
 * @brief Closed-form boundary/internal layer limits at x = 0, a, b, 1.
 *
 * Each junction carries a fast transition layer connecting prescribed values
 * to the slow manifold { u = 0, z1 c1 + z2 c2 + Q = 0 }.  The functions here
 * evaluate the limiting values of that transition (zeroth and first order in
 * the ion diameter d) in closed form.  Orientation convention: layers that
 * converge to the slow manifold in forward fast time take the sign
 * +sgn(z1 c1 + z2 c2 + Q) at their start point for u0, layers that emanate
 * from it take -sgn(...); the sign factor is applied to the start-point
 * charge imbalance including Q in all regions.
 *
 * The squared layer amplitude u0^2 = 2*(F(start) - F(landing)) of the energy
 * integral is evaluated as -2*delta*B(delta) with delta the potential drop
 * and B a phi1-kernel combination; this form is exactly equal to the naive
 * difference but stays fully accurate as the layer degenerates.
 */

#include "ionflux/model.hpp"

namespace ionflux {

/// One side's limiting values of a fast transition layer.
struct LayerLimit {
  double phi0 = 0.0, c10 = 0.0, c20 = 0.0, u0 = 0.0; ///< zeroth order
  double phi1 = 0.0, c11 = 0.0, c21 = 0.0, u1 = 0.0; ///< first order in d
  /// Product u0*u1 from the energy integral; finite (and meaningful) even
  /// when the layer degenerates and u1 itself becomes 0/0.
  double u0u1 = 0.0;
};

/// Values preassigned at an interior junction (x = a or x = b).
struct JunctionValues {
  double phi0 = 0.0, c10 = 1.0, c20 = 1.0; ///< zeroth order
  double phi1 = 0.0, c11 = 0.0, c21 = 0.0; ///< first order in d
};

/// State of the limiting fast system carrying both expansion orders.
struct FastState {
  double phi0, u0, c10, c20;
  double phi1, u1, c11, c21;
};

/// Values of the nontrivial conserved quantities of the limiting fast system
/// (the flux components are trivially constant and omitted).
struct FirstIntegrals {
  double H10, H20, H50; ///< zeroth order
  double H11, H21, H31; ///< first order
};

/**
 * @brief Conserved quantities of the limiting fast system with permanent
 *        charge Q (Q = 0 recovers the outer-region forms).
 *
 * H10 = e^{z1 phi0} c10, H20 = e^{z2 phi0} c20,
 * H50 = c10 + c20 - u0^2/2 - Q*phi0,
 * H11 = z1 phi1 + c11/c10 + 2 c10 + (lambda+1) c20,
 * H21 = z2 phi1 + c21/c20 + 2 lambda c20 + (lambda+1) c10,
 * H31 = u0 u1 - c11 - c21 - (c10+c20)(c10+lambda c20) + phi1 Q.
 */
FirstIntegrals first_integrals(const FastState& s, double Q,
                               const IonPair& ions);

/**
 * @brief Limit of the boundary layer at x = 0 (forward convergence onto the
 *        slow manifold), from the boundary data (V, l1, l2).
 * @param V1 optional first-order correction to the boundary potential; it
 *        shifts phi1 only (the concentrations' first-order limits are
 *        independent of it).
 * @throws InvalidLimits  if l1 or l2 is nonpositive.
 * @throws DegenerateLayer if u0 = 0 while the first-order layer is genuine.
 */
LayerLimit left_outer_limit(const BoundaryData& bd, const IonPair& ions,
                            double V1 = 0.0);

/// Limit of the internal layer on the left side of x = a (emanating from the
/// slow manifold), from the preassigned junction values.
LayerLimit internal_limit_left_of_a(const JunctionValues& jv,
                                    const IonPair& ions);

/**
 * @brief Landing potential of a layer into the charged middle region: the
 *        unique root phi of
 *        z1 c10 e^{z1(phi_j - phi)} + z2 c20 e^{z2(phi_j - phi)} + Q = 0.
 *
 * The left-hand side is strictly decreasing in phi, so the root is unique;
 * it is found with a geometrically grown bracket and safeguarded Newton.
 */
double middle_phi0_root(const JunctionValues& jv, double Q,
                        const IonPair& ions);

/// Limit of the layer entering the middle region at x = a (forward
/// convergence onto the charged slow manifold).
LayerLimit middle_entry_limit(const JunctionValues& jv, double Q,
                              const IonPair& ions);

/// Limit of the layer leaving the middle region at x = b (emanating from the
/// charged slow manifold).
LayerLimit middle_exit_limit(const JunctionValues& jv, double Q,
                             const IonPair& ions);

/// Limit of the layer entering the right region at x = b (forward
/// convergence onto the uncharged slow manifold).
LayerLimit right_entry_limit(const JunctionValues& jv, const IonPair& ions);

/// Limit of the boundary layer at x = 1 (emanating from the slow manifold),
/// from the boundary data (r1, r2); the boundary potential is 0.
LayerLimit right_outer_limit(const BoundaryData& bd, const IonPair& ions);

/// Closed-form potential drop (start minus landing) of a layer attached to an
/// uncharged region, where the landing potential solves
/// z1 c1 e^{z1 t} + z2 c2 e^{z2 t} = 0.
double neutral_layer_drop(double c1, double c2, const IonPair& ions);

/**
 * @brief Layer limit evaluated at a prescribed landing potential instead of
 *        a solved one.
 *
 * This is the building block of the matching system's residual rows: there
 * the landing potential is itself an unknown of an outer Newton iteration, so
 * the limit must be evaluable at trial values where the manifold conditions
 * do not hold yet.  At the solved landing potential the result coincides with
 * the *_limit functions above, except that the transversal speed ratio u1 is
 * never derived here (it stays 0); matching consumes u0 and u0u1, which are
 * always filled, so no degenerate-layer guard applies.
 *
 * @param orientation +1 for a layer converging onto the slow manifold in
 *        forward fast time, -1 for one emanating from it.
 * @throws InvalidLimits if a junction concentration is nonpositive.
 */
LayerLimit layer_limit_at(const JunctionValues& jv, double Q,
                          double phi0_landing, double orientation,
                          const IonPair& ions);

} // namespace ionflux

#endif // IONFLUX_LAYERS_HPP
