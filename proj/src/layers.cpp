#include "ionflux/layers.hpp"

#include <algorithm>
#include <cmath>

#include "ionflux/errors.hpp"
#include "ionflux/numerics.hpp"

namespace ionflux {

namespace {

/// Start-point data a layer departs from: zeroth-order values plus the
/// first-order values carried along the matching fiber (zero at the outer
/// boundaries x = 0, 1 apart from an optional potential shift).
struct LayerStart {
  double phi0, c10, c20;
  double phi1, c11, c21;
};

void require_positive(double c1, double c2, const char* where) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    throw InvalidLimits(std::string(where) +
                        ": concentrations must be positive");
  }
}

/// Potential drop start -> landing for an uncharged region (Q = 0), where the
/// landing point solves z1 c1 e^{z1 t} + z2 c2 e^{z2 t} = 0 in closed form.
double neutral_drop(double c1, double c2, const IonPair& ions) {
  return dlog(-ions.z2 * c2, ions.z1 * c1) / (ions.z1 - ions.z2);
}

/// Charge imbalance at the start point; its sign orients the layer and it
/// vanishes exactly when the layer is absent.
double imbalance(const LayerStart& s, double Q, const IonPair& ions) {
  return ions.z1 * s.c10 + ions.z2 * s.c20 + Q;
}

/// Full layer limit from the start values, the potential drop delta
/// (start minus landing), and the orientation: +1 for a layer converging
/// onto the slow manifold in forward fast time, -1 for one emanating from it.
/// With derive_u1 = false the u0u1 -> u1 division (and its degeneracy guard)
/// is skipped, which makes the evaluation total in delta; trial states of the
/// matching iteration need that.
LayerLimit make_limit(const LayerStart& s, double Q, double delta,
                      double orientation, const IonPair& ions,
                      bool derive_u1 = true) {
  const double z1 = ions.z1, z2 = ions.z2, lam = ions.lambda;

  LayerLimit lim;
  lim.phi0 = s.phi0 - delta;
  lim.c10 = s.c10 * std::exp(z1 * delta);
  lim.c20 = s.c20 * std::exp(z2 * delta);

  // Squared amplitude 2*(F(start) - F(landing)) of the energy integral
  // H50, written as -2*delta*B(delta) with phi1-kernels so that nothing
  // cancels as the layer shrinks.  B(0) is the charge imbalance, whose sign
  // (flipped for emanating layers) orients u0.
  const double bracket =
      z1 * s.c10 * phi1(z1 * delta) + z2 * s.c20 * phi1(z2 * delta) + Q;
  const double amp2 = std::max(0.0, -2.0 * delta * bracket);
  lim.u0 = orientation * sgn(imbalance(s, Q, ions)) * std::sqrt(amp2);

  // First-order landing values from the conserved quantities H11, H21, H31
  // projected onto the slow manifold z1 c11 + z2 c21 = 0.
  const double sig = sigma(lim.c10, Q, ions);
  const double ratio1 = s.c11 / s.c10;
  const double ratio2 = s.c21 / s.c20;
  const double sum_s = s.c10 + s.c20;
  const double sum_m = lim.c10 + lim.c20;

  lim.phi1 = s.phi1 +
             (z1 * lim.c10 / sig) *
                 (ratio1 - ratio2 + (1.0 - lam) * (sum_s - sum_m)) -
             (Q / sig) * (ratio2 + 2.0 * lam * s.c20 + (lam + 1.0) * s.c10 -
                          2.0 * lam * lim.c20 - (lam + 1.0) * lim.c10);

  lim.c11 = (lim.c10 / sig) * (z1 * lim.c10 + Q) *
            (z1 * ratio2 - z2 * ratio1 + (z1 - z2) * w_combination(s.c10, s.c20, ions) +
             ((2.0 * (lam * z1 - z2) + (1.0 - lam) * z2) * Q +
              2.0 * (lam * z1 - z2) * (z1 - z2) * lim.c10) /
                 z2);
  lim.c21 = -z1 * lim.c11 / z2;

  lim.u0u1 = sum_s * (s.c10 + lam * s.c20) - sum_m * (lim.c10 + lam * lim.c20) +
             s.c11 + s.c21 - lim.c11 - lim.c21 + (lim.phi1 - s.phi1) * Q;

  if (!derive_u1) return lim;
  if (lim.u0 != 0.0) {
    lim.u1 = lim.u0u1 / lim.u0;
  } else {
    const double scale =
        std::max({1.0, sum_s * sum_s, std::abs(s.c11) + std::abs(s.c21)});
    if (std::abs(lim.u0u1) <= 1e-9 * scale) {
      lim.u1 = 0.0;
    } else {
      throw DegenerateLayer(
          "layer absent at zeroth order but first-order jump is nonzero");
    }
  }
  return lim;
}

LayerStart junction_start(const JunctionValues& jv) {
  return {jv.phi0, jv.c10, jv.c20, jv.phi1, jv.c11, jv.c21};
}

}  // namespace

FirstIntegrals first_integrals(const FastState& s, double Q,
                               const IonPair& ions) {
  const double lam = ions.lambda;
  FirstIntegrals H;
  H.H10 = std::exp(ions.z1 * s.phi0) * s.c10;
  H.H20 = std::exp(ions.z2 * s.phi0) * s.c20;
  H.H50 = s.c10 + s.c20 - 0.5 * s.u0 * s.u0 - Q * s.phi0;
  H.H11 = ions.z1 * s.phi1 + s.c11 / s.c10 + 2.0 * s.c10 + (lam + 1.0) * s.c20;
  H.H21 = ions.z2 * s.phi1 + s.c21 / s.c20 + 2.0 * lam * s.c20 +
          (lam + 1.0) * s.c10;
  H.H31 = s.u0 * s.u1 - s.c11 - s.c21 -
          (s.c10 + s.c20) * (s.c10 + lam * s.c20) + s.phi1 * Q;
  return H;
}

LayerLimit left_outer_limit(const BoundaryData& bd, const IonPair& ions,
                            double V1) {
  require_positive(bd.l1, bd.l2, "left_outer_limit");
  const LayerStart start{bd.V, bd.l1, bd.l2, V1, 0.0, 0.0};
  return make_limit(start, 0.0, neutral_drop(bd.l1, bd.l2, ions), +1.0, ions);
}

LayerLimit internal_limit_left_of_a(const JunctionValues& jv,
                                    const IonPair& ions) {
  require_positive(jv.c10, jv.c20, "internal_limit_left_of_a");
  return make_limit(junction_start(jv), 0.0,
                    neutral_drop(jv.c10, jv.c20, ions), -1.0, ions);
}

double middle_phi0_root(const JunctionValues& jv, double Q,
                        const IonPair& ions) {
  require_positive(jv.c10, jv.c20, "middle_phi0_root");
  const double z1 = ions.z1, z2 = ions.z2;
  const auto residual = [&](double phi) {
    return z1 * jv.c10 * std::exp(z1 * (jv.phi0 - phi)) +
           z2 * jv.c20 * std::exp(z2 * (jv.phi0 - phi)) + Q;
  };
  const auto slope = [&](double phi) {
    return -z1 * z1 * jv.c10 * std::exp(z1 * (jv.phi0 - phi)) -
           z2 * z2 * jv.c20 * std::exp(z2 * (jv.phi0 - phi));
  };
  if (residual(jv.phi0) == 0.0) return jv.phi0;
  double lo = 0.0, hi = 0.0;
  bracket_expand(residual, jv.phi0, 1.0, 60, lo, hi);
  return newton_bisect(residual, slope, lo, hi, 1e-13).x;
}

LayerLimit middle_entry_limit(const JunctionValues& jv, double Q,
                              const IonPair& ions) {
  require_positive(jv.c10, jv.c20, "middle_entry_limit");
  const double delta = jv.phi0 - middle_phi0_root(jv, Q, ions);
  return make_limit(junction_start(jv), Q, delta, +1.0, ions);
}

LayerLimit middle_exit_limit(const JunctionValues& jv, double Q,
                             const IonPair& ions) {
  require_positive(jv.c10, jv.c20, "middle_exit_limit");
  const double delta = jv.phi0 - middle_phi0_root(jv, Q, ions);
  return make_limit(junction_start(jv), Q, delta, -1.0, ions);
}

LayerLimit right_entry_limit(const JunctionValues& jv, const IonPair& ions) {
  require_positive(jv.c10, jv.c20, "right_entry_limit");
  return make_limit(junction_start(jv), 0.0,
                    neutral_drop(jv.c10, jv.c20, ions), +1.0, ions);
}

LayerLimit right_outer_limit(const BoundaryData& bd, const IonPair& ions) {
  require_positive(bd.r1, bd.r2, "right_outer_limit");
  const LayerStart start{0.0, bd.r1, bd.r2, 0.0, 0.0, 0.0};
  return make_limit(start, 0.0, neutral_drop(bd.r1, bd.r2, ions), -1.0, ions);
}

double neutral_layer_drop(double c1, double c2, const IonPair& ions) {
  require_positive(c1, c2, "neutral_layer_drop");
  return neutral_drop(c1, c2, ions);
}

LayerLimit layer_limit_at(const JunctionValues& jv, double Q,
                          double phi0_landing, double orientation,
                          const IonPair& ions) {
  require_positive(jv.c10, jv.c20, "layer_limit_at");
  return make_limit(junction_start(jv), Q, jv.phi0 - phi0_landing, orientation,
                    ions, /*derive_u1=*/false);
}

}  // namespace ionflux
