/**
 * @file zero_current.cpp
 * @brief Zero-current fluxes, their small-charge expansion, and the
 *        critical-voltage analysis.
 */

#include "ionflux/zero_current.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ionflux/errors.hpp"
#include "ionflux/matching.hpp"
#include "ionflux/numerics.hpp"

namespace ionflux {

namespace {

/// Relative tolerance for the exact-data preconditions (neutrality, z1=-z2).
constexpr double kDataTol = 1e-12;

/// Half-width of the voltage interval scanned for roots of M01(V).
constexpr double kVScanHalfWidth = 8.0;
constexpr int kVScanPoints = 161;

void require_valence_symmetry(const IonPair& ions) {
  if (std::abs(ions.z1 + ions.z2) >
      kDataTol * std::max(std::abs(ions.z1), std::abs(ions.z2))) {
    throw ValenceMismatch("zero-current analysis requires z1 = -z2");
  }
}

/// z1-scaled concentrations of the zeroth-order outer solution at the
/// junctions of an uncharged channel: linear interpolation in H(x)/H(1).
double scaled_c0_at_a(const ElectroneutralShorthand& s) {
  return (1.0 - s.alpha) * s.l + s.alpha * s.r;
}
double scaled_c0_at_b(const ElectroneutralShorthand& s) {
  return (1.0 - s.beta) * s.l + s.beta * s.r;
}

/// Replace the applied potential of a model.
ChannelModel with_potential(const ChannelModel& m, double V) {
  ChannelModel out = m;
  out.boundary.V = V;
  return out;
}

/// Replace the permanent charge of a model.
ChannelModel with_charge(const ChannelModel& m, double Q) {
  ChannelModel out = m;
  out.charge.Q2 = Q;
  return out;
}

/// Every sign change of f on [-kVScanHalfWidth, kVScanHalfWidth], ascending.
std::vector<double> scan_roots(const std::function<double(double)>& f) {
  std::vector<double> roots;
  double x_prev = -kVScanHalfWidth;
  double f_prev = f(x_prev);
  for (int i = 1; i < kVScanPoints; ++i) {
    const double x = -kVScanHalfWidth +
                     2.0 * kVScanHalfWidth * i / (kVScanPoints - 1);
    const double fx = f(x);
    if (f_prev == 0.0) {
      roots.push_back(x_prev);
    } else if (fx != 0.0 && (f_prev > 0.0) != (fx > 0.0)) {
      // A node that evaluates to exactly zero is recorded by the branch
      // above on the next pass; bracketing it here would count it twice.
      roots.push_back(brent(f, x_prev, x).x);
    }
    x_prev = x;
    f_prev = fx;
  }
  if (f_prev == 0.0) roots.push_back(x_prev);
  return roots;
}

}  // namespace

ElectroneutralShorthand electroneutral_shorthand(const ChannelModel& m) {
  m.validate();
  const IonPair& ions = m.ions;
  const BoundaryData& bd = m.boundary;
  const double left = ions.z1 * bd.l1 + ions.z2 * bd.l2;
  const double right = ions.z1 * bd.r1 + ions.z2 * bd.r2;
  const double left_scale = std::abs(ions.z1) * bd.l1 + std::abs(ions.z2) * bd.l2;
  const double right_scale = std::abs(ions.z1) * bd.r1 + std::abs(ions.z2) * bd.r2;
  if (std::abs(left) > kDataTol * left_scale ||
      std::abs(right) > kDataTol * right_scale) {
    throw NonNeutralBoundary(
        "electroneutral_shorthand: boundary data must satisfy "
        "z1*l1 + z2*l2 = 0 and z1*r1 + z2*r2 = 0");
  }
  ElectroneutralShorthand s;
  s.l = ions.z1 * bd.l1;
  s.r = ions.z1 * bd.r1;
  s.alpha = m.geometry.Ha() / m.geometry.H1();
  s.beta = m.geometry.Hb() / m.geometry.H1();
  s.PhiV = interior_drop(s, bd.V);
  return s;
}

double interior_drop(const ElectroneutralShorthand& s, double V) {
  const double ca = scaled_c0_at_a(s);
  const double cb = scaled_c0_at_b(s);
  // V * ln(ca/cb) / ln(l/r), written with difference-quotient kernels:
  // ca - cb = (beta - alpha)(l - r) cancels the vanishing denominator as
  // l -> r, where the drop tends to V*(beta - alpha).
  return V * (s.beta - s.alpha) * logquot(ca, cb) / logquot(s.l, s.r);
}

double m00_coefficient(const ElectroneutralShorthand& s, const IonPair& ions) {
  const double z1 = ions.z1, z2 = ions.z2;
  return (ions.lambda * z1 - z2) / (z1 * z1 * z2) * s.alpha *
         (s.r * s.r - s.l * s.l);
}

double m20_coefficient(const ElectroneutralShorthand& s, const IonPair& ions) {
  const double z1 = ions.z1, z2 = ions.z2;
  return (ions.lambda * z1 - z2) / (z1 * z1 * z2) * (1.0 - s.beta) *
         (s.r * s.r - s.l * s.l);
}

double junction_c10_charge_slope_a(const ElectroneutralShorthand& s,
                                   const IonPair& ions, double V) {
  const double span = ions.z1 - ions.z2;
  return -ions.z2 * s.alpha * interior_drop(s, V) / span - 0.5 / span;
}

double junction_c10_charge_slope_b(const ElectroneutralShorthand& s,
                                   const IonPair& ions, double V) {
  const double span = ions.z1 - ions.z2;
  return ions.z2 * (1.0 - s.beta) * interior_drop(s, V) / span - 0.5 / span;
}

double junction_phi1_chargefree_a(const ElectroneutralShorthand& s,
                                  const IonPair& ions, double V) {
  const double z1 = ions.z1, z2 = ions.z2, lam = ions.lambda;
  const double l = s.l, r = s.r, alpha = s.alpha;
  const double ca = scaled_c0_at_a(s);
  const double lm = logmean(l, r);  // (l - r) / ln(l/r), exact at l = r
  // ln(l/ca) / ln(l/r) with the same cancellation: l - ca = alpha*(l - r).
  const double log_ratio = alpha * logquot(l, ca) / logquot(l, r);
  const double bracket =
      alpha * ((l + r) - alpha * (l - r)) / ca - 2.0 * log_ratio;
  return (lam * z1 - z2) * V * lm * bracket / (z1 * z2) +
         (1.0 - lam) * lm * std::log(l / ca) / (z1 * z2) -
         (1.0 - lam) * alpha * (l - r) / (z1 * z2);
}

double junction_phi1_chargefree_b(const ElectroneutralShorthand& s,
                                  const IonPair& ions, double V) {
  const double z1 = ions.z1, z2 = ions.z2, lam = ions.lambda;
  const double l = s.l, r = s.r, beta = s.beta;
  const double cb = scaled_c0_at_b(s);
  const double lm = logmean(l, r);
  // ln(r/cb) / ln(l/r): r - cb = -(1 - beta)*(l - r).
  const double log_ratio = -(1.0 - beta) * logquot(r, cb) / logquot(l, r);
  const double bracket =
      (beta - 1.0) * ((l + r) + (1.0 - beta) * (l - r)) / cb - 2.0 * log_ratio;
  return (lam * z1 - z2) * V * lm * bracket / (z1 * z2) +
         (1.0 - lam) * lm * std::log(r / cb) / (z1 * z2) +
         (1.0 - lam) * (1.0 - beta) * (l - r) / (z1 * z2);
}

double junction_c11_charge_slope_a(const ElectroneutralShorthand& s,
                                   const IonPair& ions, double V) {
  const double z1 = ions.z1, z2 = ions.z2, lam = ions.lambda;
  const double l = s.l, r = s.r, alpha = s.alpha, beta = s.beta;
  const double span = z1 - z2;
  const double drop = interior_drop(s, V);
  const double c0a = scaled_c0_at_a(s) / z1;
  const double c0b = scaled_c0_at_b(s) / z1;
  const double slope_a = junction_c10_charge_slope_a(s, ions, V);
  const double slope_b = junction_c10_charge_slope_b(s, ions, V);
  const double phi_gap = junction_phi1_chargefree_a(s, ions, V) -
                         junction_phi1_chargefree_b(s, ions, V);
  return -2.0 * (lam * z1 - z2) * alpha * drop *
             ((2.0 * beta - alpha - 1.0) * l +
              (alpha * alpha - beta * beta) * (l - r) - beta * r) /
             (z2 * span) -
         z2 * alpha * phi_gap / span -
         (1.0 - lam) * (l - r) * alpha * (alpha - beta) / (2.0 * z1 * span) +
         2.0 * (lam * z1 - z2) *
             ((1.0 - alpha) * slope_a * c0a + alpha * slope_b * c0b) / z2 +
         (lam * span + lam * z1 - z2) *
             ((1.0 - alpha) * c0a + alpha * c0b) / (2.0 * z2 * span);
}

double m01_coefficient(const ElectroneutralShorthand& s, const IonPair& ions,
                       double V) {
  const double z1 = ions.z1, z2 = ions.z2, lam = ions.lambda;
  const double span = z1 - z2;
  const double c0a = scaled_c0_at_a(s) / z1;
  const double slope_a = junction_c10_charge_slope_a(s, ions, V);
  const double c11_slope = junction_c11_charge_slope_a(s, ions, V);
  // Species-2 counterpart through z1*(slope 1) + z2*(slope 2) = 0.
  const double c21_slope = -z1 * c11_slope / z2;
  return 2.0 * (lam * z1 - z2) * slope_a * c0a / z2 +
         lam * c0a / (2.0 * z2) + (lam * z1 - z2) * c0a / (2.0 * z2 * span) +
         z2 * (c11_slope + c21_slope) / span;
}

ZeroCurrentResult zero_current_fluxes(const ChannelModel& m,
                                      ZeroCurrentMode mode) {
  require_valence_symmetry(m.ions);
  const ElectroneutralShorthand s = electroneutral_shorthand(m);

  ZeroCurrentResult out;
  if (mode == ZeroCurrentMode::Reversal) {
    const MatchingSolution sol = solve_reversal(m);
    out.J10 = sol.fluxes.J10;
    out.J20 = sol.fluxes.J20;
    out.J11 = sol.fluxes.J11;
    out.J21 = sol.fluxes.J21;
    out.V_reversal = sol.state.u[mslot::V0];
  } else {
    const MatchingSolution sol = solve_matching(m);
    const double scale0 =
        std::max(1.0, std::abs(sol.fluxes.J10) + std::abs(sol.fluxes.J20));
    const double scale1 =
        std::max(1.0, std::abs(sol.fluxes.J11) + std::abs(sol.fluxes.J21));
    if (std::abs(sol.fluxes.I0(m.ions)) > 1e-8 * scale0 ||
        std::abs(sol.fluxes.I1(m.ions)) > 1e-8 * scale1) {
      throw InvalidModel(
          "zero_current_fluxes: boundary data carry a nonzero current at "
          "the supplied potential; use Reversal mode to release V");
    }
    out.J10 = sol.fluxes.J10;
    out.J20 = sol.fluxes.J20;
    out.J11 = sol.fluxes.J11;
    out.J21 = sol.fluxes.J21;
    out.V_reversal = m.boundary.V;
  }

  out.M00 = m00_coefficient(s, m.ions);
  out.M20 = m20_coefficient(s, m.ions);
  out.M01 = m01_coefficient(s, m.ions, out.V_reversal);

  const auto m01_of = [&](double V) { return m01_coefficient(s, m.ions, V); };
  const std::vector<double> roots = scan_roots(m01_of);
  out.V_critical = roots.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : roots.front();
  return out;
}

FluxSums flux_sum_check(const ChannelModel& m) {
  if (m.charge.Q2 != 0.0) {
    throw InvalidModel("flux_sum_check: requires zero permanent charge");
  }
  const ElectroneutralShorthand s = electroneutral_shorthand(m);
  const double z1 = m.ions.z1, z2 = m.ions.z2, lam = m.ions.lambda;
  const double H1 = m.geometry.H1();
  const double lm = logmean(s.r, s.l);  // (r - l) / ln(r/l)

  FluxSums sums;
  sums.total = (lam * z1 - z2) * (z2 - z1) * (s.r * s.r - s.l * s.l) /
               (z1 * z1 * z2 * z2 * H1);
  sums.current =
      (lam * z1 - z2) * (z1 - z2) * lm * (2.0 * lm - (s.r + s.l)) *
          m.boundary.V / (z1 * z2 * H1) +
      (1.0 - lam) * (z1 - z2) * (s.r - s.l) * lm / (z1 * z2 * H1);
  return sums;
}

double reversal_potential_zeroth(const ChannelModel& m) {
  m.validate();
  const auto current = [&](double V) {
    return solve_matching(with_potential(m, V)).fluxes.I0(m.ions);
  };
  double lo = 0.0, hi = 0.0;
  bracket_expand(current, 0.0, 1.0, 7, lo, hi);
  return brent(current, lo, hi, 1e-12).x;
}

CriticalVoltage critical_voltage(const ChannelModel& m) {
  require_valence_symmetry(m.ions);
  const ElectroneutralShorthand s = electroneutral_shorthand(m);
  const auto m01_of = [&](double V) { return m01_coefficient(s, m.ions, V); };

  CriticalVoltage out;
  out.roots = scan_roots(m01_of);
  if (out.roots.empty()) {
    throw BracketFailure(
        "critical_voltage: the charge-interaction coefficient has constant "
        "sign on the scanned voltage interval");
  }
  out.V_c = out.roots.front();
  out.J11_at_Vc = (m00_coefficient(s, m.ions) +
                   m01_coefficient(s, m.ions, out.V_c) * m.charge.Q2) /
                  m.geometry.Ha();
  return out;
}

InteractionCoefficients interaction_coefficients(const ChannelModel& m,
                                                 bool zero_current) {
  require_valence_symmetry(m.ions);
  electroneutral_shorthand(m);  // precondition check only

  const auto first_order = [&](double Q) {
    const ChannelModel mq = with_charge(m, Q);
    const MatchingSolution sol =
        zero_current ? solve_reversal(mq) : solve_matching(mq);
    return std::pair<double, double>{sol.fluxes.J11, sol.fluxes.J21};
  };
  const double h = 1e-4 * std::max(1.0, std::abs(m.charge.Q2));
  const auto central = [&](double step) {
    const auto [p1, p2] = first_order(step);
    const auto [m1, m2] = first_order(-step);
    return std::pair<double, double>{(p1 - m1) / (2.0 * step),
                                     (p2 - m2) / (2.0 * step)};
  };
  const auto [d1_h, d2_h] = central(h);
  const auto [d1_h2, d2_h2] = central(0.5 * h);

  InteractionCoefficients out;
  out.J11_1 = (4.0 * d1_h2 - d1_h) / 3.0;
  out.J21_1 = (4.0 * d2_h2 - d2_h) / 3.0;
  out.I1 = m.ions.z1 * out.J11_1 + m.ions.z2 * out.J21_1;
  out.T1 = out.J11_1 + out.J21_1;
  const double Ha = m.geometry.Ha();
  const double span = m.ions.z1 - m.ions.z2;
  out.M01 = -m.ions.z2 * Ha * out.T1 / span;
  out.N01 = Ha * out.I1 / (m.ions.z1 * span);
  return out;
}

}  // namespace ionflux
