/**
 * @file outer.cpp
 * @brief Slow-manifold (regular-layer) solutions on the three subintervals.
 */

#include "ionflux/outer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ionflux/errors.hpp"
#include "ionflux/numerics.hpp"

namespace ionflux {

namespace {

/// (2 phi2(x) - phi1(x))/x with the removable value -1/6 at x = 0.  This
/// quotient appears when the forward and backward exponential moments of the
/// interior profile are subtracted; both factors vanish together with x.
double phi_d(double x) {
  if (std::abs(x) < 0.25) {
    // sum_{j>=0} -(j+1) x^j / (j+3)!
    double sum = 0.0, xp = 1.0, fact = 6.0;
    for (int j = 0; j < 14; ++j) {
      sum -= (j + 1) * xp / fact;
      xp *= x;
      fact *= j + 4;
    }
    return sum;
  }
  return (2.0 * phi2(x) - phi1(x)) / x;
}

/// Number of samples used for positivity sweeps over a solved profile.
constexpr int kSweepSamples = 257;

}  // namespace

// Note: inside MiddleField the unqualified kernel names phi1/c11 would be
// shadowed by the member evaluators, hence the qualified calls throughout.

double MiddleField::c10(double y) const {
  const double E = ions.z1 * ions.z2 * T0 * y;
  return c10_entry * std::exp(E) + ions.z2 * Q * J10 * y * ionflux::phi1(E);
}

double MiddleField::sigma_at(double y) const {
  return sigma(c10(y), Q, ions);
}

double MiddleField::resistance(double y) const {
  const double z1 = ions.z1, z2 = ions.z2;
  const double E = z1 * z2 * T0 * y;
  const double S1 = c10_entry * y * ionflux::phi1(E) +
                    z2 * Q * J10 * y * y * ionflux::phi2(E);
  return (z1 - z2) * z1 * S1 - z2 * Q * y;
}

SIntegrals MiddleField::s_integrals(double y) const {
  const double z1 = ions.z1, z2 = ions.z2;
  const double ca = c10_entry;
  const double E = z1 * z2 * T0 * y;
  const double kq = z2 * Q * J10;
  SIntegrals s;
  s.S1 = ca * y * ionflux::phi1(E) + kq * y * y * ionflux::phi2(E);
  s.S2 = ca * ca * y * ionflux::phi1(2.0 * E) +
         2.0 * ca * kq * y * y * psi_a(E) + kq * kq * y * y * y * psi_b(E);
  s.S3 = ca * y + kq * y * y * ionflux::phi2(-E);
  s.S4 = ca * ca * y * ionflux::phi1(E) +
         2.0 * ca * kq * y * y * ionflux::phi2(E) +
         kq * kq * y * y * y * psi_c(E);
  const double L = dlog(sigma_at(y), sigma_at(0.0));
  s.Sz = J10 * y + L / (z1 * (z1 - z2));
  s.S5 = I0 * ca * y * ionflux::phi1(E) / (z1 - z2) +
         kq * y / (z1 * (z1 - z2)) * (1.0 + z1 * I0 * y * ionflux::phi2(E)) +
         z2 * Q * L / (z1 * z1 * (z1 - z2) * (z1 - z2));
  return s;
}

double MiddleField::c11(double y, double T1, double J11,
                        double c11_entry) const {
  const double z1 = ions.z1, z2 = ions.z2, lam = ions.lambda;
  const double ca = c10_entry;
  const double E = z1 * z2 * T0 * y;
  const double ph1 = ionflux::phi1(E), ph2 = ionflux::phi2(E);
  const SIntegrals s = s_integrals(y);
  const double sig = sigma_at(y);
  // (S1 - e^E S3)/T0, written so the vanishing factor T0 cancels exactly.
  const double K13 =
      z1 * z2 * y * y * (ca * (ph2 - ph1) + z2 * Q * J10 * y * phi_d(E));
  const double direct =
      c11_entry + z1 * z2 * T1 * s.S1 + 2.0 * z1 * (lam * z1 - z2) * T0 * s.S2 +
      z2 * J11 * Q * y +
      (2.0 * lam * z1 * T0 + 2.0 * (z1 - z2) * J10) * s.S1 * Q;
  const double quotient =
      -z1 * z2 * y * ph1 * c11_entry * Q +
      2.0 * z1 * (lam * z1 - z2) * Q * s.S2 + z1 * z2 * T1 * Q * K13 -
      2.0 * z1 * (z1 - z2) * std::exp(E) * Q * s.S4 +
      2.0 * lam * z1 * Q * Q * s.S1 +
      2.0 * (z1 - z2) * J10 * Q * Q * K13 -
      z1 * z2 * z2 * J11 * Q * Q * y * y * ph2;
  return direct + I0 / sig * quotient;
}

double MiddleField::phi1(double y, double T1, double J11, double phi1_entry,
                         double c11_entry) const {
  const double z1 = ions.z1, z2 = ions.z2, lam = ions.lambda;
  const double ca = c10_entry;
  const double I1 = (z1 - z2) * J11 + z2 * T1;
  const double E = z1 * z2 * T0 * y;
  const double ph1 = ionflux::phi1(E), ph2 = ionflux::phi2(E);
  const SIntegrals s = s_integrals(y);
  const double sig = sigma_at(y);
  const double L = dlog(sigma_at(y), sigma_at(0.0));
  const double K13 =
      z1 * z2 * y * y * (ca * (ph2 - ph1) + z2 * Q * J10 * y * phi_d(E));
  const double direct =
      phi1_entry + (1.0 - lam) * z1 * T0 * s.S1 - I1 * y -
      2.0 * (1.0 - lam) * z1 * I0 * ca * y * ph1 / z2 -
      2.0 * (1.0 - lam) * Q * J10 * y * (1.0 + z1 * I0 * y * ph2) -
      2.0 * (1.0 - lam) * Q * L / (z1 * (z1 - z2)) +
      2.0 * Q / z2 * ((1.0 - lam) * z2 + lam * (z1 - z2)) * s.Sz -
      2.0 * lam * Q * L / (z1 * z2) + (lam - 1.0) * J10 * y * Q;
  const double quotient =
      z1 * (z1 - z2) * I0 * c11_entry * y * ph1 -
      2.0 * z1 * (z1 - z2) * (lam * z1 - z2) * I0 * s.S2 / z2 -
      z1 * (z1 - z2) * T1 * I0 * K13 +
      2.0 * z1 * (z1 - z2) * (z1 - z2) * I0 * std::exp(E) * s.S4 / z2 -
      2.0 * lam * z1 * (z1 - z2) * I0 * Q * s.S1 / z2 -
      2.0 * (z1 - z2) * (z1 - z2) * J10 * I0 * Q * K13 / z2 +
      z1 * z2 * (z1 - z2) * J11 * I0 * Q * y * y * ph2;
  return direct + quotient / sig;
}

OuterEndRegion::OuterEndRegion(const LayerLimit& start, const LayerLimit& end,
                               double x_start, double x_end,
                               const ChannelGeometry& geom,
                               const IonPair& ions)
    : geom_(geom), ions_(ions), xs_(x_start), xe_(x_end) {
  if (!(start.c10 > 0.0) || !(end.c10 > 0.0))
    throw InvalidLimits("end-region limiting concentrations must be positive");
  Hs_ = geom_.H(xs_);
  span_ = geom_.H(xe_) - Hs_;
  if (!(span_ > 0.0))
    throw InvalidModel("end-region interval has nonpositive H-length");

  const double z1 = ions_.z1, z2 = ions_.z2, lam = ions_.lambda;
  p_ = start.c10;
  q_ = end.c10;
  phi0s_ = start.phi0;
  dphi0_ = start.phi0 - end.phi0;
  phi1s_ = start.phi1;
  c11s_ = start.c11;
  c11e_ = end.c11;
  t_ = dlog(p_, q_);
  lam_mean_ = logmean(p_, q_);
  kappa_ = (lam * z1 - z2) / z2;
  W_ = c11s_ / p_ - kappa_ * p_;

  const double dc = p_ - q_;
  J10_ = (dc + z1 * dphi0_ * lam_mean_) / span_;
  J20_ = -(z1 / z2) * (dc + z2 * dphi0_ * lam_mean_) / span_;

  const double dphi1 = start.phi1 - end.phi1;
  M_ = c11s_ - c11e_ + kappa_ * (q_ * q_ - p_ * p_);
  N_ = lam_mean_ * (dphi1 - (1.0 - lam) / z2 * dc +
                    dphi0_ * kappa_ * (2.0 * lam_mean_ - p_ - q_)) +
       dphi0_ * (c11s_ * phi2(-t_) + c11e_ * phi2(t_));
  J11_ = (M_ + z1 * N_) / span_;
  J21_ = -(z1 / z2) * (M_ + z2 * N_) / span_;
}

double OuterEndRegion::theta(double x) const {
  return (geom_.H(x) - Hs_) / span_;
}

double OuterEndRegion::c10(double x) const {
  const double th = theta(x);
  return (1.0 - th) * p_ + th * q_;
}

double OuterEndRegion::phi0(double x) const {
  const double th = theta(x);
  // Mean-value form of the logarithmic potential profile: the drop up to x
  // is the total drop weighted by theta * logmean(p, q) / logmean(p, c10(x)).
  return phi0s_ - dphi0_ * th * lam_mean_ / logmean(p_, c10(x));
}

double OuterEndRegion::c11(double x) const {
  const double cx = c10(x);
  return c11s_ + kappa_ * (cx * cx - p_ * p_) - theta(x) * M_;
}

double OuterEndRegion::P(double x) const {
  const double th = theta(x);
  const double cx = c10(x);
  const double lx = logmean(p_, cx);
  return (p_ - q_) * th *
         (W_ / cx + kappa_ - M_ * th * phi2(dlog(p_, cx)) / (lx * lx));
}

double OuterEndRegion::phi1(double x) const {
  const double th = theta(x);
  const double cx = c10(x);
  const double lx = logmean(p_, cx);
  const double p_aux =
      th * (W_ / cx + kappa_ - M_ * th * phi2(dlog(p_, cx)) / (lx * lx));
  return phi1s_ - (1.0 - ions_.lambda) / ions_.z2 * (p_ - q_) * th +
         dphi0_ * lam_mean_ * p_aux - th * N_ / lx;
}

OuterSolutionLeft outer_left(const LayerLimit& at_zero, const LayerLimit& at_a,
                             const ChannelGeometry& geom,
                             const IonPair& ions) {
  return OuterEndRegion(at_zero, at_a, 0.0, geom.a(), geom, ions);
}

OuterSolutionRight outer_right(const LayerLimit& at_b,
                               const LayerLimit& at_one,
                               const ChannelGeometry& geom,
                               const IonPair& ions) {
  return OuterEndRegion(at_b, at_one, geom.b(), 1.0, geom, ions);
}

ProfileIntegrals profile_integrals_left(double x, double c_start, double c_end,
                                        const ChannelGeometry& geom) {
  if (!(c_start > 0.0) || !(c_end > 0.0))
    throw InvalidLimits("profile concentrations must be positive");
  const double Hx = geom.H(x);
  const double th = Hx / geom.Ha();
  const double cx = (1.0 - th) * c_start + th * c_end;
  const double lx = logmean(c_start, cx);
  ProfileIntegrals out;
  out.inv_c = Hx / lx;
  out.c = Hx * 0.5 * (c_start + cx);
  out.inv_c_sq = Hx / (c_start * cx);
  out.h_inv_c_sq = Hx * Hx * phi2(dlog(c_start, cx)) / (lx * lx);
  return out;
}

OuterSolutionMiddle::OuterSolutionMiddle(const LayerLimit& at_a,
                                         const LayerLimit& at_b, double Q,
                                         const ChannelGeometry& geom,
                                         const IonPair& ions)
    : geom_(geom),
      ions_(ions),
      Q_(Q),
      phi0_a_(at_a.phi0),
      c10_a_(at_a.c10),
      phi0_b_(at_b.phi0),
      c10_b_(at_b.c10) {
  if (!(c10_a_ > 0.0) || !(c10_b_ > 0.0))
    throw InvalidLimits("interior limiting concentrations must be positive");
  const double z1 = ions_.z1, z2 = ions_.z2;
  const double sig_a = sigma(c10_a_, Q_, ions_);
  if (!(sig_a > 0.0))
    throw SigmaVanishes("net charge density must be positive at the entry");

  const double dH = geom_.Hb() - geom_.Ha();
  const double dphi = phi0_a_ - phi0_b_;
  T0_ = -((z1 - z2) * (c10_a_ - c10_b_) + z2 * dphi * Q_) / (z2 * dH);

  // Span residual: res(y) = (z1-z2) z1 S1(y) - z2 Q y - (H(b) - H(a)), with
  // the trial flux I0 = dphi/y folded in so that no division by y occurs:
  // z2 Q J10 y^2 phi2(E) = z2 Q y phi2(E) (dphi - z2 T0 y)/(z1-z2).
  const auto residual = [&](double y) -> double {
    const double E = z1 * z2 * T0_ * y;
    if (E > 350.0) return 1e300;  // concentration grows beyond any resistance
    const double S1 = c10_a_ * y * phi1(E) +
                      z2 * Q_ * y * phi2(E) * (dphi - z2 * T0_ * y) / (z1 - z2);
    return (z1 - z2) * z1 * S1 - z2 * Q_ * y - dH;
  };
  // Trial-state admissibility at a probe span (positive concentration and
  // net charge density at the far end).
  const auto admissible = [&](double y) -> bool {
    const double E = z1 * z2 * T0_ * y;
    if (E > 350.0) return true;
    const double j10 = (dphi / y - z2 * T0_) / (z1 - z2);
    const double c = c10_a_ * std::exp(E) + z2 * Q_ * j10 * y * phi1(E);
    return c > 0.0 && sigma(c, Q_, ions_) > 0.0;
  };

  // res(0) = -(H(b) - H(a)) < 0; grow the upper end geometrically from the
  // charge-dominated estimate until the residual turns positive.
  double hi = dH / sig_a;
  bool bracketed = false;
  for (int k = 0; k < 60; ++k) {
    if (residual(hi) > 0.0) {
      bracketed = true;
      break;
    }
    if (!admissible(hi))
      throw NoYStar("interior span equation has no admissible positive root");
    hi *= 2.0;
  }
  if (!bracketed)
    throw NoYStar("interior span equation has no positive root");
  const RootResult root =
      brent(residual, 0.0, hi, 1e-13 * std::max(1.0, hi), 400);
  if (!root.converged)
    throw NoYStar("interior span equation root solve did not converge");
  y_star_ = root.x;

  I0_ = dphi / y_star_;
  J10_ = (I0_ - z2 * T0_) / (z1 - z2);
  J20_ = T0_ - J10_;
  field_ = MiddleField{ions_, Q_, T0_, I0_, J10_, c10_a_};

  // Positivity sweep along the solved profile.
  for (int i = 0; i < kSweepSamples; ++i) {
    const double y = y_star_ * i / (kSweepSamples - 1);
    const double c = c10(y);
    if (!(c > 0.0))
      throw InvalidLimits("interior concentration nonpositive along profile");
    if (!(sigma(c, Q_, ions_) > 0.0))
      throw SigmaVanishes("net charge density vanishes along the profile");
  }
}

double OuterSolutionMiddle::phi0(double y) const { return phi0_a_ - I0_ * y; }

double OuterSolutionMiddle::c10(double y) const { return field_.c10(y); }

double OuterSolutionMiddle::sigma_at(double y) const {
  return field_.sigma_at(y);
}

double OuterSolutionMiddle::tau(double y) const {
  const double Ha = geom_.Ha();
  const double target =
      std::clamp(Ha + field_.resistance(y), Ha, geom_.Hb());
  const auto f = [&](double x) { return geom_.H(x) - target; };
  return brent(f, geom_.a(), geom_.b(), 1e-14).x;
}

double OuterSolutionMiddle::y_of_x(double x) const {
  const double target = std::clamp(geom_.H(x), geom_.Ha(), geom_.Hb()) -
                        geom_.Ha();
  const auto f = [&](double y) { return field_.resistance(y) - target; };
  return brent(f, 0.0, y_star_, 1e-14 * std::max(1.0, y_star_)).x;
}

OuterSolutionMiddle outer_middle_zeroth(const LayerLimit& at_a,
                                        const LayerLimit& at_b, double Q,
                                        const ChannelGeometry& geom,
                                        const IonPair& ions) {
  return OuterSolutionMiddle(at_a, at_b, Q, geom, ions);
}

SIntegrals s_integrals(double y, const OuterSolutionMiddle& zeroth) {
  return zeroth.field().s_integrals(y);
}

OuterMiddleFirst::OuterMiddleFirst(const LayerLimit& at_a,
                                   const LayerLimit& at_b,
                                   const OuterSolutionMiddle& zeroth)
    : zeroth_(zeroth),
      phi1_a_(at_a.phi1),
      c11_a_(at_a.c11),
      phi1_b_(at_b.phi1),
      c11_b_(at_b.c11) {
  const double z1 = zeroth_.ions().z1, z2 = zeroth_.ions().z2;
  const double ys = zeroth_.y_star();
  // The profiles are affine in (T1, J11); interpolate the exit values.
  const double c0 = c11_with(ys, 0.0, 0.0);
  const double p0 = phi1_with(ys, 0.0, 0.0);
  const double cT = c11_with(ys, 1.0, 0.0) - c0;
  const double cJ = c11_with(ys, 0.0, 1.0) - c0;
  const double pT = phi1_with(ys, 1.0, 0.0) - p0;
  const double pJ = phi1_with(ys, 0.0, 1.0) - p0;
  const double det = cT * pJ - cJ * pT;
  const double scale =
      std::abs(cT * pJ) + std::abs(cJ * pT) + std::abs(c11_b_) + 1e-300;
  if (!(std::abs(det) > 1e-13 * scale))
    throw SingularJacobian("first-order interior interpolation is singular");
  const double r1 = c11_b_ - c0;
  const double r2 = phi1_b_ - p0;
  T1_ = (r1 * pJ - r2 * cJ) / det;
  J11_ = (cT * r2 - pT * r1) / det;
  I1_ = (z1 - z2) * J11_ + z2 * T1_;
  J21_ = T1_ - J11_;
}

double OuterMiddleFirst::c11_with(double y, double T1, double J11) const {
  return zeroth_.field().c11(y, T1, J11, c11_a_);
}

double OuterMiddleFirst::phi1_with(double y, double T1, double J11) const {
  return zeroth_.field().phi1(y, T1, J11, phi1_a_, c11_a_);
}

double OuterMiddleFirst::t1_relation_residual(double T1) const {
  const IonPair& ions = zeroth_.ions();
  const double z1 = ions.z1, z2 = ions.z2, lam = ions.lambda;
  const double T0 = zeroth_.T0(), I0 = zeroth_.I0();
  const double J10 = zeroth_.J10(), J20 = zeroth_.J20();
  const double Q = zeroth_.Q();
  const double ys = zeroth_.y_star();
  const SIntegrals s = s_integrals(ys, zeroth_);
  const double lambda0 = J10 + lam * J20;
  // Flux side, with the exit-entry concentration difference eliminated via
  // the profile relation so that no division by T0 remains:
  //   (c10(y*) - c10(0))/T0 - z2 y* I0 Q/((z1-z2) T0)
  //       = z1 z2 S1(y*) - z2^2 Q y*/(z1-z2).
  const double lhs = T1 * (z1 * z2 * s.S1 - z2 * z2 * Q * ys / (z1 - z2));
  const double rhs =
      c11_b_ - c11_a_ - 2.0 * (lam * z1 - z2) * z1 * T0 * s.S2 -
      ((2.0 * lam + (1.0 - lam) * z2 / (z1 - z2)) * z1 * T0 +
       2.0 * (z1 - z2) * J10) *
          s.S1 * Q +
      z2 * (phi1_b_ - phi1_a_) * Q / (z1 - z2) +
      2.0 * (1.0 - lam) * z1 * s.S5 * Q -
      2.0 * (1.0 - lam) * z2 / (z1 - z2) * s.Sz * Q * Q -
      2.0 * lam * I0 * ys * Q * Q / (z1 - z2) +
      lam * z2 * T0 * ys * Q * Q / (z1 - z2) +
      z2 * lambda0 * ys * Q * Q / (z1 - z2);
  return lhs - rhs;
}

OuterMiddleFirst outer_middle_first(const LayerLimit& at_a,
                                    const LayerLimit& at_b,
                                    const OuterSolutionMiddle& zeroth) {
  return OuterMiddleFirst(at_a, at_b, zeroth);
}

}  // namespace ionflux
