#include "doctest.h"

#include <cmath>
#include <utility>
#include <vector>

#include "ionflux/errors.hpp"
#include "ionflux/model.hpp"
#include "oracles.hpp"

using namespace ionflux;

namespace {

/**
 * Pre-collection evaluation of the coefficient functions: insert the
 * hard-sphere chemical-potential gradient into the flux relations
 *   h c_k' + z_k h c_k phi' + h c_k dmu_k = -J_k
 * and solve the resulting 2x2 linear system for (c1', c2').  Writing
 * c' = -F phi' - G/h defines the same f_k, g_k that eval_fg computes in
 * collected polynomial form.
 */
struct FGRef {
  double f1, f2, g1, g2;
};
FGRef fg_precollection(double c1, double c2, double J1, double J2,
                       const IonPair& ions) {
  const double d1 = ions.d, d2 = ions.lambda * ions.d;
  const double den = 1.0 - d1 * c1 - d2 * c2;
  const double den2 = den * den;
  const double a11 = d1 * (2.0 + d1 * (c2 - c1) - 2.0 * d2 * c2) / den2;
  const double a12 = (d1 + d2 - d1 * d1 * c1 - d2 * d2 * c2) / den2;
  const double a22 = d2 * (2.0 + d2 * (c1 - c2) - 2.0 * d1 * c1) / den2;
  // (I + C A) x = rhs with C = diag(c1, c2)
  const double m11 = 1.0 + c1 * a11, m12 = c1 * a12;
  const double m21 = c2 * a12, m22 = 1.0 + c2 * a22;
  const double det = m11 * m22 - m12 * m21;
  const auto solve = [&](double r1, double r2) {
    return std::pair<double, double>{(m22 * r1 - m12 * r2) / det,
                                     (m11 * r2 - m21 * r1) / det};
  };
  const auto [f1, f2] = solve(ions.z1 * c1, ions.z2 * c2);
  const auto [g1, g2] = solve(J1, J2);
  return {f1, f2, g1, g2};
}

} // namespace

TEST_CASE("eval_fg reduces to the ideal coefficients at d = 0") {
  IonPair ions{1.0, -1.0, 0.0, 1.0};
  const auto v = eval_fg(0.7, 1.3, 0.4, -0.9, ions);
  CHECK(v.f1 == doctest::Approx(0.7));
  CHECK(v.f2 == doctest::Approx(-1.3));
  CHECK(v.g1 == doctest::Approx(0.4));
  CHECK(v.g2 == doctest::Approx(-0.9));
}

TEST_CASE("eval_fg vanishes appropriately at zero concentration") {
  IonPair ions{2.0, -1.0, 0.2, 1.5};
  const auto v = eval_fg(0.0, 0.0, 0.8, -0.3, ions);
  CHECK(v.f1 == 0.0);
  CHECK(v.f2 == 0.0);
  CHECK(v.g1 == doctest::Approx(0.8));
  CHECK(v.g2 == doctest::Approx(-0.3));
}

TEST_CASE("eval_fg equals the pre-collection 2x2 solve exactly") {
  // The collected quadratic-in-d polynomials are an exact algebraic identity,
  // not a truncation, so the two evaluation routes must agree to roundoff.
  struct Case {
    IonPair ions;
    double c1, c2, J1, J2;
  };
  const std::vector<Case> cases = {
      {{1.0, -1.0, 0.1, 1.0}, 1.0, 1.0, 1.0, 1.0},
      {{1.0, -2.0, 0.08, 2.0}, 0.3, 0.7, 0.4, -1.1},
      {{2.0, -1.0, 0.05, 0.5}, 1.8, 0.2, -0.6, 0.9},
      {{1.0, -1.0, 0.2, 3.0}, 0.9, 0.4, 2.0, 0.0},
  };
  for (const auto& cs : cases) {
    CAPTURE(cs.ions.d);
    const auto got = eval_fg(cs.c1, cs.c2, cs.J1, cs.J2, cs.ions);
    const auto ref = fg_precollection(cs.c1, cs.c2, cs.J1, cs.J2, cs.ions);
    CHECK(got.f1 == doctest::Approx(ref.f1).epsilon(1e-13));
    CHECK(got.f2 == doctest::Approx(ref.f2).epsilon(1e-13));
    CHECK(got.g1 == doctest::Approx(ref.g1).epsilon(1e-13));
    CHECK(got.g2 == doctest::Approx(ref.g2).epsilon(1e-13));
  }
}

TEST_CASE("charge-weighted f combination on the slow manifold is exactly "
          "quadratic in d") {
  // With c2 = -(z1 c1 + Q)/z2 (electroneutrality against the permanent
  // charge), z1 f1 + z2 f2 equals
  //   (z1 - z2) z1 c1 - z2 Q + 2 ((1 - lam) z1 c1 - lam Q) Q d
  //   + (c1 + lam^2 c2) Q^2 d^2
  // identically; verify coefficient by coefficient.
  const double z1 = 1.0, z2 = -2.0, lam = 1.7, c1 = 0.83, Q = 1.4;
  const double c2 = -(z1 * c1 + Q) / z2;
  const double zeroth = (z1 - z2) * z1 * c1 - z2 * Q;
  const double first = 2.0 * ((1.0 - lam) * z1 * c1 - lam * Q) * Q;
  const double second = (c1 + lam * lam * c2) * Q * Q;
  for (double d : {0.0, 0.05, 0.2, 0.6}) {
    CAPTURE(d);
    IonPair ions{z1, z2, d, lam};
    const auto v = eval_fg(c1, c2, 0.0, 0.0, ions);
    const double expect = zeroth + first * d + second * d * d;
    CHECK(z1 * v.f1 + z2 * v.f2 == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("g coefficients are linear in the fluxes") {
  IonPair ions{1.0, -1.0, 0.15, 2.0};
  const double c1 = 0.6, c2 = 1.1;
  const auto gA = eval_fg(c1, c2, 1.3, -0.4, ions);
  const auto gB = eval_fg(c1, c2, -0.7, 2.2, ions);
  const auto gSum = eval_fg(c1, c2, 2.0 * 1.3 - 0.7, 2.0 * (-0.4) + 2.2, ions);
  CHECK(gSum.g1 == doctest::Approx(2.0 * gA.g1 + gB.g1).epsilon(1e-13));
  CHECK(gSum.g2 == doctest::Approx(2.0 * gA.g2 + gB.g2).epsilon(1e-13));
  const auto g0 = eval_fg(c1, c2, 0.0, 0.0, ions);
  CHECK(g0.g1 == 0.0);
  CHECK(g0.g2 == 0.0);
}

TEST_CASE("hard-sphere gradient vanishes at d = 0 and respects species "
          "symmetry") {
  IonPair point{1.0, -1.0, 0.0, 1.0};
  const auto [m1, m2] =
      hs_chemical_potential_gradient(0.9, 0.4, 1.7, -2.1, point);
  CHECK(m1 == 0.0);
  CHECK(m2 == 0.0);

  IonPair sym{1.0, -1.0, 0.12, 1.0};
  const auto [s1, s2] =
      hs_chemical_potential_gradient(0.8, 0.8, 0.35, 0.35, sym);
  CHECK(s1 == doctest::Approx(s2).epsilon(1e-15));
}

TEST_CASE("hard-sphere gradient matches numerical differentiation of the "
          "potential") {
  // Oracle: mu_k^HS/kBT = -ln(1 - d1 c1 - d2 c2) + d_k (c1 + c2)/(1 - d1 c1
  // - d2 c2), differentiated along a smooth path by central differences.
  IonPair ions{1.0, -1.0, 0.09, 1.6};
  const double d1 = ions.d, d2 = ions.lambda * ions.d;
  const auto c1_of = [](double t) { return 0.5 + 0.3 * std::sin(t); };
  const auto c2_of = [](double t) { return 0.4 + 0.2 * std::cos(3.0 * t); };
  const auto mu = [&](double t, double dk) {
    const double c1 = c1_of(t), c2 = c2_of(t);
    const double den = 1.0 - d1 * c1 - d2 * c2;
    return -std::log(den) + dk * (c1 + c2) / den;
  };
  const double t0 = 0.3, step = 1e-5;
  const double dmu1_fd = (mu(t0 + step, d1) - mu(t0 - step, d1)) / (2.0 * step);
  const double dmu2_fd = (mu(t0 + step, d2) - mu(t0 - step, d2)) / (2.0 * step);
  const double dc1 =
      (c1_of(t0 + step) - c1_of(t0 - step)) / (2.0 * step);
  const double dc2 =
      (c2_of(t0 + step) - c2_of(t0 - step)) / (2.0 * step);
  const auto [g1, g2] =
      hs_chemical_potential_gradient(c1_of(t0), c2_of(t0), dc1, dc2, ions);
  CHECK(g1 == doctest::Approx(dmu1_fd).epsilon(1e-7));
  CHECK(g2 == doctest::Approx(dmu2_fd).epsilon(1e-7));
}

TEST_CASE("hard-sphere gradient rejects overfull packing") {
  IonPair ions{1.0, -1.0, 1.0, 1.0};
  CHECK_THROWS_AS(hs_chemical_potential_gradient(1.5, 0.0, 0.0, 0.0, ions),
                  PackingOverflow);
  CHECK_THROWS_AS(hs_chemical_potential_gradient(0.5, 0.5, 0.0, 0.0, ions),
                  PackingOverflow); // exactly full counts as overflow
}

TEST_CASE("sigma matches direct substitution") {
  CHECK(sigma(1.0, 0.0, IonPair{1.0, -1.0, 0.0, 1.0}) == doctest::Approx(2.0));
  CHECK(sigma(0.0, 2.0, IonPair{1.0, -1.0, 0.0, 1.0}) == doctest::Approx(2.0));
  CHECK(sigma(3.0, 1.0, IonPair{1.0, -2.0, 0.0, 1.0}) ==
        doctest::Approx(11.0));
}

TEST_CASE("w_combination matches direct substitution") {
  CHECK(w_combination(1.0, 1.0, IonPair{1.0, -1.0, 0.0, 1.0}) ==
        doctest::Approx(4.0));
  CHECK(w_combination(0.0, 0.0, IonPair{1.0, -1.0, 0.0, 2.0}) ==
        doctest::Approx(0.0));
  CHECK(w_combination(1.0, 2.0, IonPair{1.0, -1.0, 0.0, 2.0}) ==
        doctest::Approx(9.5));
}

TEST_CASE("validation rejects malformed inputs") {
  CHECK_THROWS_AS((IonPair{-1.0, -1.0, 0.0, 1.0}).validate(), InvalidModel);
  CHECK_THROWS_AS((IonPair{1.0, 1.0, 0.0, 1.0}).validate(), InvalidModel);
  CHECK_THROWS_AS((IonPair{1.0, -1.0, -0.1, 1.0}).validate(), InvalidModel);
  CHECK_THROWS_AS((IonPair{1.0, -1.0, 0.0, 0.0}).validate(), InvalidModel);
  CHECK_NOTHROW((IonPair{1.0, -1.0, 0.0, 1.0}).validate());

  CHECK_THROWS_AS((BoundaryData{0.0, 0.0, 1.0, 1.0, 1.0}).validate(),
                  InvalidModel);
  CHECK_THROWS_AS((BoundaryData{0.0, 1.0, 1.0, -2.0, 1.0}).validate(),
                  InvalidModel);
  CHECK_NOTHROW((BoundaryData{-3.0, 2.0, 2.0, 1.0, 1.0}).validate());

  CHECK_THROWS_AS(ChannelGeometry::uniform(0.5, 0.4), InvalidModel);
  CHECK_THROWS_AS(ChannelGeometry::uniform(0.0, 0.5), InvalidModel);
  CHECK_THROWS_AS(ChannelGeometry::uniform(1.0 / 3, 2.0 / 3, -1.0),
                  InvalidModel);
  CHECK_THROWS_AS(ChannelGeometry::tabulated(0.3, 0.6, {0.0, 0.5},
                                             {1.0, -1.0}),
                  InvalidModel);
  CHECK_THROWS_AS(ChannelGeometry::tabulated(0.3, 0.6, {0.1, 1.0},
                                             {1.0, 1.0}),
                  InvalidModel);

  ChannelModel bad_eps;
  bad_eps.geometry = ChannelGeometry::uniform(1.0 / 3, 2.0 / 3);
  bad_eps.epsilon = 0.0;
  CHECK_THROWS_AS(bad_eps.validate(), InvalidModel);
}

TEST_CASE("uniform geometry has exact cumulative resistance") {
  const auto g = ChannelGeometry::uniform(0.25, 0.75, 2.0);
  CHECK(g.h(0.1) == doctest::Approx(2.0));
  CHECK(g.dh(0.9) == 0.0);
  CHECK(g.H(0.5) == doctest::Approx(0.25));
  CHECK(g.Ha() == doctest::Approx(0.125));
  CHECK(g.Hb() == doctest::Approx(0.375));
  CHECK(g.H1() == doctest::Approx(0.5));
}

TEST_CASE("neck geometry: H matches independent quadrature, dh matches "
          "finite differences") {
  const auto g = ChannelGeometry::neck(1.0 / 3, 2.0 / 3, 1.0, 0.2);
  const auto inv_h = [&](double x) { return 1.0 / g.h(x); };
  CHECK(g.H(1.0) ==
        doctest::Approx(oracles::adaptive_simpson(inv_h, 0.0, 1.0, 1e-13))
            .epsilon(1e-10));
  CHECK(g.H(0.47) ==
        doctest::Approx(oracles::adaptive_simpson(inv_h, 0.0, 0.47, 1e-13))
            .epsilon(1e-10));
  CHECK(g.H(0.0) == 0.0);
  // strictly increasing
  double prev = -1.0;
  for (int i = 0; i <= 50; ++i) {
    const double x = i / 50.0;
    const double Hx = g.H(x);
    CHECK(Hx > prev);
    prev = Hx;
  }
  // cached junction values agree with direct evaluation
  CHECK(g.Ha() == doctest::Approx(g.H(1.0 / 3)).epsilon(1e-15));
  CHECK(g.Hb() == doctest::Approx(g.H(2.0 / 3)).epsilon(1e-15));
  // derivative
  const double x0 = 0.41, fd = (g.h(x0 + 1e-6) - g.h(x0 - 1e-6)) / 2e-6;
  CHECK(g.dh(x0) == doctest::Approx(fd).epsilon(1e-8));
  // the neck really narrows
  CHECK(g.h(0.5) == doctest::Approx(0.2));
  CHECK(g.h(0.0) > 0.9);
}

TEST_CASE("tabulated geometry interpolates its knots monotonically") {
  const std::vector<double> xs = {0.0, 0.2, 0.35, 0.5, 0.65, 0.8, 1.0};
  const std::vector<double> hs = {1.0, 0.9, 0.5, 0.3, 0.5, 0.9, 1.0};
  const auto g = ChannelGeometry::tabulated(0.35, 0.65, xs, hs);
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(g.h(xs[i]) == doctest::Approx(hs[i]).epsilon(1e-14));
  // monotone data on [0.2, 0.5] stays monotone, hence positive
  double prev = g.h(0.2) + 1e-12;
  for (int i = 1; i <= 40; ++i) {
    const double x = 0.2 + 0.3 * i / 40.0;
    CHECK(g.h(x) < prev);
    CHECK(g.h(x) > 0.0);
    prev = g.h(x);
  }
  const auto inv_h = [&](double x) { return 1.0 / g.h(x); };
  CHECK(g.H(1.0) ==
        doctest::Approx(oracles::adaptive_simpson(inv_h, 0.0, 1.0, 1e-13))
            .epsilon(1e-10));
  const double x0 = 0.27, fd = (g.h(x0 + 1e-6) - g.h(x0 - 1e-6)) / 2e-6;
  CHECK(g.dh(x0) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("permanent charge profile is the three-piece step") {
  const auto g = ChannelGeometry::uniform(0.3, 0.6);
  PermanentCharge q{2.5};
  CHECK(q.at(0.1, g) == 0.0);
  CHECK(q.at(0.45, g) == 2.5);
  CHECK(q.at(0.9, g) == 0.0);
  ChannelModel m;
  m.geometry = g;
  m.charge = q;
  CHECK(m.Q_at(0.45) == 2.5);
  CHECK(m.Q_at(0.7) == 0.0);
}

TEST_CASE("flux expansion recomputes derived combinations from the J's") {
  IonPair ions{2.0, -1.0, 0.1, 1.5};
  FluxExpansion J{0.4, -0.3, 1.2, 0.5};
  CHECK(J.I0(ions) == doctest::Approx(2.0 * 0.4 + (-1.0) * (-0.3)));
  CHECK(J.I1(ions) == doctest::Approx(2.0 * 1.2 + (-1.0) * 0.5));
  CHECK(J.T0() == doctest::Approx(0.1));
  CHECK(J.T1() == doctest::Approx(1.7));
  CHECK(J.Lambda0(ions) == doctest::Approx(0.4 + 1.5 * (-0.3)));
  CHECK(J.Lambda1(ions) == doctest::Approx(1.2 + 1.5 * 0.5));
  CHECK(J.J1(0.1) == doctest::Approx(0.4 + 0.1 * 1.2));
  CHECK(J.J2(0.1) == doctest::Approx(-0.3 + 0.1 * 0.5));
  CHECK(J.current(ions, 0.1) == doctest::Approx(J.I0(ions) + 0.1 * J.I1(ions)));
}

TEST_CASE("dimensionless rescale is the identity at unit constants and "
          "inverts exactly") {
  PhysicalConstants unit{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  PhysicalValues pv{0.7, -1.3, 2.2, 0.4};
  const auto dv = dimensionless_rescale(unit, pv);
  CHECK(dv.phi == doctest::Approx(0.7));
  CHECK(dv.V == doctest::Approx(-1.3));
  CHECK(dv.eps2 == doctest::Approx(1.0));
  CHECK(dv.J1 == doctest::Approx(2.2));
  CHECK(dv.J2 == doctest::Approx(0.4));

  PhysicalConstants lab{1.602176634e-19, 1.380649e-23, 298.15,
                        78.5,            8.8541878128e-12, 1.9e-9, 2.03e-9};
  const auto dv2 = dimensionless_rescale(lab, pv);
  const auto back = physical_rescale(lab, dv2);
  CHECK(back.Phi == doctest::Approx(pv.Phi).epsilon(1e-14));
  CHECK(back.V == doctest::Approx(pv.V).epsilon(1e-14));
  CHECK(back.calJ1 == doctest::Approx(pv.calJ1).epsilon(1e-14));
  CHECK(back.calJ2 == doctest::Approx(pv.calJ2).epsilon(1e-14));

  // eps^2 grows with temperature at fixed charge and permittivity
  PhysicalConstants hot = lab;
  hot.T = 398.15;
  CHECK(dimensionless_rescale(hot, pv).eps2 >
        dimensionless_rescale(lab, pv).eps2);

  PhysicalConstants bad = lab;
  bad.T = 0.0;
  CHECK_THROWS_AS(dimensionless_rescale(bad, pv), InvalidModel);
}
