/**
 * @file test_matching.cpp
 * @brief Tests of the global matching solver: residual structure, solved
 *        states, sweeps, and reversal mode.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "ionflux/errors.hpp"
#include "ionflux/matching.hpp"
#include "ionflux/model.hpp"
#include "ionflux/outer.hpp"

using namespace ionflux;

namespace {

ChannelModel base_model() {
  ChannelModel m;
  m.ions = IonPair{1.0, -1.0, 0.0, 1.0};
  m.boundary = BoundaryData{-1.0, 2.0, 2.0, 1.0, 1.0};
  m.geometry = ChannelGeometry::uniform(1.0 / 3.0, 2.0 / 3.0);
  m.charge = PermanentCharge{0.5};
  return m;
}

ChannelModel neck_model() {
  ChannelModel m;
  m.ions = IonPair{1.0, -2.0, 0.0, 1.4};
  m.boundary = BoundaryData{0.6, 0.8, 0.4, 2.4, 1.2};
  m.geometry = ChannelGeometry::neck(1.0 / 3.0, 2.0 / 3.0, 1.0, 0.4);
  m.charge = PermanentCharge{-1.0};
  return m;
}

/// Maximum absolute residual over the active rows of a state.
double max_residual(const MatchingState& st, const ChannelModel& m) {
  const auto r = assemble_residual(st, m);
  double n = 0.0;
  const int last = st.reversal ? MatchingState::kSlots : 21;
  for (int i = 0; i < last; ++i) n = std::max(n, std::abs(r[i]));
  return n;
}

}  // namespace

TEST_CASE("hand-built equilibrium state solves the uncharged system exactly") {
  ChannelModel m = base_model();
  m.boundary = BoundaryData{0.0, 1.5, 1.5, 1.5, 1.5};
  m.charge = PermanentCharge{0.0};

  // Constant profiles: every junction value equals the boundary value, all
  // fluxes vanish, and the interior span follows from the resistance
  // relation with a constant concentration.
  MatchingState st;
  for (int i : {mslot::phi0_a, mslot::phi0_b, mslot::phi0_am, mslot::phi0_bm,
                mslot::J10, mslot::J20, mslot::J11, mslot::J21,
                mslot::phi1_a, mslot::c11_a, mslot::c21_a, mslot::phi1_b,
                mslot::c11_b, mslot::c21_b, mslot::phi1_am, mslot::phi1_bm}) {
    st.u[i] = 0.0;
  }
  st.u[mslot::c10_a] = st.u[mslot::c20_a] = 1.5;
  st.u[mslot::c10_b] = st.u[mslot::c20_b] = 1.5;
  const double dH = m.geometry.Hb() - m.geometry.Ha();
  st.u[mslot::ystar] = dH / (2.0 * 1.5);

  CHECK(max_residual(st, m) < 1e-14);
}

TEST_CASE("uncharged solve reproduces the single-region closed form") {
  ChannelModel m = base_model();
  m.charge = PermanentCharge{0.0};
  const MatchingSolution sol = solve_matching(m);

  // The initial guess is already the solution.
  CHECK(sol.zeroth_iterations == 0);
  CHECK(sol.first_iterations == 0);
  CHECK(sol.residual_norm < 1e-12);

  const LayerLimit L0 = left_outer_limit(m.boundary, m.ions);
  const LayerLimit R1 = right_outer_limit(m.boundary, m.ions);
  const OuterEndRegion full(L0, R1, 0.0, 1.0, m.geometry, m.ions);
  CHECK(sol.fluxes.J10 == doctest::Approx(full.J10()).epsilon(1e-13));
  CHECK(sol.fluxes.J20 == doctest::Approx(full.J20()).epsilon(1e-13));
  CHECK(sol.fluxes.J11 == doctest::Approx(full.J11()).epsilon(1e-13));
  CHECK(sol.fluxes.J21 == doctest::Approx(full.J21()).epsilon(1e-13));

  const double a = m.geometry.a(), b = m.geometry.b();
  CHECK(sol.state.u[mslot::phi0_a] == doctest::Approx(full.phi0(a)).epsilon(1e-13));
  CHECK(sol.state.u[mslot::c11_b] == doctest::Approx(full.c11(b)).epsilon(1e-13));

  // With Q = 0 nothing jumps at the junctions: the region profiles glue
  // continuously.
  CHECK(sol.left.c10(a) == doctest::Approx(sol.middle.c10(0.0)).epsilon(1e-12));
  CHECK(sol.middle.c10(sol.middle.y_star()) ==
        doctest::Approx(sol.right.c10(b)).epsilon(1e-10));
  CHECK(sol.left.phi1(a) ==
        doctest::Approx(sol.middle_first.phi1(0.0)).epsilon(1e-12));
}

TEST_CASE("charged solve leaves a small residual and consistent diagnostics") {
  for (const ChannelModel& m : {base_model(), neck_model()}) {
    const MatchingSolution sol = solve_matching(m);
    CHECK(sol.residual_norm < 1e-10);
    CHECK(max_residual(sol.state, m) < 1e-8);

    // The converged state's stored rows are exactly what assemble_residual
    // reports.
    const auto r = assemble_residual(sol.state, m);
    for (int i = 0; i < 21; ++i) CHECK(sol.state.residual[i] == r[i]);

    const MatchingDiagnostics d = matching_diagnostics(sol);
    CHECK(std::abs(d.t1_identity) < 1e-10);
    CHECK(d.y_star_gap < 1e-10);
    CHECK(d.first_interp_gap < 1e-9);

    // Junction speed continuity, both orders.
    CHECK(sol.at_a_left.u0 ==
          doctest::Approx(sol.at_a_middle.u0).epsilon(1e-9));
    CHECK(sol.at_b_middle.u0 ==
          doctest::Approx(sol.at_b_right.u0).epsilon(1e-9));
    CHECK(sol.at_a_left.u0u1 ==
          doctest::Approx(sol.at_a_middle.u0u1).epsilon(1e-7).scale(1.0));
    CHECK(sol.at_b_middle.u0u1 ==
          doctest::Approx(sol.at_b_right.u0u1).epsilon(1e-7).scale(1.0));

    // Interior landings sit on the charged manifold.
    const double z1 = m.ions.z1, z2 = m.ions.z2, Q = m.charge.Q2;
    CHECK(std::abs(z1 * sol.at_a_middle.c10 + z2 * sol.at_a_middle.c20 + Q) <
          1e-11);
    CHECK(std::abs(z1 * sol.at_b_middle.c10 + z2 * sol.at_b_middle.c20 + Q) <
          1e-11);
  }
}

TEST_CASE("equilibrium data yields zero flux at both orders for any charge") {
  for (double Q : {-1.0, 0.0, 1.0}) {
    // Electroneutral and non-neutral boundary data; the latter has genuine
    // boundary layers at both ends.
    for (auto [l1, l2] : {std::pair{0.8, 0.4}, std::pair{1.0, 0.6}}) {
      ChannelModel m;
      m.ions = IonPair{1.0, -2.0, 0.0, 1.3};
      m.boundary = BoundaryData{0.0, l1, l2, l1, l2};
      m.geometry = ChannelGeometry::uniform(1.0 / 3.0, 2.0 / 3.0);
      m.charge = PermanentCharge{Q};
      const MatchingSolution sol = solve_matching(m);
      CAPTURE(Q);
      CAPTURE(l1);
      CHECK(std::abs(sol.fluxes.J10) < 1e-10);
      CHECK(std::abs(sol.fluxes.J20) < 1e-10);
      CHECK(std::abs(sol.fluxes.J11) < 1e-10);
      CHECK(std::abs(sol.fluxes.J21) < 1e-10);
    }
  }
}

TEST_CASE("zeroth-order rows contain no first-order unknowns") {
  const ChannelModel m = neck_model();
  const MatchingSolution sol = solve_matching(m);
  const auto r0 = assemble_residual(sol.state, m);
  for (int col = mslot::phi1_a; col <= mslot::phi1_bm; ++col) {
    MatchingState st = sol.state;
    st.u[col] += 0.37;  // large, deliberate perturbation
    const auto r1 = assemble_residual(st, m);
    for (int row = mrow::u_a; row <= mrow::span_h; ++row) {
      CAPTURE(row);
      CAPTURE(col);
      CHECK(r1[row] == r0[row]);  // bitwise: the rows never read these slots
    }
  }
}

TEST_CASE("residual sparsity matches the documented dependency structure") {
  const ChannelModel m = neck_model();  // asymmetric: no accidental zeros
  const MatchingSolution sol = solve_matching(m);

  // Columns each row may depend on.  a-side zeroth {0,1,2,8}, b-side zeroth
  // {3,4,5,9}, fluxes {6,7}, span {10}; first-order a-side {11,12,13,19},
  // b-side {14,15,16,20}, fluxes {17,18}.
  std::array<std::set<int>, 21> deps;
  deps[mrow::u_a] = {0, 1, 2, 8};
  deps[mrow::u_b] = {3, 4, 5, 9};
  deps[mrow::j1_left] = {0, 1, 2, 6};
  deps[mrow::j2_left] = {0, 1, 2, 7};
  deps[mrow::j1_right] = {3, 4, 5, 6};
  deps[mrow::j2_right] = {3, 4, 5, 7};
  deps[mrow::manifold_a] = {0, 1, 2, 8};
  deps[mrow::manifold_b] = {3, 4, 5, 9};
  deps[mrow::span_phi0] = {6, 7, 8, 9, 10};
  deps[mrow::span_c10] = {0, 1, 3, 4, 6, 7, 8, 9, 10};
  deps[mrow::span_h] = {0, 1, 6, 7, 8, 10};
  deps[mrow::uu_a] = {0, 1, 2, 8, 12, 13};
  deps[mrow::uu_b] = {3, 4, 5, 9, 15, 16};
  deps[mrow::landing_phi1_a] = {0, 1, 2, 8, 11, 12, 13, 19};
  deps[mrow::landing_phi1_b] = {3, 4, 5, 9, 14, 15, 16, 20};
  deps[mrow::j1_left_1] = {0, 1, 2, 11, 12, 13, 17};
  deps[mrow::j2_left_1] = {0, 1, 2, 11, 12, 13, 18};
  deps[mrow::j1_right_1] = {3, 4, 5, 14, 15, 16, 17};
  deps[mrow::j2_right_1] = {3, 4, 5, 14, 15, 16, 18};
  deps[mrow::span_c11] = {0, 1, 2,  3,  4,  5,  6,  7, 8,
                          9, 10, 12, 13, 15, 16, 17, 18};
  deps[mrow::span_phi1] = {0, 1, 2, 6, 7, 8, 10, 12, 13, 17, 18, 19, 20};

  const auto r0 = assemble_residual(sol.state, m);
  for (int col = 0; col <= mslot::phi1_bm; ++col) {
    MatchingState st = sol.state;
    st.u[col] += 1e-6 * (1.0 + std::abs(st.u[col]));
    const auto r1 = assemble_residual(st, m);
    for (int row = 0; row < 21; ++row) {
      CAPTURE(row);
      CAPTURE(col);
      if (deps[row].count(col) == 0) {
        CHECK(r1[row] == r0[row]);  // independent: bitwise unchanged
      }
    }
  }
  // Every listed dependency set is live: each row reacts to at least one of
  // its columns.
  for (int row = 0; row < 21; ++row) {
    double reaction = 0.0;
    for (int col : deps[row]) {
      MatchingState st = sol.state;
      st.u[col] += 1e-6 * (1.0 + std::abs(st.u[col]));
      reaction = std::max(reaction,
                          std::abs(assemble_residual(st, m)[row] - r0[row]));
    }
    CAPTURE(row);
    CHECK(reaction > 0.0);
  }
}

TEST_CASE("mirrored data and geometry negate the fluxes") {
  ChannelModel m = base_model();
  m.charge = PermanentCharge{0.8};
  const MatchingSolution sol = solve_matching(m);

  ChannelModel mr = m;
  mr.boundary = BoundaryData{-m.boundary.V, m.boundary.r1, m.boundary.r2,
                             m.boundary.l1, m.boundary.l2};
  // Uniform h and the interval (1/3, 2/3) are symmetric under x -> 1 - x.
  const MatchingSolution solr = solve_matching(mr);

  CHECK(solr.fluxes.J10 == doctest::Approx(-sol.fluxes.J10).epsilon(1e-8));
  CHECK(solr.fluxes.J20 == doctest::Approx(-sol.fluxes.J20).epsilon(1e-8));
  CHECK(solr.fluxes.J11 == doctest::Approx(-sol.fluxes.J11).epsilon(1e-8));
  CHECK(solr.fluxes.J21 == doctest::Approx(-sol.fluxes.J21).epsilon(1e-8));
  CHECK(solr.fluxes.I0(mr.ions) ==
        doctest::Approx(-sol.fluxes.I0(m.ions)).epsilon(1e-8));
}

TEST_CASE("voltage sweep with equal baths crosses zero current at V = 0") {
  ChannelModel m = base_model();
  m.boundary = BoundaryData{0.0, 2.0, 2.0, 2.0, 2.0};
  std::vector<double> grid;
  for (int i = -4; i <= 4; ++i) grid.push_back(0.25 * i);

  const auto sweep = continuation_sweep(m, SweepParameter::V, grid);
  REQUIRE(sweep.size() == grid.size());
  std::vector<double> current;
  for (size_t i = 0; i < sweep.size(); ++i) {
    CAPTURE(grid[i]);
    REQUIRE(sweep[i].converged);
    CHECK(sweep[i].value == grid[i]);
    current.push_back(sweep[i].fluxes.I0(m.ions));
  }
  // Zero crossing exactly at V = 0, strictly monotone current.
  CHECK(std::abs(current[4]) < 1e-10);
  CHECK(std::abs(sweep[4].fluxes.J11) < 1e-10);
  for (size_t i = 1; i < current.size(); ++i) CHECK(current[i] > current[i - 1]);
}

TEST_CASE("charge sweep is continuous through zero") {
  ChannelModel m = base_model();
  m.boundary = BoundaryData{0.4, 2.0, 2.0, 1.0, 1.0};
  std::vector<double> grid;
  for (int i = -5; i <= 5; ++i) grid.push_back(0.2 * i);

  const auto sweep = continuation_sweep(m, SweepParameter::Q, grid);
  for (const auto& pt : sweep) {
    CAPTURE(pt.value);
    REQUIRE(pt.converged);
  }
  for (size_t i = 1; i < sweep.size(); ++i) {
    CHECK(std::abs(sweep[i].fluxes.J10 - sweep[i - 1].fluxes.J10) < 0.6);
    CHECK(std::abs(sweep[i].fluxes.J11 - sweep[i - 1].fluxes.J11) < 3.0);
  }
  // The Q = 0 entry agrees with the single-region closed form.
  ChannelModel m0 = m;
  m0.charge = PermanentCharge{0.0};
  const LayerLimit L0 = left_outer_limit(m0.boundary, m0.ions);
  const LayerLimit R1 = right_outer_limit(m0.boundary, m0.ions);
  const OuterEndRegion full(L0, R1, 0.0, 1.0, m0.geometry, m0.ions);
  CHECK(sweep[5].fluxes.J10 == doctest::Approx(full.J10()).epsilon(1e-10));
  CHECK(sweep[5].fluxes.J21 == doctest::Approx(full.J21()).epsilon(1e-10));
}

TEST_CASE("diameter sweep leaves the expansion coefficients unchanged") {
  const ChannelModel m = base_model();
  const auto sweep = continuation_sweep(
      m, SweepParameter::D, std::vector<double>{0.0, 0.02, 0.05});
  REQUIRE(sweep.size() == 3);
  for (const auto& pt : sweep) REQUIRE(pt.converged);
  for (size_t i = 1; i < sweep.size(); ++i) {
    CHECK(sweep[i].fluxes.J10 ==
          doctest::Approx(sweep[0].fluxes.J10).epsilon(1e-11));
    CHECK(sweep[i].fluxes.J11 ==
          doctest::Approx(sweep[0].fluxes.J11).epsilon(1e-11));
  }
}

TEST_CASE("sweep records failures per point instead of throwing") {
  ChannelModel m = base_model();
  // lambda <= 0 is rejected by validation at one grid point only.
  const auto sweep = continuation_sweep(
      m, SweepParameter::Lambda, std::vector<double>{1.0, -2.0, 1.2});
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[0].converged);
  CHECK_FALSE(sweep[1].converged);
  CHECK_FALSE(sweep[1].message.empty());
  CHECK(sweep[1].fluxes.J10 == 0.0);
  CHECK(sweep[2].converged);
}

TEST_CASE("reversal mode zeroes the current at both orders") {
  ChannelModel m = base_model();
  m.boundary.V = 0.0;  // seed only
  const MatchingSolution sol = solve_reversal(m);
  CHECK(std::abs(sol.fluxes.I0(m.ions)) < 1e-12);
  CHECK(std::abs(sol.fluxes.I1(m.ions)) < 1e-12);
  CHECK(sol.state.reversal);

  // Solving the standard problem at the reported potential reproduces the
  // zero-current state.
  ChannelModel mv = m;
  mv.boundary.V = sol.state.u[mslot::V0];
  const MatchingSolution check = solve_matching(mv);
  CHECK(std::abs(check.fluxes.I0(mv.ions)) < 1e-9);
  CHECK(check.fluxes.J10 == doctest::Approx(sol.fluxes.J10).epsilon(1e-8));

  // 1:1 data with equal valence magnitudes: zero current forces equal
  // fluxes at each order.
  CHECK(sol.fluxes.J10 == doctest::Approx(sol.fluxes.J20).epsilon(1e-10));
  CHECK(sol.fluxes.J11 == doctest::Approx(sol.fluxes.J21).epsilon(1e-10));

  const MatchingSolution asym = solve_reversal(neck_model());
  CHECK(std::abs(asym.fluxes.I0(IonPair{1.0, -2.0, 0.0, 1.4})) < 1e-12);
  CHECK(std::abs(asym.fluxes.I1(IonPair{1.0, -2.0, 0.0, 1.4})) < 1e-12);
}

TEST_CASE("profile sampling is ordered, tagged, and consistent at junctions") {
  const ChannelModel m = neck_model();
  const MatchingSolution sol = solve_matching(m);
  const auto prof = sample_profile(sol, 64);
  REQUIRE(prof.size() == 3 * 64);

  const double a = m.geometry.a(), b = m.geometry.b();
  for (size_t i = 0; i < prof.size(); ++i) {
    const auto& p = prof[i];
    CHECK(p.region == static_cast<int>(i / 64));
    CHECK(p.c10 > 0.0);
    CHECK(p.c20 > 0.0);
    if (i % 64 != 0) CHECK(p.x >= prof[i - 1].x);
  }
  CHECK(prof.front().x == 0.0);
  CHECK(prof.back().x == doctest::Approx(1.0));
  CHECK(prof[63].x == doctest::Approx(a));
  CHECK(prof[64].x == doctest::Approx(a).epsilon(1e-9));
  CHECK(prof[2 * 64 - 1].x == doctest::Approx(b).epsilon(1e-9));

  // Region 1 carries the charged-manifold one-sided limits at a and b.
  CHECK(prof[64].c10 == doctest::Approx(sol.at_a_middle.c10).epsilon(1e-10));
  CHECK(prof[2 * 64 - 1].c10 ==
        doctest::Approx(sol.at_b_middle.c10).epsilon(1e-8));
  // Region 0 ends on the uncharged landing of the junction layer.
  CHECK(prof[63].c10 == doctest::Approx(sol.at_a_left.c10).epsilon(1e-10));
}

TEST_CASE("solver reports failure modes as typed errors") {
  ChannelModel m = neck_model();
  SolverOptions opts;
  opts.max_iterations = 1;
  opts.max_continuation_steps = 2;
  CHECK_THROWS_AS(solve_matching(m, opts), NoConvergence);

  ChannelModel bad = base_model();
  bad.boundary.l1 = -1.0;
  CHECK_THROWS_AS(solve_matching(bad), InvalidModel);
}

TEST_CASE("initial guess seeds reversal mode with zero applied potential") {
  const ChannelModel m = base_model();
  const MatchingState st = matching_initial_guess(m, true);
  CHECK(st.reversal);
  CHECK(st.u[mslot::V0] == 0.0);
  CHECK(st.u[mslot::V1] == 0.0);

  const MatchingState std_st = matching_initial_guess(m, false);
  CHECK_FALSE(std_st.reversal);
  // Junction electroneutrality holds at the uncharged guess.
  CHECK(std_st.u[mslot::c10_a] == doctest::Approx(std_st.u[mslot::c20_a]));
  CHECK(std_st.u[mslot::ystar] > 0.0);
}
