/**
 * @file matching.cpp
 * @brief Damped-Newton solution of the junction-matching system.
 */

#include "ionflux/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include <Eigen/Dense>

#include "ionflux/errors.hpp"

namespace ionflux {

namespace {

using StateVec = std::array<double, MatchingState::kSlots>;

/// Residual value written into every active row of an infeasible trial state.
constexpr double kPenalty = 1e8;
/// Below this magnitude the permanent charge is treated as exactly zero and
/// the degenerate junction-layer rows switch to electroneutrality form.
constexpr double kTinyQ = 1e-12;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

JunctionValues junction_a(const StateVec& u) {
  return {u[mslot::phi0_a], u[mslot::c10_a], u[mslot::c20_a],
          u[mslot::phi1_a], u[mslot::c11_a], u[mslot::c21_a]};
}

JunctionValues junction_b(const StateVec& u) {
  return {u[mslot::phi0_b], u[mslot::c10_b], u[mslot::c20_b],
          u[mslot::phi1_b], u[mslot::c11_b], u[mslot::c21_b]};
}

/// Active rows and columns of one solve stage.
struct StagePlan {
  std::vector<int> rows, cols;
};

StagePlan zeroth_plan(bool reversal) {
  StagePlan p;
  p.rows = {mrow::u_a,        mrow::u_b,        mrow::j1_left,
            mrow::j2_left,    mrow::j1_right,   mrow::j2_right,
            mrow::manifold_a, mrow::manifold_b, mrow::span_phi0,
            mrow::span_c10,   mrow::span_h};
  p.cols = {mslot::phi0_a, mslot::c10_a,   mslot::c20_a,   mslot::phi0_b,
            mslot::c10_b,  mslot::c20_b,   mslot::J10,     mslot::J20,
            mslot::phi0_am, mslot::phi0_bm, mslot::ystar};
  if (reversal) {
    p.rows.push_back(mrow::current_0);
    p.cols.push_back(mslot::V0);
  }
  return p;
}

StagePlan first_plan(bool reversal) {
  StagePlan p;
  p.rows = {mrow::uu_a,           mrow::uu_b,      mrow::landing_phi1_a,
            mrow::landing_phi1_b, mrow::j1_left_1, mrow::j2_left_1,
            mrow::j1_right_1,     mrow::j2_right_1, mrow::span_c11,
            mrow::span_phi1};
  p.cols = {mslot::phi1_a, mslot::c11_a,   mslot::c21_a,   mslot::phi1_b,
            mslot::c11_b,  mslot::c21_b,   mslot::J11,     mslot::J21,
            mslot::phi1_am, mslot::phi1_bm};
  if (reversal) {
    p.rows.push_back(mrow::current_1);
    p.cols.push_back(mslot::V1);
  }
  return p;
}

/**
 * Fill the residual rows at the trial state u (and, when mag is given, a
 * per-row magnitude |lhs| + |rhs| used to freeze the row scaling).  Returns
 * false after writing the penalty value into every row if a building block
 * rejects the trial state or a row comes out non-finite.
 */
bool assemble(const ChannelModel& model, bool reversal, const StateVec& u,
              StateVec& r, StateVec* mag) {
  const IonPair& ions = model.ions;
  const double z1 = ions.z1, z2 = ions.z2;
  const double Q = model.charge.Q2;
  const bool charged = std::abs(Q) > kTinyQ;
  const ChannelGeometry& geom = model.geometry;

  r.fill(0.0);
  if (mag) mag->fill(1.0);
  const auto row = [&](int i, double value, double magnitude) {
    r[i] = value;
    if (mag) (*mag)[i] = magnitude;
  };
  const auto penalize = [&]() {
    r.fill(kPenalty);
    if (!reversal) r[mrow::current_0] = r[mrow::current_1] = 0.0;
    if (mag) mag->fill(1.0);
    return false;
  };

  try {
    BoundaryData bd = model.boundary;
    double V1 = 0.0;
    if (reversal) {
      bd.V = u[mslot::V0];
      V1 = u[mslot::V1];
    }
    const JunctionValues jva = junction_a(u);
    const JunctionValues jvb = junction_b(u);
    if (!(jva.c10 > 0.0) || !(jva.c20 > 0.0) || !(jvb.c10 > 0.0) ||
        !(jvb.c20 > 0.0)) {
      return penalize();
    }

    // Layer limits: boundary layers from the data, junction layers from the
    // trial junction values.  The uncharged sides land at their closed-form
    // potential; the charged sides land at the trial landing potentials.
    const LayerLimit L0 = left_outer_limit(bd, ions, V1);
    const LayerLimit R1l = right_outer_limit(bd, ions);
    const LayerLimit La = layer_limit_at(
        jva, 0.0, jva.phi0 - neutral_layer_drop(jva.c10, jva.c20, ions), -1.0,
        ions);
    const LayerLimit Rb = layer_limit_at(
        jvb, 0.0, jvb.phi0 - neutral_layer_drop(jvb.c10, jvb.c20, ions), +1.0,
        ions);
    const LayerLimit Ma = layer_limit_at(jva, Q, u[mslot::phi0_am], +1.0, ions);
    const LayerLimit Mb = layer_limit_at(jvb, Q, u[mslot::phi0_bm], -1.0, ions);

    const OuterEndRegion left(L0, La, 0.0, geom.a(), geom, ions);
    const OuterEndRegion right(Rb, R1l, geom.b(), 1.0, geom, ions);

    const double J10 = u[mslot::J10], J20 = u[mslot::J20];
    const double T0 = J10 + J20, I0 = z1 * J10 + z2 * J20;
    const double ys = u[mslot::ystar];
    const MiddleField mid{ions, Q, T0, I0, J10, Ma.c10};

    // --- zeroth-order rows -------------------------------------------------
    if (charged) {
      row(mrow::u_a, La.u0 - Ma.u0, std::abs(La.u0) + std::abs(Ma.u0));
      row(mrow::u_b, Mb.u0 - Rb.u0, std::abs(Mb.u0) + std::abs(Rb.u0));
    } else {
      // Both junction layers are absent; the junction values themselves lie
      // on the uncharged manifold.
      row(mrow::u_a, z1 * jva.c10 + z2 * jva.c20,
          z1 * jva.c10 - z2 * jva.c20);
      row(mrow::u_b, z1 * jvb.c10 + z2 * jvb.c20,
          z1 * jvb.c10 - z2 * jvb.c20);
    }
    row(mrow::j1_left, J10 - left.J10(), std::abs(J10) + std::abs(left.J10()));
    row(mrow::j2_left, J20 - left.J20(), std::abs(J20) + std::abs(left.J20()));
    row(mrow::j1_right, J10 - right.J10(),
        std::abs(J10) + std::abs(right.J10()));
    row(mrow::j2_right, J20 - right.J20(),
        std::abs(J20) + std::abs(right.J20()));
    row(mrow::manifold_a, z1 * Ma.c10 + z2 * Ma.c20 + Q,
        z1 * Ma.c10 - z2 * Ma.c20 + std::abs(Q));
    row(mrow::manifold_b, z1 * Mb.c10 + z2 * Mb.c20 + Q,
        z1 * Mb.c10 - z2 * Mb.c20 + std::abs(Q));
    row(mrow::span_phi0, u[mslot::phi0_bm] - u[mslot::phi0_am] + I0 * ys,
        std::abs(u[mslot::phi0_bm]) + std::abs(u[mslot::phi0_am]) +
            std::abs(I0 * ys));
    const double c_exit = mid.c10(ys);
    row(mrow::span_c10, c_exit - Mb.c10, std::abs(c_exit) + std::abs(Mb.c10));
    const double dH = geom.Hb() - geom.Ha();
    const double res = mid.resistance(ys);
    row(mrow::span_h, res - dH, std::abs(res) + dH);
    if (reversal) {
      row(mrow::current_0, z1 * J10 + z2 * J20,
          std::abs(z1 * J10) + std::abs(z2 * J20));
    }

    // --- first-order rows --------------------------------------------------
    const double J11 = u[mslot::J11], J21 = u[mslot::J21];
    const double T1 = J11 + J21;
    // The speed-product rows vanish identically as Q -> 0; dividing by Q
    // (floored so roundoff in the O(1) summands stays below tolerance) keeps
    // the first-order unknowns sharply determined for small charges.
    const double qs = charged ? 1.0 / std::max(std::abs(Q), 1e-5) : 1.0;
    if (charged) {
      row(mrow::uu_a, (La.u0u1 - Ma.u0u1) * qs,
          (std::abs(La.u0u1) + std::abs(Ma.u0u1)) * qs);
      row(mrow::uu_b, (Mb.u0u1 - Rb.u0u1) * qs,
          (std::abs(Mb.u0u1) + std::abs(Rb.u0u1)) * qs);
    } else {
      row(mrow::uu_a, z1 * u[mslot::c11_a] + z2 * u[mslot::c21_a],
          std::abs(z1 * u[mslot::c11_a]) + std::abs(z2 * u[mslot::c21_a]));
      row(mrow::uu_b, z1 * u[mslot::c11_b] + z2 * u[mslot::c21_b],
          std::abs(z1 * u[mslot::c11_b]) + std::abs(z2 * u[mslot::c21_b]));
    }
    row(mrow::landing_phi1_a, u[mslot::phi1_am] - Ma.phi1,
        std::abs(u[mslot::phi1_am]) + std::abs(Ma.phi1));
    row(mrow::landing_phi1_b, u[mslot::phi1_bm] - Mb.phi1,
        std::abs(u[mslot::phi1_bm]) + std::abs(Mb.phi1));
    row(mrow::j1_left_1, J11 - left.J11(),
        std::abs(J11) + std::abs(left.J11()));
    row(mrow::j2_left_1, J21 - left.J21(),
        std::abs(J21) + std::abs(left.J21()));
    row(mrow::j1_right_1, J11 - right.J11(),
        std::abs(J11) + std::abs(right.J11()));
    row(mrow::j2_right_1, J21 - right.J21(),
        std::abs(J21) + std::abs(right.J21()));
    const double c11_exit = mid.c11(ys, T1, J11, Ma.c11);
    row(mrow::span_c11, c11_exit - Mb.c11,
        std::abs(c11_exit) + std::abs(Mb.c11));
    const double phi1_exit =
        mid.phi1(ys, T1, J11, u[mslot::phi1_am], Ma.c11);
    row(mrow::span_phi1, phi1_exit - u[mslot::phi1_bm],
        std::abs(phi1_exit) + std::abs(u[mslot::phi1_bm]));
    if (reversal) {
      row(mrow::current_1, z1 * J11 + z2 * J21,
          std::abs(z1 * J11) + std::abs(z2 * J21));
    }
  } catch (const Error&) {
    return penalize();
  }

  for (double v : r) {
    if (!std::isfinite(v)) return penalize();
  }
  if (mag) {
    for (double& m : *mag) {
      if (!std::isfinite(m)) m = 1.0;
    }
  }
  return true;
}

double scaled_norm(const StateVec& r, const std::vector<int>& rows,
                   const StateVec& scale) {
  double n = 0.0;
  for (int i : rows) n = std::max(n, std::abs(r[i]) / scale[i]);
  return n;
}

/**
 * Damped Newton iteration on one block of the system.  The Jacobian is a
 * forward finite difference (falling back to backward when the forward
 * trial is infeasible), factorized with column-pivoted QR; rows are scaled
 * by max(1, magnitude at entry), frozen for the whole block solve.
 * Returns the iteration count; u holds the converged block on return.
 */
int newton_block(const ChannelModel& model, bool reversal, StateVec& u,
                 const StagePlan& plan, const SolverOptions& opts,
                 const char* stage) {
  const int n = static_cast<int>(plan.rows.size());
  StateVec r{}, magv{};
  if (!assemble(model, reversal, u, r, &magv)) {
    throw NoConvergence(std::string("matching ") + stage +
                        " block: infeasible start state");
  }
  StateVec scale;
  scale.fill(1.0);
  for (int i : plan.rows) scale[i] = std::max(1.0, magv[i]);
  double norm = scaled_norm(r, plan.rows, scale);

  int iters = 0;
  for (; iters < opts.max_iterations && norm >= opts.tolerance; ++iters) {
    Eigen::MatrixXd J(n, n);
    StateVec rp{};
    for (int jc = 0; jc < n; ++jc) {
      const int col = plan.cols[jc];
      const double h = opts.fd_step * (1.0 + std::abs(u[col]));
      StateVec up = u;
      up[col] = u[col] + h;
      double hs = h;
      if (!assemble(model, reversal, up, rp, nullptr)) {
        up[col] = u[col] - h;
        hs = -h;
        if (!assemble(model, reversal, up, rp, nullptr)) {
          throw NoConvergence(std::string("matching ") + stage +
                              " block: both finite-difference trials of "
                              "column " +
                              std::to_string(col) + " are infeasible");
        }
      }
      for (int ir = 0; ir < n; ++ir) {
        J(ir, jc) = (rp[plan.rows[ir]] - r[plan.rows[ir]]) /
                    (hs * scale[plan.rows[ir]]);
      }
    }
    Eigen::VectorXd rhs(n);
    for (int ir = 0; ir < n; ++ir) {
      rhs(ir) = -r[plan.rows[ir]] / scale[plan.rows[ir]];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
    if (qr.rank() < n) {
      const auto diag = qr.matrixQR().diagonal().cwiseAbs().eval();
      const double cond =
          diag.maxCoeff() / std::max(diag.minCoeff(), 1e-300);
      throw SingularJacobian(std::string("matching ") + stage +
                             " block: rank-deficient Jacobian (condition "
                             "estimate " +
                             fmt(cond) + ")");
    }
    const Eigen::VectorXd step = qr.solve(rhs);

    bool accepted = false;
    StateVec ut{}, rt{};
    double alpha = 1.0;
    for (; alpha >= opts.min_step; alpha *= 0.5) {
      ut = u;
      for (int jc = 0; jc < n; ++jc) {
        ut[plan.cols[jc]] = u[plan.cols[jc]] + alpha * step(jc);
      }
      if (!assemble(model, reversal, ut, rt, nullptr)) continue;
      if (scaled_norm(rt, plan.rows, scale) < norm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw NoConvergence(std::string("matching ") + stage +
                          " block: line search stalled, residual " +
                          fmt(norm));
    }
    u = ut;
    r = rt;
    norm = scaled_norm(r, plan.rows, scale);
    if (opts.verbose) {
      std::fprintf(stderr, "[matching] %s iter %d residual %.3e step %.3g\n",
                   stage, iters + 1, norm, alpha);
    }
  }
  if (norm >= opts.tolerance) {
    throw NoConvergence(std::string("matching ") + stage + " block: residual " +
                        fmt(norm) + " after " +
                        std::to_string(opts.max_iterations) + " iterations");
  }
  return iters;
}

/// Re-seed the interior unknowns (landing potentials and span) from the
/// current junction values before a Newton run; without this the seed sits
/// on the square-root corner of a just-born layer, where the finite
/// difference slope blows up.  Failures leave the previous values in place.
void refresh_interior_guess(const ChannelModel& model, StateVec& u) {
  const double Q = model.charge.Q2;
  const JunctionValues jva = junction_a(u);
  const JunctionValues jvb = junction_b(u);
  try {
    u[mslot::phi0_am] = middle_phi0_root(jva, Q, model.ions);
  } catch (const Error&) {
  }
  try {
    u[mslot::phi0_bm] = middle_phi0_root(jvb, Q, model.ions);
  } catch (const Error&) {
  }
  try {
    const LayerLimit Ma =
        layer_limit_at(jva, Q, u[mslot::phi0_am], +1.0, model.ions);
    const LayerLimit Mb =
        layer_limit_at(jvb, Q, u[mslot::phi0_bm], -1.0, model.ions);
    const OuterSolutionMiddle mid(Ma, Mb, Q, model.geometry, model.ions);
    u[mslot::ystar] = mid.y_star();
  } catch (const Error&) {
  }
}

/// Root-based layer limit for a converged state, with a fallback for the
/// absent-layer case where the u1 ratio is indeterminate: re-evaluate at the
/// solved landing potential with u1 reported as 0.
template <typename F, typename G>
LayerLimit limit_or_degenerate(const F& primary, const G& fallback) {
  try {
    return primary();
  } catch (const DegenerateLayer&) {
    return fallback();
  }
}

MatchingSolution build_solution(const ChannelModel& model, bool reversal,
                                const StateVec& u, int it0, int it1,
                                int steps) {
  const IonPair& ions = model.ions;
  const ChannelGeometry& geom = model.geometry;
  const double Q = model.charge.Q2;
  BoundaryData bd = model.boundary;
  double V1 = 0.0;
  if (reversal) {
    bd.V = u[mslot::V0];
    V1 = u[mslot::V1];
  }
  const JunctionValues jva = junction_a(u);
  const JunctionValues jvb = junction_b(u);

  const LayerLimit L0 = left_outer_limit(bd, ions, V1);
  const LayerLimit R1l = right_outer_limit(bd, ions);
  const LayerLimit La = limit_or_degenerate(
      [&] { return internal_limit_left_of_a(jva, ions); },
      [&] {
        return layer_limit_at(
            jva, 0.0, jva.phi0 - neutral_layer_drop(jva.c10, jva.c20, ions),
            -1.0, ions);
      });
  const LayerLimit Rb = limit_or_degenerate(
      [&] { return right_entry_limit(jvb, ions); },
      [&] {
        return layer_limit_at(
            jvb, 0.0, jvb.phi0 - neutral_layer_drop(jvb.c10, jvb.c20, ions),
            +1.0, ions);
      });
  const LayerLimit Ma = limit_or_degenerate(
      [&] { return middle_entry_limit(jva, Q, ions); },
      [&] {
        return layer_limit_at(jva, Q, middle_phi0_root(jva, Q, ions), +1.0,
                              ions);
      });
  const LayerLimit Mb = limit_or_degenerate(
      [&] { return middle_exit_limit(jvb, Q, ions); },
      [&] {
        return layer_limit_at(jvb, Q, middle_phi0_root(jvb, Q, ions), -1.0,
                              ions);
      });

  const OuterSolutionLeft left(L0, La, 0.0, geom.a(), geom, ions);
  const OuterSolutionMiddle middle(Ma, Mb, Q, geom, ions);
  const OuterMiddleFirst middle_first(Ma, Mb, middle);
  const OuterSolutionRight right(Rb, R1l, geom.b(), 1.0, geom, ions);

  MatchingState st;
  st.u = u;
  st.reversal = reversal;
  StateVec magv{};
  assemble(model, reversal, u, st.residual, &magv);
  const StagePlan z = zeroth_plan(reversal), f = first_plan(reversal);
  double norm = 0.0;
  for (const auto& plan : {z, f}) {
    for (int i : plan.rows) {
      norm = std::max(norm, std::abs(st.residual[i]) / std::max(1.0, magv[i]));
    }
  }

  FluxExpansion fx;
  fx.J10 = u[mslot::J10];
  fx.J20 = u[mslot::J20];
  fx.J11 = u[mslot::J11];
  fx.J21 = u[mslot::J21];

  return MatchingSolution{st,  fx,   L0,  La,    Ma,  Mb,  Rb,   R1l,
                          left, middle, middle_first, right,
                          it0, it1,  steps, norm};
}

/// Full solve: optional warm start, else cold start from the Q = 0 guess
/// with a direct attempt and a linear ramp in Q as fallback.
MatchingSolution solve_core(const ChannelModel& model,
                            const SolverOptions& opts, bool reversal,
                            const StateVec* warm) {
  model.validate();
  const StagePlan z = zeroth_plan(reversal), f = first_plan(reversal);

  if (warm != nullptr) {
    StateVec v = *warm;
    try {
      refresh_interior_guess(model, v);
      const int i0 = newton_block(model, reversal, v, z, opts, "zeroth");
      const int i1 = newton_block(model, reversal, v, f, opts, "first");
      return build_solution(model, reversal, v, i0, i1, 1);
    } catch (const Error&) {
      // fall through to the cold start
    }
  }

  const MatchingState guess = matching_initial_guess(model, reversal);
  StateVec v = guess.u;
  const double Qf = model.charge.Q2;
  int it0 = 0;
  int steps = 1;
  if (std::abs(Qf) <= kTinyQ) {
    it0 = newton_block(model, reversal, v, z, opts, "zeroth");
  } else {
    bool direct = false;
    try {
      StateVec w = v;
      refresh_interior_guess(model, w);
      it0 = newton_block(model, reversal, w, z, opts, "zeroth");
      v = w;
      direct = true;
    } catch (const Error&) {
    }
    if (!direct) {
      const int n = std::max(1, opts.max_continuation_steps);
      it0 = 0;
      for (int k = 1; k <= n; ++k) {
        ChannelModel mk = model;
        mk.charge.Q2 = Qf * k / n;
        refresh_interior_guess(mk, v);
        try {
          it0 += newton_block(mk, reversal, v, z, opts, "zeroth");
        } catch (const Error& e) {
          throw NoConvergence("matching continuation failed at Q = " +
                              fmt(mk.charge.Q2) + ": " + e.what());
        }
      }
      steps = n;
    }
  }
  const int it1 = newton_block(model, reversal, v, f, opts, "first");
  return build_solution(model, reversal, v, it0, it1, steps);
}

}  // namespace

std::array<double, MatchingState::kSlots> assemble_residual(
    const MatchingState& state, const ChannelModel& model) {
  model.validate();
  StateVec r{};
  assemble(model, state.reversal, state.u, r, nullptr);
  return r;
}

MatchingState matching_initial_guess(const ChannelModel& model,
                                     bool reversal) {
  model.validate();
  const IonPair& ions = model.ions;
  const ChannelGeometry& geom = model.geometry;
  BoundaryData bd = model.boundary;
  if (reversal) bd.V = 0.0;
  const double a = geom.a(), b = geom.b();

  // With Q = 0 the three subintervals merge into one uncharged region whose
  // solution is in closed form; read the junction values off it.
  const LayerLimit L0 = left_outer_limit(bd, ions);
  const LayerLimit R1l = right_outer_limit(bd, ions);
  const OuterEndRegion full(L0, R1l, 0.0, 1.0, geom, ions);

  MatchingState st;
  st.reversal = reversal;
  auto& u = st.u;
  u[mslot::phi0_a] = full.phi0(a);
  u[mslot::c10_a] = full.c10(a);
  u[mslot::c20_a] = full.c20(a);
  u[mslot::phi0_b] = full.phi0(b);
  u[mslot::c10_b] = full.c10(b);
  u[mslot::c20_b] = full.c20(b);
  u[mslot::J10] = full.J10();
  u[mslot::J20] = full.J20();
  u[mslot::phi0_am] = u[mslot::phi0_a];
  u[mslot::phi0_bm] = u[mslot::phi0_b];
  u[mslot::phi1_a] = full.phi1(a);
  u[mslot::c11_a] = full.c11(a);
  u[mslot::c21_a] = full.c21(a);
  u[mslot::phi1_b] = full.phi1(b);
  u[mslot::c11_b] = full.c11(b);
  u[mslot::c21_b] = full.c21(b);
  u[mslot::J11] = full.J11();
  u[mslot::J21] = full.J21();
  u[mslot::phi1_am] = u[mslot::phi1_a];
  u[mslot::phi1_bm] = u[mslot::phi1_b];
  u[mslot::V0] = bd.V;
  u[mslot::V1] = 0.0;

  LayerLimit la, lb;
  la.phi0 = u[mslot::phi0_a];
  la.c10 = u[mslot::c10_a];
  la.phi1 = u[mslot::phi1_a];
  la.c11 = u[mslot::c11_a];
  lb.phi0 = u[mslot::phi0_b];
  lb.c10 = u[mslot::c10_b];
  lb.phi1 = u[mslot::phi1_b];
  lb.c11 = u[mslot::c11_b];
  u[mslot::ystar] = OuterSolutionMiddle(la, lb, 0.0, geom, ions).y_star();

  st.residual = assemble_residual(st, model);
  return st;
}

MatchingSolution solve_matching(const ChannelModel& model,
                                const SolverOptions& opts) {
  return solve_core(model, opts, /*reversal=*/false, nullptr);
}

MatchingSolution solve_reversal(const ChannelModel& model,
                                const SolverOptions& opts) {
  return solve_core(model, opts, /*reversal=*/true, nullptr);
}

std::vector<SweepPoint> continuation_sweep(const ChannelModel& model,
                                           SweepParameter parameter,
                                           const std::vector<double>& grid,
                                           const SolverOptions& opts) {
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  std::optional<StateVec> warm;
  for (double value : grid) {
    ChannelModel mk = model;
    switch (parameter) {
      case SweepParameter::V:
        mk.boundary.V = value;
        break;
      case SweepParameter::Q:
        mk.charge.Q2 = value;
        break;
      case SweepParameter::D:
        mk.ions.d = value;
        break;
      case SweepParameter::Lambda:
        mk.ions.lambda = value;
        break;
    }
    SweepPoint pt;
    pt.value = value;
    try {
      const MatchingSolution sol =
          solve_core(mk, opts, /*reversal=*/false, warm ? &*warm : nullptr);
      pt.converged = true;
      pt.fluxes = sol.fluxes;
      warm = sol.state.u;
    } catch (const Error& e) {
      pt.message = e.what();
      warm.reset();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<ProfileSample> sample_profile(const MatchingSolution& solution,
                                          int per_region) {
  const int n = std::max(2, per_region);
  std::vector<ProfileSample> out;
  out.reserve(3 * static_cast<size_t>(n));
  const double a = solution.left.x_end();
  const double b = solution.right.x_start();
  for (int i = 0; i < n; ++i) {
    const double x = a * i / (n - 1.0);
    out.push_back({x, 0, solution.left.phi0(x), solution.left.phi1(x),
                   solution.left.c10(x), solution.left.c11(x),
                   solution.left.c20(x), solution.left.c21(x)});
  }
  const double ys = solution.middle.y_star();
  for (int i = 0; i < n; ++i) {
    const double y = ys * i / (n - 1.0);
    const double x = solution.middle.tau(y);
    out.push_back({x, 1, solution.middle.phi0(y),
                   solution.middle_first.phi1(y), solution.middle.c10(y),
                   solution.middle_first.c11(y), solution.middle.c20(y),
                   solution.middle_first.c21(y)});
  }
  for (int i = 0; i < n; ++i) {
    const double x = b + (1.0 - b) * i / (n - 1.0);
    out.push_back({x, 2, solution.right.phi0(x), solution.right.phi1(x),
                   solution.right.c10(x), solution.right.c11(x),
                   solution.right.c20(x), solution.right.c21(x)});
  }
  return out;
}

MatchingDiagnostics matching_diagnostics(const MatchingSolution& solution) {
  const auto& u = solution.state.u;
  MatchingDiagnostics d;
  d.t1_identity = solution.middle_first.t1_relation_residual(
      u[mslot::J11] + u[mslot::J21]);
  d.y_star_gap = std::abs(solution.middle.y_star() - u[mslot::ystar]);
  d.first_interp_gap =
      std::max(std::abs(solution.middle_first.J11() - u[mslot::J11]),
               std::abs(solution.middle_first.J21() - u[mslot::J21]));
  return d;
}

}  // namespace ionflux
