#ifndef IONFLUX_BVP_HPP
#define IONFLUX_BVP_HPP

/**
 * @file bvp.hpp
 * @brief Direct finite-epsilon, finite-d solution of the steady-state
 *        system on a layer-graded mesh.
 *
 * The solvers in matching.hpp construct the solution asymptotically (sharp
 * layers, expansion in the diameter d).  This module solves the same
 * boundary-value problem head on, with nothing expanded, and therefore
 * serves as the independent ground truth against which every asymptotic
 * formula in the library is measured.
 *
 * The discretization is a two-point collocation (box) scheme on the
 * first-order system
 *
 *     phi' = u/eps
 *     u'   = (-z1 c1 - z2 c2 - Q(x))/eps - (h'(x)/h(x)) u
 *     c1'  = -f1(c1,c2) u/eps - g1(c1,c2;J1,J2)/h(x)
 *     c2'  = -f2(c1,c2) u/eps - g2(c1,c2;J1,J2)/h(x)
 *
 * with f_k, g_k the collected hard-sphere coefficient functions of
 * model.hpp.  The flux densities J1, J2 are two extra global unknowns and
 * the six boundary values (potential and both concentrations at each end)
 * close the system.  Each mesh cell contributes four midpoint-collocation
 * equations; because the permanent-charge jump points a and b are mesh
 * nodes, every cell lies inside a single charge region and the jump needs
 * no smoothing.  The discrete transport rows share the single pair
 * (J1, J2), so flux constancy holds by construction, not as a converged
 * property.
 *
 * Newton's method with an analytic sparse Jacobian does the solving; steps
 * are damped until the concentration iterates stay positive and the scaled
 * residual decreases.  Hard cases are reached by continuation: epsilon is
 * walked down geometrically from an easy starting value, and if even the
 * first rung refuses a cold start the boundary potential is ramped up from
 * zero first.
 */

#include <vector>

#include "ionflux/model.hpp"

namespace ionflux {

/**
 * @brief Node set on [0,1] graded toward the four layer points {0, a, b, 1}.
 *
 * Roughly 40% of the nodes live in six half-zones hugging the layer points
 * (right of 0, both sides of a and b, left of 1), each of width
 * min(6 eps ln(1/eps), a quarter of the shortest charge interval), with
 * quadratic clustering toward the layer point; the rest are spread uniformly
 * over the three bulk gaps.  a and b are always nodes, so permanent-charge
 * jumps stay aligned with cell boundaries.
 */
struct Mesh {
  std::vector<double> x; ///< strictly increasing nodes, x.front()=0, x.back()=1

  int size() const { return static_cast<int>(x.size()); }

  /**
   * @brief Build a graded mesh with close to n nodes for a run at eps.
   * @throws InvalidModel when n is too small to carry the zone structure
   *         (fewer than 24 nodes).
   */
  static Mesh graded(const ChannelGeometry& geometry, double eps, int n = 2000);

  /// @throws InvalidModel unless nodes strictly increase from 0 to 1 and
  ///         a, b appear exactly.
  void validate(const ChannelGeometry& geometry) const;
};

/// Damped-Newton and continuation controls for the direct solver.
struct BvpOptions {
  double tolerance = 1e-10;  ///< convergence target, scaled infinity norm
  int max_iterations = 40;   ///< Newton iterations per continuation stage
  double min_step = 9.5367431640625e-7;  ///< smallest backtracking factor 2^-20
  double epsilon_start = 1e-1;  ///< first rung of the epsilon ladder
  int max_continuation_steps = 120;  ///< total stage budget (epsilon + V ramps)
  double jump_threshold = 0.5;  ///< per-cell |dphi| above this flags the mesh
  bool verbose = false;      ///< emit per-stage trace lines on stderr
};

/**
 * @brief Converged direct solution sampled on the mesh.
 *
 * The four field vectors run parallel to x.  J1 and J2 are single scalars:
 * they enter the discretization as global unknowns, so constancy across the
 * channel is structural.  All concentrations are strictly positive.
 */
struct Profile {
  std::vector<double> x;          ///< mesh nodes
  std::vector<double> phi;        ///< electric potential
  std::vector<double> u;          ///< eps * dphi/dx
  std::vector<double> c1, c2;     ///< ion concentrations
  double J1 = 0.0, J2 = 0.0;      ///< flux densities (global unknowns)

  double epsilon = 0.0;           ///< parameters the profile was solved at
  double d = 0.0;
  double residual_norm = 0.0;     ///< final scaled residual
  int newton_iterations = 0;      ///< accepted Newton steps, all stages
  int continuation_steps = 0;     ///< continuation stages solved (>= 1)

  int size() const { return static_cast<int>(x.size()); }
  double current(const IonPair& ions) const {
    return ions.z1 * J1 + ions.z2 * J2;
  }
};

/**
 * @brief Solve the full system on the given mesh at the model's eps and d.
 *
 * Cold starts begin from linear fields at the easiest rung of the epsilon
 * ladder (BvpOptions::epsilon_start, or the model's eps if that is larger)
 * and walk eps down geometrically, bisecting rungs that refuse to converge;
 * if the first rung itself fails, the boundary potential is ramped from 0
 * to its target value first.  Convergence means the scaled residual dropped
 * below BvpOptions::tolerance.
 *
 * After convergence an a posteriori indicator scans the per-cell potential
 * increments; a cell swallowing more than BvpOptions::jump_threshold of
 * potential drop means a layer fell between nodes.
 *
 * @throws InvalidModel    on bad model data or a mesh that fails validate().
 * @throws NoConvergence   when the continuation budget or the damping floor
 *                         is exhausted before the residual target is met.
 * @throws MeshTooCoarse   when the converged profile jumps too much inside
 *                         a single cell (layer under-resolution).
 */
Profile solve_bvp(const ChannelModel& model, const Mesh& mesh,
                  const BvpOptions& options = {});

/**
 * @brief One row of the asymptotic error table: the direct solve at
 *        (epsilon, d) measured against the matched-expansion fluxes.
 *
 * err_k is the relative gap |J_k - (J_k0 + d J_k1)| / max(1, |J_k0 + d J_k1|)
 * between the direct solve and the matched expansion at the same d.  rem_k
 * isolates the d-expansion remainder: the shared finite-epsilon offset is
 * removed by differencing against the d=0 direct solve on the same mesh,
 * rem_k = |J_k(eps,d) - J_k(eps,0) - d J_k1| (absolute), which is what the
 * quadratic-in-d order estimate is fitted on.  Rows of an epsilon scan leave
 * rem at zero.
 */
struct ComparisonRow {
  double epsilon = 0.0;
  double d = 0.0;
  double err1 = 0.0, err2 = 0.0;
  double rem1 = 0.0, rem2 = 0.0;
};

/**
 * @brief Asymptotic error table over an epsilon grid and a d grid, with
 *        observed-order estimates.
 *
 * The order estimates are least-squares slopes in log-log coordinates:
 * order_eps over the epsilon rows' err columns (meaningful when the model's
 * d is 0, where the matched expansion becomes exact in the eps -> 0 limit)
 * and order_d over the d rows' rem columns (the first-order remainder, which
 * is quadratic in d when the expansion carries every first-order term).
 */
struct AsymptoticComparison {
  std::vector<ComparisonRow> eps_rows;  ///< scan over epsilon at the model's d
  std::vector<ComparisonRow> d_rows;    ///< scan over d at the model's epsilon
  double order_eps1 = 0.0, order_eps2 = 0.0; ///< log-log slopes of err vs eps
  double order_d1 = 0.0, order_d2 = 0.0;     ///< log-log slopes of rem vs d
  FluxExpansion asymptotic;  ///< matched fluxes the table is measured against
};

/**
 * @brief Run the direct solver over the two grids and tabulate its distance
 *        from the matched expansion.
 *
 * Each epsilon row gets its own graded mesh (n nodes) and a fresh solve at
 * the model's d; the d rows share one mesh at the model's epsilon and are
 * differenced against a d=0 baseline solve.  Grid values must be positive
 * (d = 0 entries are allowed in the d grid and reduce to pure zeroth-order
 * validation).  Solver failures propagate.
 *
 * @throws InvalidModel on empty grids or nonpositive epsilon entries.
 */
AsymptoticComparison asymptotic_comparison(const ChannelModel& model,
                                           const std::vector<double>& eps_grid,
                                           const std::vector<double>& d_grid,
                                           int n = 2000,
                                           const BvpOptions& options = {});

}  // namespace ionflux

#endif  // IONFLUX_BVP_HPP
