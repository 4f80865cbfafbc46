#ifndef IONFLUX_MATCHING_HPP
#define IONFLUX_MATCHING_HPP

/**
 * @file matching.hpp
 * @brief Newton solver gluing layers and slow-manifold pieces into a global
 *        solution of the channel problem.
 *
 * The unknowns are the junction values at x = a and x = b (potential and
 * concentrations at both expansion orders), the flux densities, the landing
 * potentials on the charged interior manifold, and the interior span y*.
 * The residual rows demand that the layer limits, the three slow-manifold
 * solutions, and the flux densities all fit together: speeds and
 * conserved-quantity products match across each junction, the end-region
 * closed forms reproduce the trial fluxes, the interior landing points lie
 * on the charged manifold, and the interior profiles propagated over the
 * span reproduce the landing values at b.
 *
 * The system is block triangular: the zeroth-order rows contain no
 * first-order unknowns, so a converged zeroth-order block turns the
 * first-order block into a square linear system.  The solver exploits this
 * by solving the two blocks in sequence with a damped Newton iteration
 * (finite-difference Jacobian, QR factorization, per-row scaling frozen at
 * the initial guess).  For nonzero permanent charge the initial guess is the
 * closed-form Q = 0 solution, continued in Q when a direct solve fails.
 *
 * In reversal mode the applied potential V (and its first-order correction)
 * joins the unknowns and two zero-net-current rows close the system.
 */

#include <array>
#include <string>
#include <vector>

#include "ionflux/layers.hpp"
#include "ionflux/model.hpp"
#include "ionflux/outer.hpp"

namespace ionflux {

/// Slot indices of the matching-state vector.
namespace mslot {
constexpr int phi0_a = 0;   ///< zeroth-order potential at x = a
constexpr int c10_a = 1;    ///< zeroth-order cation concentration at x = a
constexpr int c20_a = 2;    ///< zeroth-order anion concentration at x = a
constexpr int phi0_b = 3;
constexpr int c10_b = 4;
constexpr int c20_b = 5;
constexpr int J10 = 6;      ///< zeroth-order flux densities
constexpr int J20 = 7;
constexpr int phi0_am = 8;  ///< landing potential on the charged manifold, at a
constexpr int phi0_bm = 9;  ///< ... at b
constexpr int ystar = 10;   ///< interior stretched span
constexpr int phi1_a = 11;  ///< first-order junction values at a
constexpr int c11_a = 12;
constexpr int c21_a = 13;
constexpr int phi1_b = 14;
constexpr int c11_b = 15;
constexpr int c21_b = 16;
constexpr int J11 = 17;     ///< first-order flux densities
constexpr int J21 = 18;
constexpr int phi1_am = 19; ///< first-order landing potentials
constexpr int phi1_bm = 20;
constexpr int V0 = 21;      ///< boundary potential (reversal mode only)
constexpr int V1 = 22;      ///< its first-order correction (reversal mode)
}  // namespace mslot

/// Residual-row indices, aligned with the state slots they primarily pin.
namespace mrow {
constexpr int u_a = 0;        ///< layer speed continuity at a
constexpr int u_b = 1;        ///< layer speed continuity at b
constexpr int j1_left = 2;    ///< J10 equals the left-region closed form
constexpr int j2_left = 3;
constexpr int j1_right = 4;   ///< J10 equals the right-region closed form
constexpr int j2_right = 5;
constexpr int manifold_a = 6; ///< landing at a lies on the charged manifold
constexpr int manifold_b = 7;
constexpr int span_phi0 = 8;  ///< interior potential propagated over y*
constexpr int span_c10 = 9;   ///< interior concentration propagated over y*
constexpr int span_h = 10;    ///< interior resistance matches H(b) - H(a)
constexpr int uu_a = 11;      ///< first-order speed-product continuity at a
constexpr int uu_b = 12;
constexpr int landing_phi1_a = 13;  ///< phi1 landing value at a
constexpr int landing_phi1_b = 14;
constexpr int j1_left_1 = 15; ///< J11 equals the left-region closed form
constexpr int j2_left_1 = 16;
constexpr int j1_right_1 = 17;
constexpr int j2_right_1 = 18;
constexpr int span_c11 = 19;  ///< interior first-order concentration at y*
constexpr int span_phi1 = 20; ///< interior first-order potential at y*
constexpr int current_0 = 21; ///< zero net current, zeroth order (reversal)
constexpr int current_1 = 22; ///< zero net current, first order (reversal)
}  // namespace mrow

/**
 * @brief Trial or converged point of the matching system.
 *
 * The first 21 slots are always active; the last two (V0, V1) join in
 * reversal mode, where the boundary potential is solved for.  At zeroth
 * order a vanishing permanent charge degenerates the junction layers, so
 * the speed rows are replaced by junction electroneutrality (and likewise
 * at first order); the residual layout is unchanged.
 */
struct MatchingState {
  static constexpr int kSlots = 23;
  std::array<double, kSlots> u{};         ///< unknowns, indexed by mslot
  std::array<double, kSlots> residual{};  ///< rows, indexed by mrow
  bool reversal = false;                  ///< V0/V1 slots active
};

/// Damped-Newton and continuation controls.
struct SolverOptions {
  double tolerance = 1e-10;  ///< convergence target, scaled infinity norm
  int max_iterations = 60;   ///< Newton iterations per block
  double min_step = 9.5367431640625e-7;  ///< smallest backtracking factor 2^-20
  double fd_step = 1e-7;     ///< finite-difference scale, h = fd_step*(1+|u|)
  int max_continuation_steps = 16;  ///< ramp length in Q after a failed direct solve
  bool verbose = false;      ///< emit per-iteration trace lines on stderr
};

/**
 * @brief Residual vector of the matching system at a trial state.
 *
 * Rows are indexed by mrow; inactive rows (the reversal rows in standard
 * mode) are zero.  Trial states on which a building block is infeasible
 * (nonpositive concentration, vanishing net charge density, ...) yield a
 * large finite penalty value in every active row instead of throwing, so
 * the Newton line search can step back from them.
 */
std::array<double, MatchingState::kSlots> assemble_residual(
    const MatchingState& state, const ChannelModel& model);

/**
 * @brief Closed-form initial guess: the solution of the Q = 0 problem, whose
 *        three regions merge into a single uncharged slow-manifold solution.
 *
 * Junction values are read off that solution at a and b, the landing
 * potentials coincide with the junction potentials, and the span comes from
 * the Q = 0 interior relation.  For Q = 0 models the guess is the exact
 * solution (up to roundoff); otherwise it seeds the continuation in Q.
 */
MatchingState matching_initial_guess(const ChannelModel& model,
                                     bool reversal = false);

/// Converged matching state with the reconstructed solution pieces.
struct MatchingSolution {
  MatchingState state;    ///< converged unknowns and final residuals
  FluxExpansion fluxes;   ///< J10, J20, J11, J21 from the converged state

  LayerLimit at_zero;     ///< boundary-layer limit at x = 0
  LayerLimit at_a_left;   ///< left limit of the junction layer at a
  LayerLimit at_a_middle; ///< charged-side limit at a
  LayerLimit at_b_middle; ///< charged-side limit at b
  LayerLimit at_b_right;  ///< right limit of the junction layer at b
  LayerLimit at_one;      ///< boundary-layer limit at x = 1

  OuterSolutionLeft left;
  OuterSolutionMiddle middle;
  OuterMiddleFirst middle_first;
  OuterSolutionRight right;

  int zeroth_iterations = 0;   ///< Newton iterations, zeroth block (all steps)
  int first_iterations = 0;    ///< Newton iterations, first block
  int continuation_steps = 1;  ///< Q-ramp points actually solved
  double residual_norm = 0.0;  ///< final scaled infinity norm
};

/**
 * @brief Solve the matching system for the given model.
 *
 * Solves the zeroth-order block (continuing in Q from the closed-form Q = 0
 * guess when the direct attempt fails), then the first-order block, which is
 * linear once the zeroth order is fixed.
 *
 * @throws NoConvergence    if Newton stalls or the continuation fails; the
 *         message carries the last residual norm.
 * @throws SingularJacobian if a Jacobian factorization degenerates; the
 *         message carries a condition estimate.
 */
MatchingSolution solve_matching(const ChannelModel& model,
                                const SolverOptions& opts = {});

/**
 * @brief Solve in reversal mode: the boundary potential V (and its
 *        first-order correction) become unknowns and the net current is
 *        driven to zero at both orders.  model.boundary.V only seeds the
 *        iteration.
 */
MatchingSolution solve_reversal(const ChannelModel& model,
                                const SolverOptions& opts = {});

/// Model parameter varied by continuation_sweep.
enum class SweepParameter { V, Q, D, Lambda };

/// One grid point of a parameter sweep.
struct SweepPoint {
  double value = 0.0;
  bool converged = false;
  std::string message;   ///< failure reason when not converged
  FluxExpansion fluxes;  ///< zero when not converged
};

/**
 * @brief Solve the matching system along a parameter grid, warm-starting
 *        each point from the previous converged state.
 *
 * Failures at individual grid points are recorded in the returned sequence
 * (converged = false plus a message) rather than thrown, so a sweep always
 * returns one entry per grid value, in order.
 */
std::vector<SweepPoint> continuation_sweep(const ChannelModel& model,
                                           SweepParameter parameter,
                                           const std::vector<double>& grid,
                                           const SolverOptions& opts = {});

/// One sample of the reconstructed spatial profiles.
struct ProfileSample {
  double x = 0.0;
  int region = 0;  ///< 0 on [0, a], 1 on (a, b), 2 on [b, 1]
  double phi0 = 0.0, phi1 = 0.0;
  double c10 = 0.0, c11 = 0.0;
  double c20 = 0.0, c21 = 0.0;
};

/**
 * @brief Sample the outer profiles of a converged solution.
 *
 * The end regions are sampled uniformly in x, the interior uniformly in the
 * stretched coordinate (which concentrates points where the profile is
 * steep); junction abscissae appear in every region they bound, carrying
 * the respective one-sided limits.
 */
std::vector<ProfileSample> sample_profile(const MatchingSolution& solution,
                                          int per_region = 256);

/// Consistency measures of a converged solution, all near zero when the
/// matching system, the interior closed forms, and the first-order flux
/// identity agree.
struct MatchingDiagnostics {
  double t1_identity = 0.0;       ///< defect of the interior T1 integral identity
  double y_star_gap = 0.0;        ///< span re-solved from limits vs. state
  double first_interp_gap = 0.0;  ///< re-interpolated (J11, J21) vs. state
};

MatchingDiagnostics matching_diagnostics(const MatchingSolution& solution);

}  // namespace ionflux

#endif  // IONFLUX_MATCHING_HPP
