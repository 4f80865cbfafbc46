#include "ionflux/bvp.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ionflux/errors.hpp"
#include "ionflux/matching.hpp"

namespace ionflux {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Unknown layout: y[4i+0..3] = (phi, u, c1, c2) at node i; J1, J2 trail.
constexpr int kPhi = 0, kU = 1, kC1 = 2, kC2 = 3;

/// Coefficient functions f_k, g_k together with every partial derivative the
/// cell Jacobian needs.  Values match eval_fg exactly; the derivatives are
/// the hand-differentiated polynomials (f depends on c only, g on c and J).
struct FGDeriv {
  double f1, f2, g1, g2;
  double f1c1, f1c2, f2c1, f2c2;
  double g1c1, g1c2, g2c1, g2c2;
  double g1J1, g1J2, g2J1, g2J2;
};

FGDeriv fg_with_derivs(double c1, double c2, double J1, double J2,
                       const IonPair& ions) {
  const double z1 = ions.z1, z2 = ions.z2, d = ions.d, lam = ions.lambda;
  const double d2 = d * d;
  const double s = c1 + lam * lam * c2;  // size mix
  const double rho = z1 * c1 + z2 * c2;  // charge density
  FGDeriv v;
  v.f1 = z1 * c1 - (2.0 * z1 * c1 + (1.0 + lam) * z2 * c2) * c1 * d +
         s * rho * c1 * d2;
  v.f2 = z2 * c2 - (2.0 * lam * z2 * c2 + (1.0 + lam) * z1 * c1) * c2 * d +
         s * rho * c2 * d2;
  v.g1 = J1 - (2.0 * J1 + (1.0 + lam) * J2) * c1 * d +
         s * (J1 + J2) * c1 * d2;
  v.g2 = J2 - (2.0 * lam * J2 + (1.0 + lam) * J1) * c2 * d +
         s * (J1 + J2) * c2 * d2;
  v.f1c1 = z1 - (4.0 * z1 * c1 + (1.0 + lam) * z2 * c2) * d +
           (s * rho + c1 * (rho + s * z1)) * d2;
  v.f1c2 = -(1.0 + lam) * z2 * c1 * d + c1 * (lam * lam * rho + s * z2) * d2;
  v.f2c1 = -(1.0 + lam) * z1 * c2 * d + c2 * (rho + s * z1) * d2;
  v.f2c2 = z2 - (4.0 * lam * z2 * c2 + (1.0 + lam) * z1 * c1) * d +
           (s * rho + c2 * (lam * lam * rho + s * z2)) * d2;
  v.g1c1 = -(2.0 * J1 + (1.0 + lam) * J2) * d + (J1 + J2) * (s + c1) * d2;
  v.g1c2 = (J1 + J2) * c1 * lam * lam * d2;
  v.g2c1 = (J1 + J2) * c2 * d2;
  v.g2c2 = -(2.0 * lam * J2 + (1.0 + lam) * J1) * d +
           (J1 + J2) * (s + lam * lam * c2) * d2;
  v.g1J1 = 1.0 - 2.0 * c1 * d + s * c1 * d2;
  v.g1J2 = -(1.0 + lam) * c1 * d + s * c1 * d2;
  v.g2J1 = -(1.0 + lam) * c2 * d + s * c2 * d2;
  v.g2J2 = 1.0 - 2.0 * lam * c2 * d + s * c2 * d2;
  return v;
}

/**
 * Assemble the residual (and optionally the matching Jacobian triplets) of
 * the collocation system at state y.  Each cell row is
 * (y_{i+1}-y_i)/h_i - F(midpoint); boundary rows are y - target.  The
 * returned convergence measure is the infinity norm of the rows scaled by
 * 1/(1+|F|) (1/(1+|target|) for boundary rows), which keeps the threshold
 * meaningful across the strongly varying row magnitudes; the rows themselves
 * stay unscaled, which changes nothing about the Newton step.
 *
 * Before scaling, each cell row is credited its representable-precision
 * floor: differencing O(1) nodal values across the finest graded cells
 * cannot produce quotients more accurate than eps_machine*|y|/h_i, so that
 * amount (plus the evaluation roundoff of F, bounded by the absolute-value
 * sum of its terms) is subtracted from |r| first.  The floor only matters in
 * deep-layer cells during continuation stages whose layers are still wide;
 * everywhere else it sits far below the tolerance.
 */
double assemble(const ChannelModel& m, double eps, double V, const Mesh& mesh,
                const Eigen::VectorXd& y, Eigen::VectorXd* res,
                std::vector<Triplet>* trips) {
  const int N = mesh.size();
  const int jJ1 = 4 * N, jJ2 = 4 * N + 1;
  const double z1 = m.ions.z1, z2 = m.ions.z2;
  const double J1 = y[jJ1], J2 = y[jJ2];
  if (res) res->setZero(4 * N + 2);
  if (trips) {
    trips->clear();
    trips->reserve(26 * static_cast<size_t>(N));
  }
  double norm = 0.0;
  constexpr double kRoundoff = 4.0 * 2.220446049250313e-16;
  auto record = [&](int row, double r, double fval, double fmag,
                    double diffmag) {
    const double floor = kRoundoff * (diffmag + fmag);
    const double scaled =
        std::max(0.0, std::abs(r) - floor) / (1.0 + std::abs(fval));
    norm = std::max(norm, scaled);
    if (res) (*res)[row] = r;
  };
  for (int i = 0; i + 1 < N; ++i) {
    const int o = 4 * i;
    const double hi = mesh.x[i + 1] - mesh.x[i];
    const double xm = 0.5 * (mesh.x[i] + mesh.x[i + 1]);
    const double hx = m.geometry.h(xm);
    const double gr = m.geometry.dh(xm) / hx;
    const double Qx = m.Q_at(xm);
    const double um = 0.5 * (y[o + kU] + y[o + 4 + kU]);
    const double c1m = 0.5 * (y[o + kC1] + y[o + 4 + kC1]);
    const double c2m = 0.5 * (y[o + kC2] + y[o + 4 + kC2]);
    const FGDeriv v = fg_with_derivs(c1m, c2m, J1, J2, m.ions);

    const double F0 = um / eps;
    const double F1 = (-z1 * c1m - z2 * c2m - Qx) / eps - gr * um;
    const double F2 = -v.f1 * um / eps - v.g1 / hx;
    const double F3 = -v.f2 * um / eps - v.g2 / hx;
    const double M0 = std::abs(F0);
    const double M1 = (z1 * std::abs(c1m) - z2 * std::abs(c2m) +
                       std::abs(Qx)) / eps + std::abs(gr * um);
    const double M2 = std::abs(v.f1 * um) / eps + std::abs(v.g1) / hx;
    const double M3 = std::abs(v.f2 * um) / eps + std::abs(v.g2) / hx;
    auto diffmag = [&](int k) {
      return (std::abs(y[o + k]) + std::abs(y[o + 4 + k])) / hi;
    };
    record(o + 0, (y[o + 4 + kPhi] - y[o + kPhi]) / hi - F0, F0, M0,
           diffmag(kPhi));
    record(o + 1, (y[o + 4 + kU] - y[o + kU]) / hi - F1, F1, M1,
           diffmag(kU));
    record(o + 2, (y[o + 4 + kC1] - y[o + kC1]) / hi - F2, F2, M2,
           diffmag(kC1));
    record(o + 3, (y[o + 4 + kC2] - y[o + kC2]) / hi - F3, F3, M3,
           diffmag(kC2));
    if (!trips) continue;
    auto put = [&](int row, int col, double val) {
      trips->emplace_back(row, col, val);
    };
    // phi row: d(phi)/dx = u/eps
    put(o + 0, o + kPhi, -1.0 / hi);
    put(o + 0, o + 4 + kPhi, 1.0 / hi);
    put(o + 0, o + kU, -0.5 / eps);
    put(o + 0, o + 4 + kU, -0.5 / eps);
    // u row: d(u)/dx = (-z1 c1 - z2 c2 - Q)/eps - (h'/h) u
    put(o + 1, o + kU, -1.0 / hi + 0.5 * gr);
    put(o + 1, o + 4 + kU, 1.0 / hi + 0.5 * gr);
    put(o + 1, o + kC1, 0.5 * z1 / eps);
    put(o + 1, o + 4 + kC1, 0.5 * z1 / eps);
    put(o + 1, o + kC2, 0.5 * z2 / eps);
    put(o + 1, o + 4 + kC2, 0.5 * z2 / eps);
    // c1 row: residual = dc1/dx + f1 u/eps + g1/h
    const double a1u = 0.5 * v.f1 / eps;
    const double a1c1 = 0.5 * (v.f1c1 * um / eps + v.g1c1 / hx);
    const double a1c2 = 0.5 * (v.f1c2 * um / eps + v.g1c2 / hx);
    put(o + 2, o + kU, a1u);
    put(o + 2, o + 4 + kU, a1u);
    put(o + 2, o + kC1, -1.0 / hi + a1c1);
    put(o + 2, o + 4 + kC1, 1.0 / hi + a1c1);
    put(o + 2, o + kC2, a1c2);
    put(o + 2, o + 4 + kC2, a1c2);
    put(o + 2, jJ1, v.g1J1 / hx);
    put(o + 2, jJ2, v.g1J2 / hx);
    // c2 row
    const double a2u = 0.5 * v.f2 / eps;
    const double a2c1 = 0.5 * (v.f2c1 * um / eps + v.g2c1 / hx);
    const double a2c2 = 0.5 * (v.f2c2 * um / eps + v.g2c2 / hx);
    put(o + 3, o + kU, a2u);
    put(o + 3, o + 4 + kU, a2u);
    put(o + 3, o + kC1, a2c1);
    put(o + 3, o + 4 + kC1, a2c1);
    put(o + 3, o + kC2, -1.0 / hi + a2c2);
    put(o + 3, o + 4 + kC2, 1.0 / hi + a2c2);
    put(o + 3, jJ1, v.g2J1 / hx);
    put(o + 3, jJ2, v.g2J2 / hx);
  }
  // Six boundary rows close the system (two extra conditions beyond the
  // four fields determine the global flux unknowns).
  const int br = 4 * (N - 1);
  const int last = 4 * (N - 1);
  const struct {
    int row, col;
    double target;
  } bc[6] = {
      {br + 0, kPhi, V},
      {br + 1, kC1, m.boundary.l1},
      {br + 2, kC2, m.boundary.l2},
      {br + 3, last + kPhi, 0.0},
      {br + 4, last + kC1, m.boundary.r1},
      {br + 5, last + kC2, m.boundary.r2},
  };
  for (const auto& c : bc) {
    record(c.row, y[c.col] - c.target, c.target, 0.0, 0.0);
    if (trips) trips->emplace_back(c.row, c.col, 1.0);
  }
  return norm;
}

/**
 * Damped Newton at fixed (eps, V).  Steps are first shortened until every
 * nodal concentration stays positive (the positive set is an interval in the
 * step length, so later halvings preserve it), then until the scaled
 * residual actually decreases.  Returns false when the damping floor or the
 * iteration cap is hit; y is left at the last accepted state.
 */
bool newton_stage(const ChannelModel& m, double eps, double V,
                  const Mesh& mesh, Eigen::VectorXd& y,
                  const BvpOptions& opt, int& iters, double& norm_out) {
  const int N = mesh.size();
  const int M = 4 * N + 2;
  Eigen::VectorXd r(M);
  std::vector<Triplet> trips;
  Eigen::SparseLU<SpMat> lu;
  bool analyzed = false;
  double norm = assemble(m, eps, V, mesh, y, nullptr, nullptr);
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (norm < opt.tolerance) {
      norm_out = norm;
      return true;
    }
    assemble(m, eps, V, mesh, y, &r, &trips);
    SpMat A(M, M);
    A.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed) {
      lu.analyzePattern(A);
      analyzed = true;
    }
    lu.factorize(A);
    if (lu.info() != Eigen::Success) {
      norm_out = norm;
      return false;
    }
    const Eigen::VectorXd delta = lu.solve(-r);
    if (!delta.allFinite()) {
      norm_out = norm;
      return false;
    }
    auto positive = [&](double t) {
      for (int i = 0; i < N; ++i) {
        if (y[4 * i + kC1] + t * delta[4 * i + kC1] <= 0.0) return false;
        if (y[4 * i + kC2] + t * delta[4 * i + kC2] <= 0.0) return false;
      }
      return true;
    };
    double t = 1.0;
    while (t >= opt.min_step && !positive(t)) t *= 0.5;
    bool accepted = false;
    Eigen::VectorXd trial;
    double trial_norm = norm;
    while (t >= opt.min_step) {
      trial = y + t * delta;
      trial_norm = assemble(m, eps, V, mesh, trial, nullptr, nullptr);
      if (trial_norm < (1.0 - 1e-4 * t) * norm) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      norm_out = norm;
      return false;
    }
    y.swap(trial);
    norm = trial_norm;
    ++iters;
  }
  norm_out = norm;
  return norm < opt.tolerance;
}

/// Least-squares slope of ln(value) against ln(scale), skipping rows whose
/// value already sits at roundoff.  Returns 0 with fewer than two usable rows.
double loglog_slope(const std::vector<double>& scales,
                    const std::vector<double>& values) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !(values[i] > 1e-14)) continue;
    const double lx = std::log(scales[i]);
    const double ly = std::log(values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace

Mesh Mesh::graded(const ChannelGeometry& geometry, double eps, int n) {
  if (n < 24)
    throw InvalidModel("mesh request too small: need at least 24 nodes, got " +
                       std::to_string(n));
  if (!(eps > 0.0))
    throw InvalidModel("mesh grading needs eps > 0, got " +
                       std::to_string(eps));
  const double a = geometry.a(), b = geometry.b();
  // Half-zone width: the layer scale eps*ln(1/eps) with headroom, capped so
  // the six half-zones never touch each other or swallow a bulk gap.
  const double cap = 0.25 * std::min({a, b - a, 1.0 - b});
  double w = cap;
  if (eps < 1.0) w = std::min(cap, 6.0 * eps * std::log(1.0 / eps));
  const int per_zone =
      std::max(3, static_cast<int>(std::lround(0.4 * n / 6.0)));
  std::vector<double> nodes = {0.0, a, b, 1.0};
  nodes.reserve(static_cast<size_t>(n) + 8);
  auto add_zone = [&](double p, double sign) {
    for (int j = 1; j <= per_zone; ++j) {
      const double frac = static_cast<double>(j) / per_zone;
      nodes.push_back(p + sign * w * frac * frac);
    }
  };
  add_zone(0.0, +1.0);
  add_zone(a, -1.0);
  add_zone(a, +1.0);
  add_zone(b, -1.0);
  add_zone(b, +1.0);
  add_zone(1.0, -1.0);
  const double gap0 = a - 2.0 * w;
  const double gap1 = (b - a) - 2.0 * w;
  const double gap2 = (1.0 - b) - 2.0 * w;
  const double total = gap0 + gap1 + gap2;
  const int n_bulk = std::max(3, n - static_cast<int>(nodes.size()));
  auto add_gap = [&](double lo, double hi, int count) {
    for (int k = 1; k <= count; ++k)
      nodes.push_back(lo + (hi - lo) * k / (count + 1.0));
  };
  add_gap(w, a - w,
          std::max(1, static_cast<int>(std::lround(n_bulk * gap0 / total))));
  add_gap(a + w, b - w,
          std::max(1, static_cast<int>(std::lround(n_bulk * gap1 / total))));
  add_gap(b + w, 1.0 - w,
          std::max(1, static_cast<int>(std::lround(n_bulk * gap2 / total))));
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  Mesh mesh;
  mesh.x = std::move(nodes);
  mesh.validate(geometry);
  return mesh;
}

void Mesh::validate(const ChannelGeometry& geometry) const {
  if (x.size() < 8)
    throw InvalidModel("mesh has fewer than 8 nodes");
  if (x.front() != 0.0 || x.back() != 1.0)
    throw InvalidModel("mesh must span [0,1] exactly");
  for (size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1]))
      throw InvalidModel("mesh nodes must strictly increase");
  auto is_node = [&](double p) {
    return std::binary_search(x.begin(), x.end(), p);
  };
  if (!is_node(geometry.a()) || !is_node(geometry.b()))
    throw InvalidModel(
        "charge jump points a and b must be mesh nodes so every cell lies in "
        "a single charge region");
}

Profile solve_bvp(const ChannelModel& model, const Mesh& mesh,
                  const BvpOptions& options) {
  model.validate();
  mesh.validate(model.geometry);
  const int N = mesh.size();
  const double V = model.boundary.V;
  Eigen::VectorXd y(4 * N + 2);
  auto linear_guess = [&](double Vg, double epsg) {
    for (int i = 0; i < N; ++i) {
      const double t = mesh.x[i];
      y[4 * i + kPhi] = Vg * (1.0 - t);
      y[4 * i + kU] = -epsg * Vg;
      y[4 * i + kC1] = model.boundary.l1 + (model.boundary.r1 - model.boundary.l1) * t;
      y[4 * i + kC2] = model.boundary.l2 + (model.boundary.r2 - model.boundary.l2) * t;
    }
    y[4 * N] = 0.0;
    y[4 * N + 1] = 0.0;
  };
  int iters = 0;
  int stages = 0;
  double norm = 0.0;
  const double eps0 = std::max(model.epsilon, options.epsilon_start);
  auto trace = [&](const char* what, double eps_now, double v_now, bool ok) {
    if (options.verbose)
      std::fprintf(stderr, "[bvp] %s eps %.3e V %.4f: %s (iters %d norm %.3e)\n",
                   what, eps_now, v_now, ok ? "ok" : "fail", iters, norm);
  };
  auto spend_stage = [&](const char* where) {
    if (++stages > options.max_continuation_steps)
      throw NoConvergence(std::string("continuation budget exhausted during ") +
                          where);
  };

  linear_guess(V, eps0);
  spend_stage("cold start");
  bool ok = newton_stage(model, eps0, V, mesh, y, options, iters, norm);
  trace("cold start", eps0, V, ok);
  if (!ok) {
    // Ramp the boundary potential up from zero at the easy rung.
    linear_guess(0.0, eps0);
    spend_stage("potential ramp");
    if (V == 0.0 ||
        !newton_stage(model, eps0, 0.0, mesh, y, options, iters, norm)) {
      trace("ramp base", eps0, 0.0, false);
      throw NoConvergence(
          "direct solve failed at the starting rung eps=" +
          std::to_string(eps0) + " even with zero boundary potential");
    }
    trace("ramp base", eps0, 0.0, true);
    double vcur = 0.0;
    double step = V / 4.0;
    while (vcur != V) {
      const double vnext =
          (std::abs(step) >= std::abs(V - vcur)) ? V : vcur + step;
      Eigen::VectorXd saved = y;
      spend_stage("potential ramp");
      if (newton_stage(model, eps0, vnext, mesh, y, options, iters, norm)) {
        trace("ramp", eps0, vnext, true);
        vcur = vnext;
        step *= 2.0;
      } else {
        trace("ramp", eps0, vnext, false);
        y = saved;
        step *= 0.5;
        if (std::abs(step) < 1e-3 * std::abs(V))
          throw NoConvergence("potential ramp stalled at V=" +
                              std::to_string(vcur) + " of " +
                              std::to_string(V));
      }
    }
  }
  // Walk eps down geometrically to the target, bisecting refused rungs.
  double ecur = eps0;
  double factor = 1.0 / std::sqrt(10.0);
  while (ecur > model.epsilon) {
    double enext = ecur * factor;
    if (enext <= model.epsilon * 1.0000001) enext = model.epsilon;
    Eigen::VectorXd saved = y;
    spend_stage("epsilon descent");
    if (newton_stage(model, enext, V, mesh, y, options, iters, norm)) {
      trace("descent", enext, V, true);
      ecur = enext;
      factor = 1.0 / std::sqrt(10.0);
    } else {
      trace("descent", enext, V, false);
      y = saved;
      factor = std::sqrt(factor);
      if (factor > 0.9999)
        throw NoConvergence("epsilon continuation stalled at eps=" +
                            std::to_string(ecur) + " on the way to " +
                            std::to_string(model.epsilon));
    }
  }
  // A posteriori layer-resolution indicator: a converged profile that drops
  // a sizable share of the potential inside one cell has a layer between
  // nodes, which the cell scheme cannot see.
  double worst = 0.0;
  double worst_at = 0.0;
  for (int i = 0; i + 1 < N; ++i) {
    const double jump = std::abs(y[4 * (i + 1) + kPhi] - y[4 * i + kPhi]);
    if (jump > worst) {
      worst = jump;
      worst_at = 0.5 * (mesh.x[i] + mesh.x[i + 1]);
    }
  }
  if (worst > options.jump_threshold)
    throw MeshTooCoarse("potential drops " + std::to_string(worst) +
                        " across a single cell near x=" +
                        std::to_string(worst_at) +
                        "; increase the node count");

  Profile p;
  p.x = mesh.x;
  p.phi.resize(N);
  p.u.resize(N);
  p.c1.resize(N);
  p.c2.resize(N);
  for (int i = 0; i < N; ++i) {
    p.phi[i] = y[4 * i + kPhi];
    p.u[i] = y[4 * i + kU];
    p.c1[i] = y[4 * i + kC1];
    p.c2[i] = y[4 * i + kC2];
  }
  p.J1 = y[4 * N];
  p.J2 = y[4 * N + 1];
  p.epsilon = model.epsilon;
  p.d = model.ions.d;
  p.residual_norm = norm;
  p.newton_iterations = iters;
  p.continuation_steps = stages;
  return p;
}

AsymptoticComparison asymptotic_comparison(const ChannelModel& model,
                                           const std::vector<double>& eps_grid,
                                           const std::vector<double>& d_grid,
                                           int n, const BvpOptions& options) {
  if (eps_grid.empty() && d_grid.empty())
    throw InvalidModel("asymptotic comparison needs at least one grid entry");
  for (double e : eps_grid)
    if (!(e > 0.0))
      throw InvalidModel("eps grid entries must be positive");
  for (double dd : d_grid)
    if (dd < 0.0)
      throw InvalidModel("d grid entries must be nonnegative");

  AsymptoticComparison out;
  out.asymptotic = solve_matching(model).fluxes;
  auto rel = [](double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
  };

  for (double e : eps_grid) {
    ChannelModel varied = model;
    varied.epsilon = e;
    const Mesh mesh = Mesh::graded(model.geometry, e, n);
    const Profile p = solve_bvp(varied, mesh, options);
    ComparisonRow row;
    row.epsilon = e;
    row.d = model.ions.d;
    row.err1 = rel(p.J1, out.asymptotic.J1(row.d));
    row.err2 = rel(p.J2, out.asymptotic.J2(row.d));
    out.eps_rows.push_back(row);
  }

  if (!d_grid.empty()) {
    const Mesh mesh = Mesh::graded(model.geometry, model.epsilon, n);
    ChannelModel base_model = model;
    base_model.ions.d = 0.0;
    const Profile base = solve_bvp(base_model, mesh, options);
    for (double dd : d_grid) {
      ChannelModel varied = model;
      varied.ions.d = dd;
      const Profile p = solve_bvp(varied, mesh, options);
      ComparisonRow row;
      row.epsilon = model.epsilon;
      row.d = dd;
      row.err1 = rel(p.J1, out.asymptotic.J1(dd));
      row.err2 = rel(p.J2, out.asymptotic.J2(dd));
      row.rem1 = std::abs(p.J1 - base.J1 - dd * out.asymptotic.J11);
      row.rem2 = std::abs(p.J2 - base.J2 - dd * out.asymptotic.J21);
      out.d_rows.push_back(row);
    }
  }

  std::vector<double> s, v1, v2;
  for (const auto& row : out.eps_rows) {
    s.push_back(row.epsilon);
    v1.push_back(row.err1);
    v2.push_back(row.err2);
  }
  out.order_eps1 = loglog_slope(s, v1);
  out.order_eps2 = loglog_slope(s, v2);
  s.clear();
  v1.clear();
  v2.clear();
  for (const auto& row : out.d_rows) {
    s.push_back(row.d);
    v1.push_back(row.rem1);
    v2.push_back(row.rem2);
  }
  out.order_d1 = loglog_slope(s, v1);
  out.order_d2 = loglog_slope(s, v2);
  return out;
}

}  // namespace ionflux
