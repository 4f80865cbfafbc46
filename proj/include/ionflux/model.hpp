#ifndef IONFLUX_MODEL_HPP
#define IONFLUX_MODEL_HPP

/**
 * @file model.hpp
 * @brief Dimensionless two-species PNP channel model with hard-sphere
 *        corrections: ion data, boundary data, channel geometry, permanent
 *        charge, and the coefficient functions every solver consumes.
 *
 * The model lives on the interval [0,1] with a piecewise-constant permanent
 * charge that is nonzero only on the middle subinterval (a,b).  All
 * quantities are dimensionless; dimensionless_rescale() maps lab units into
 * this normalization.
 */

#include <utility>
#include <vector>

#include "ionflux/errors.hpp"

namespace ionflux {

/**
 * @brief Valences and hard-sphere diameters of the two ion species.
 *
 * Species 1 is the cation, species 2 the anion.  The diameters enter as
 * d1 = d and d2 = lambda*d; d is treated as a small expansion parameter
 * while lambda stays O(1).
 */
struct IonPair {
  double z1 = 1.0;     ///< valence of species 1 (> 0)
  double z2 = -1.0;    ///< valence of species 2 (< 0)
  double d = 0.0;      ///< dimensionless diameter of species 1 (>= 0)
  double lambda = 1.0; ///< diameter ratio d2/d1 (> 0)

  /// @throws InvalidModel unless z1 > 0 > z2, d >= 0, lambda > 0.
  void validate() const;
};

/// Electric potential and concentration boundary values at x=0 and x=1.
struct BoundaryData {
  double V = 0.0;  ///< potential at x=0 (potential at x=1 is 0)
  double l1 = 1.0; ///< c1(0), must be > 0
  double l2 = 1.0; ///< c2(0), must be > 0
  double r1 = 1.0; ///< c1(1), must be > 0
  double r2 = 1.0; ///< c2(1), must be > 0

  /// @throws InvalidModel unless all four concentrations are positive.
  void validate() const;
};

/**
 * @brief Channel cross-section profile h(x) > 0 on [0,1] and its cumulative
 *        resistance H(x) = \int_0^x ds/h(s).
 *
 * Three families are supported: a uniform profile, a smooth Gaussian neck
 * (narrow waist between wide baths), and tabulated samples interpolated with
 * a monotone piecewise-cubic (PCHIP).  H is precomputed on a panel grid with
 * 15-point Gauss-Legendre quadrature per panel, so single evaluations cost a
 * binary search plus one partial panel.
 *
 * Instances are immutable after construction and therefore safe to share
 * across threads.
 */
class ChannelGeometry {
 public:
  /// Default geometry: uniform unit cross-section with a = 1/3, b = 2/3.
  ChannelGeometry() = default;

  /// Uniform profile h(x) = h0.
  static ChannelGeometry uniform(double a, double b, double h0 = 1.0);

  /**
   * @brief Smooth neck h(x) = h_end - (h_end - h_neck) * exp(-((x-xc)/w)^2)
   *        centered at xc = (a+b)/2.
   * @param width  Gaussian width w; defaults to (b-a)/3 when <= 0.
   */
  static ChannelGeometry neck(double a, double b, double h_end = 1.0,
                              double h_neck = 0.25, double width = -1.0);

  /**
   * @brief Tabulated profile through (x_i, h_i) with monotone cubic
   *        interpolation.  Knots must start at 0, end at 1, be strictly
   *        increasing, and carry positive values.
   */
  static ChannelGeometry tabulated(double a, double b, std::vector<double> xs,
                                   std::vector<double> hs);

  double h(double x) const;  ///< cross-section area at x
  double dh(double x) const; ///< derivative h'(x)
  double H(double x) const;  ///< cumulative resistance \int_0^x ds/h(s)

  double a() const { return a_; }   ///< left junction point
  double b() const { return b_; }   ///< right junction point
  double Ha() const { return Ha_; } ///< cached H(a)
  double Hb() const { return Hb_; } ///< cached H(b)
  double H1() const { return H1_; } ///< cached H(1)

 private:
  enum class Kind { Uniform, Neck, Tabulated };

  void finalize();
  double pchip_value(double x) const;
  double pchip_slope(double x) const;

  Kind kind_ = Kind::Uniform;
  double a_ = 1.0 / 3.0;
  double b_ = 2.0 / 3.0;
  // uniform
  double h0_ = 1.0;
  // neck
  double h_end_ = 1.0;
  double h_neck_ = 0.25;
  double width_ = 1.0 / 9.0;
  double center_ = 0.5;
  // tabulated knots, values, and PCHIP slopes
  std::vector<double> tx_, th_, tm_;
  // cumulative-resistance panel grid: H(gx_[i]) = gH_[i]
  std::vector<double> gx_, gH_;
  double Ha_ = 1.0 / 3.0, Hb_ = 2.0 / 3.0, H1_ = 1.0;
};

/// Piecewise-constant permanent charge: Q2 on (a,b), zero elsewhere.
struct PermanentCharge {
  double Q2 = 0.0;

  /// Value of the profile at x given the junction points of @p geom.
  double at(double x, const ChannelGeometry& geom) const {
    return (x > geom.a() && x < geom.b()) ? Q2 : 0.0;
  }
};

/**
 * @brief Flux expansion J_k = J_k0 + J_k1 * d truncated at first order.
 *
 * The derived combinations (current I, total flux T, size-weighted flux
 * Lambda) are always recomputed from the stored J's so they can never drift
 * out of sync.
 */
struct FluxExpansion {
  double J10 = 0.0, J20 = 0.0; ///< zeroth-order fluxes
  double J11 = 0.0, J21 = 0.0; ///< first-order-in-d fluxes

  double I0(const IonPair& ions) const { return ions.z1 * J10 + ions.z2 * J20; }
  double I1(const IonPair& ions) const { return ions.z1 * J11 + ions.z2 * J21; }
  double T0() const { return J10 + J20; }
  double T1() const { return J11 + J21; }
  double Lambda0(const IonPair& ions) const { return J10 + ions.lambda * J20; }
  double Lambda1(const IonPair& ions) const { return J11 + ions.lambda * J21; }

  /// First-order-accurate total fluxes and current at diameter d.
  double J1(double d) const { return J10 + d * J11; }
  double J2(double d) const { return J20 + d * J21; }
  double current(const IonPair& ions, double d) const {
    return I0(ions) + d * I1(ions);
  }
};

/// Complete dimensionless problem statement consumed by the solvers.
struct ChannelModel {
  IonPair ions;
  BoundaryData boundary;
  ChannelGeometry geometry;
  PermanentCharge charge;
  double epsilon = 1e-3; ///< singular perturbation parameter (> 0)

  /// @throws InvalidModel on any violated field invariant.
  void validate() const;

  /// Permanent-charge profile evaluated at x.
  double Q_at(double x) const { return charge.at(x, geometry); }
};

/**
 * @brief Coefficient functions of the collected first-order ODE system
 *        dc_k/dx = -f_k * dphi/dx - g_k / h(x).
 *
 * These are the exact closed forms obtained by inserting the hard-sphere
 * chemical-potential gradient into the flux relations and solving the
 * resulting 2x2 linear system for the concentration derivatives; the d^2
 * terms are part of that exact collection, not an expansion remainder.
 */
struct FGValues {
  double f1, f2, g1, g2;
};

/// Evaluate the collected coefficient functions at one state.
FGValues eval_fg(double c1, double c2, double J1, double J2,
                 const IonPair& ions);

/**
 * @brief Hard-sphere chemical-potential gradients (1/kBT) dmu_k/dx given the
 *        local concentrations and their spatial derivatives.
 * @throws PackingOverflow when 1 - d*c1 - lambda*d*c2 <= 0.
 */
std::pair<double, double> hs_chemical_potential_gradient(double c1, double c2,
                                                         double dc1dx,
                                                         double dc2dx,
                                                         const IonPair& ions);

/// sigma = (z1 - z2) * z1 * c10 - z2 * Q.
double sigma(double c10, double Q, const IonPair& ions);

/// w(p, q) = p + lambda*q + (lambda*z1 - z2)/(z1 - z2) * (p + q).
double w_combination(double p, double q, const IonPair& ions);

/// Lab-frame constants needed to map a physical problem to dimensionless form.
struct PhysicalConstants {
  double e;     ///< elementary charge
  double kB;    ///< Boltzmann constant
  double T;     ///< absolute temperature
  double eps_r; ///< relative dielectric coefficient
  double eps0;  ///< vacuum permittivity
  double D1;    ///< diffusion coefficient of species 1
  double D2;    ///< diffusion coefficient of species 2

  /// @throws InvalidModel unless every constant is positive.
  void validate() const;
};

/// Potentials and fluxes in lab units.
struct PhysicalValues {
  double Phi;   ///< electric potential
  double V;     ///< applied transmembrane potential
  double calJ1; ///< flux of species 1
  double calJ2; ///< flux of species 2
};

/// Dimensionless counterparts of PhysicalValues plus the derived eps^2.
struct DimensionlessValues {
  double phi;  ///< e*Phi/(kB*T)
  double V;    ///< e*V/(kB*T)
  double eps2; ///< eps_r*eps0*kB*T/e^2
  double J1;   ///< calJ1/D1
  double J2;   ///< calJ2/D2
};

/// Map lab-frame values to the dimensionless normalization.
DimensionlessValues dimensionless_rescale(const PhysicalConstants& pc,
                                          const PhysicalValues& pv);

/// Inverse of dimensionless_rescale (eps2 is derived, hence ignored).
PhysicalValues physical_rescale(const PhysicalConstants& pc,
                                const DimensionlessValues& dv);

} // namespace ionflux

#endif // IONFLUX_MODEL_HPP
