#include "ionflux/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "ionflux/numerics.hpp"

namespace ionflux {

namespace {

constexpr int kPanelsPerUnit = 256; // resolution of the cumulative-H grid

/// Shape-preserving one-sided slope for the first/last PCHIP knot.
double edge_slope(double h0, double h1, double d0, double d1) {
  double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (m * d0 <= 0.0) return 0.0;
  if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
  return m;
}

/// Fritsch-Carlson monotone slopes for knots (x_i, y_i).
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> m(n, 0.0);
  if (n == 2) {
    m[0] = m[1] = (y[1] - y[0]) / (x[1] - x[0]);
    return m;
  }
  std::vector<double> hseg(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    hseg[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / hseg[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      m[i] = 0.0;
    } else {
      const double w1 = 2.0 * hseg[i] + hseg[i - 1];
      const double w2 = hseg[i] + 2.0 * hseg[i - 1];
      m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  m[0] = edge_slope(hseg[0], hseg[1], delta[0], delta[1]);
  m[n - 1] = edge_slope(hseg[n - 2], hseg[n - 3], delta[n - 2], delta[n - 3]);
  return m;
}

void check_junctions(double a, double b) {
  if (!(0.0 < a && a < b && b < 1.0))
    throw InvalidModel("junction points must satisfy 0 < a < b < 1, got a=" +
                       std::to_string(a) + ", b=" + std::to_string(b));
}

} // namespace

void IonPair::validate() const {
  if (!(z1 > 0.0) || !(z2 < 0.0))
    throw InvalidModel("valences must satisfy z1 > 0 > z2, got z1=" +
                       std::to_string(z1) + ", z2=" + std::to_string(z2));
  if (!(d >= 0.0))
    throw InvalidModel("ion diameter d must be >= 0, got " + std::to_string(d));
  if (!(lambda > 0.0))
    throw InvalidModel("diameter ratio lambda must be > 0, got " +
                       std::to_string(lambda));
}

void BoundaryData::validate() const {
  if (!(l1 > 0.0) || !(l2 > 0.0) || !(r1 > 0.0) || !(r2 > 0.0))
    throw InvalidModel("boundary concentrations must all be positive, got l=(" +
                       std::to_string(l1) + ", " + std::to_string(l2) +
                       "), r=(" + std::to_string(r1) + ", " +
                       std::to_string(r2) + ")");
}

void ChannelModel::validate() const {
  ions.validate();
  boundary.validate();
  if (!(epsilon > 0.0))
    throw InvalidModel("epsilon must be > 0, got " + std::to_string(epsilon));
}

ChannelGeometry ChannelGeometry::uniform(double a, double b, double h0) {
  check_junctions(a, b);
  if (!(h0 > 0.0))
    throw InvalidModel("uniform cross-section h0 must be > 0, got " +
                       std::to_string(h0));
  ChannelGeometry g;
  g.kind_ = Kind::Uniform;
  g.a_ = a;
  g.b_ = b;
  g.h0_ = h0;
  g.finalize();
  return g;
}

ChannelGeometry ChannelGeometry::neck(double a, double b, double h_end,
                                      double h_neck, double width) {
  check_junctions(a, b);
  if (!(h_end > 0.0) || !(h_neck > 0.0))
    throw InvalidModel("neck profile requires positive h_end and h_neck");
  ChannelGeometry g;
  g.kind_ = Kind::Neck;
  g.a_ = a;
  g.b_ = b;
  g.h_end_ = h_end;
  g.h_neck_ = h_neck;
  g.width_ = width > 0.0 ? width : (b - a) / 3.0;
  g.center_ = 0.5 * (a + b);
  g.finalize();
  return g;
}

ChannelGeometry ChannelGeometry::tabulated(double a, double b,
                                           std::vector<double> xs,
                                           std::vector<double> hs) {
  check_junctions(a, b);
  if (xs.size() < 2 || xs.size() != hs.size())
    throw InvalidModel("tabulated profile needs >= 2 knots with matching "
                       "abscissa/value counts");
  if (xs.front() != 0.0 || xs.back() != 1.0)
    throw InvalidModel("tabulated profile knots must start at 0 and end at 1");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (!(xs[i] < xs[i + 1]))
      throw InvalidModel("tabulated profile knots must be strictly increasing");
  for (double v : hs)
    if (!(v > 0.0))
      throw InvalidModel("tabulated profile values must all be positive");
  ChannelGeometry g;
  g.kind_ = Kind::Tabulated;
  g.a_ = a;
  g.b_ = b;
  g.tx_ = std::move(xs);
  g.th_ = std::move(hs);
  g.tm_ = pchip_slopes(g.tx_, g.th_);
  g.finalize();
  return g;
}

double ChannelGeometry::pchip_value(double x) const {
  auto it = std::upper_bound(tx_.begin(), tx_.end(), x);
  std::size_t i = (it == tx_.begin()) ? 0 : (it - tx_.begin()) - 1;
  if (i + 1 >= tx_.size()) i = tx_.size() - 2;
  const double hseg = tx_[i + 1] - tx_[i];
  const double t = (x - tx_[i]) / hseg;
  const double h00 = (2.0 * t - 3.0) * t * t + 1.0;
  const double h10 = ((t - 2.0) * t + 1.0) * t;
  const double h01 = (3.0 - 2.0 * t) * t * t;
  const double h11 = (t - 1.0) * t * t;
  return th_[i] * h00 + hseg * tm_[i] * h10 + th_[i + 1] * h01 +
         hseg * tm_[i + 1] * h11;
}

double ChannelGeometry::pchip_slope(double x) const {
  auto it = std::upper_bound(tx_.begin(), tx_.end(), x);
  std::size_t i = (it == tx_.begin()) ? 0 : (it - tx_.begin()) - 1;
  if (i + 1 >= tx_.size()) i = tx_.size() - 2;
  const double hseg = tx_[i + 1] - tx_[i];
  const double t = (x - tx_[i]) / hseg;
  const double dh00 = 6.0 * t * (t - 1.0);
  const double dh10 = (3.0 * t - 4.0) * t + 1.0;
  const double dh01 = 6.0 * t * (1.0 - t);
  const double dh11 = (3.0 * t - 2.0) * t;
  return (th_[i] * dh00 + hseg * tm_[i] * dh10 + th_[i + 1] * dh01 +
          hseg * tm_[i + 1] * dh11) /
         hseg;
}

double ChannelGeometry::h(double x) const {
  switch (kind_) {
    case Kind::Uniform: return h0_;
    case Kind::Neck: {
      const double s = (x - center_) / width_;
      return h_end_ - (h_end_ - h_neck_) * std::exp(-s * s);
    }
    case Kind::Tabulated: return pchip_value(std::clamp(x, 0.0, 1.0));
  }
  return h0_;
}

double ChannelGeometry::dh(double x) const {
  switch (kind_) {
    case Kind::Uniform: return 0.0;
    case Kind::Neck: {
      const double s = (x - center_) / width_;
      return (h_end_ - h_neck_) * 2.0 * s / width_ * std::exp(-s * s);
    }
    case Kind::Tabulated: return pchip_slope(std::clamp(x, 0.0, 1.0));
  }
  return 0.0;
}

void ChannelGeometry::finalize() {
  if (kind_ == Kind::Uniform) {
    Ha_ = a_ / h0_;
    Hb_ = b_ / h0_;
    H1_ = 1.0 / h0_;
    return;
  }
  // Panel boundaries: junctions plus (for tabulated profiles) the knots,
  // so every panel sees a smooth integrand.
  std::vector<double> brk = {0.0, a_, b_, 1.0};
  if (kind_ == Kind::Tabulated)
    brk.insert(brk.end(), tx_.begin(), tx_.end());
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end()), brk.end());

  gx_.clear();
  gH_.clear();
  gx_.push_back(0.0);
  gH_.push_back(0.0);
  const auto inv_h = [this](double x) { return 1.0 / h(x); };
  for (std::size_t k = 0; k + 1 < brk.size(); ++k) {
    const double x0 = brk[k], x1 = brk[k + 1];
    const int nseg = std::max(1, static_cast<int>(
                                     std::ceil((x1 - x0) * kPanelsPerUnit)));
    for (int i = 1; i <= nseg; ++i) {
      const double xl = gx_.back();
      const double xr = (i == nseg) ? x1 : x0 + (x1 - x0) * i / nseg;
      gH_.push_back(gH_.back() + gauss15(inv_h, xl, xr));
      gx_.push_back(xr);
    }
  }
  Ha_ = H(a_);
  Hb_ = H(b_);
  H1_ = H(1.0);
}

double ChannelGeometry::H(double x) const {
  x = std::clamp(x, 0.0, 1.0);
  if (kind_ == Kind::Uniform) return x / h0_;
  auto it = std::upper_bound(gx_.begin(), gx_.end(), x);
  std::size_t i = (it == gx_.begin()) ? 0 : (it - gx_.begin()) - 1;
  if (i + 1 >= gx_.size()) i = gx_.size() - 2;
  if (x == gx_[i]) return gH_[i];
  const auto inv_h = [this](double s) { return 1.0 / h(s); };
  return gH_[i] + gauss15(inv_h, gx_[i], x);
}

FGValues eval_fg(double c1, double c2, double J1, double J2,
                 const IonPair& ions) {
  const double z1 = ions.z1, z2 = ions.z2, d = ions.d, lam = ions.lambda;
  const double charge_density = z1 * c1 + z2 * c2;
  const double size_mix = c1 + lam * lam * c2;
  FGValues v;
  v.f1 = z1 * c1 - (2.0 * z1 * c1 + (1.0 + lam) * z2 * c2) * c1 * d +
         size_mix * charge_density * c1 * d * d;
  v.f2 = z2 * c2 - (2.0 * lam * z2 * c2 + (1.0 + lam) * z1 * c1) * c2 * d +
         size_mix * charge_density * c2 * d * d;
  v.g1 = J1 - (2.0 * J1 + (1.0 + lam) * J2) * c1 * d +
         size_mix * (J1 + J2) * c1 * d * d;
  v.g2 = J2 - (2.0 * lam * J2 + (1.0 + lam) * J1) * c2 * d +
         size_mix * (J1 + J2) * c2 * d * d;
  return v;
}

std::pair<double, double> hs_chemical_potential_gradient(double c1, double c2,
                                                         double dc1dx,
                                                         double dc2dx,
                                                         const IonPair& ions) {
  const double d1 = ions.d;
  const double d2 = ions.lambda * ions.d;
  const double packing = 1.0 - d1 * c1 - d2 * c2;
  if (packing <= 0.0)
    throw PackingOverflow(
        "excluded volume filled: 1 - d1*c1 - d2*c2 = " +
        std::to_string(packing) + " at c1=" + std::to_string(c1) +
        ", c2=" + std::to_string(c2));
  const double den2 = packing * packing;
  const double cross = (d1 + d2 - d1 * d1 * c1 - d2 * d2 * c2) / den2;
  const double self1 = d1 * (2.0 + d1 * (c2 - c1) - 2.0 * d2 * c2) / den2;
  const double self2 = d2 * (2.0 + d2 * (c1 - c2) - 2.0 * d1 * c1) / den2;
  return {self1 * dc1dx + cross * dc2dx, cross * dc1dx + self2 * dc2dx};
}

double sigma(double c10, double Q, const IonPair& ions) {
  return (ions.z1 - ions.z2) * ions.z1 * c10 - ions.z2 * Q;
}

double w_combination(double p, double q, const IonPair& ions) {
  return p + ions.lambda * q +
         (ions.lambda * ions.z1 - ions.z2) / (ions.z1 - ions.z2) * (p + q);
}

void PhysicalConstants::validate() const {
  if (!(e > 0.0) || !(kB > 0.0) || !(T > 0.0) || !(eps_r > 0.0) ||
      !(eps0 > 0.0) || !(D1 > 0.0) || !(D2 > 0.0))
    throw InvalidModel("all physical constants must be positive");
}

DimensionlessValues dimensionless_rescale(const PhysicalConstants& pc,
                                          const PhysicalValues& pv) {
  pc.validate();
  const double kT = pc.kB * pc.T;
  DimensionlessValues dv;
  dv.phi = pc.e * pv.Phi / kT;
  dv.V = pc.e * pv.V / kT;
  dv.eps2 = pc.eps_r * pc.eps0 * kT / (pc.e * pc.e);
  dv.J1 = pv.calJ1 / pc.D1;
  dv.J2 = pv.calJ2 / pc.D2;
  return dv;
}

PhysicalValues physical_rescale(const PhysicalConstants& pc,
                                const DimensionlessValues& dv) {
  pc.validate();
  const double kT = pc.kB * pc.T;
  PhysicalValues pv;
  pv.Phi = dv.phi * kT / pc.e;
  pv.V = dv.V * kT / pc.e;
  pv.calJ1 = dv.J1 * pc.D1;
  pv.calJ2 = dv.J2 * pc.D2;
  return pv;
}

} // namespace ionflux
