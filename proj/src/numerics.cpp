#include "ionflux/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "ionflux/errors.hpp"

namespace ionflux {

namespace {

// Below this the Horner expansions are exact to double precision; above it
// the expm1-based closed forms lose at most a few ulp.
constexpr double kSeriesCut = 0.25;

}  // namespace

double phi1(double x) {
  // expm1 is correctly rounded, so this quotient is uniformly accurate.
  if (x == 0.0) return 1.0;
  return std::expm1(x) / x;
}

double phi2(double x) {
  if (std::abs(x) >= kSeriesCut) return (std::expm1(x) - x) / (x * x);
  // sum_{k>=0} x^k/(k+2)! ; the x^13 tail is < 1e-19 at the cutoff
  double term = 0.5, sum = 0.5;
  for (int k = 1; k <= 12; ++k) {
    term *= x / (k + 2);
    sum += term;
  }
  return sum;
}

double psi_a(double x) {
  // (phi1(2x) - phi1(x))/x = (e^x - 1)^2 / (2 x^2) = phi1(x)^2 / 2 exactly.
  const double p = phi1(x);
  return 0.5 * p * p;
}

double psi_b(double x) {
  if (std::abs(x) >= kSeriesCut) return (psi_a(x) - phi2(x)) / x;
  // sum_{k>=0} (2^{k+2} - 2) x^k / (k+3)!
  static const std::array<double, 14> coef = [] {
    std::array<double, 14> c{};
    double fact = 6.0;   // (k+3)! starting at k = 0
    double pow2 = 4.0;   // 2^{k+2}
    for (int k = 0; k < 14; ++k) {
      c[k] = (pow2 - 2.0) / fact;
      pow2 *= 2.0;
      fact *= k + 4;
    }
    return c;
  }();
  double sum = 0.0;
  for (int k = 13; k >= 0; --k) sum = coef[k] + x * sum;
  return sum;
}

double psi_c(double x) {
  if (std::abs(x) >= kSeriesCut) return (phi2(x) - phi2(-x)) / x;
  // even series 2 * sum_{k>=0} x^{2k}/(2k+3)!
  static const std::array<double, 7> coef = [] {
    std::array<double, 7> c{};
    double fact = 6.0;  // (2k+3)! starting at k = 0
    for (int k = 0; k < 7; ++k) {
      c[k] = 2.0 / fact;
      fact *= (2 * k + 4) * (2 * k + 5);
    }
    return c;
  }();
  const double x2 = x * x;
  double sum = 0.0;
  for (int k = 6; k >= 0; --k) sum = coef[k] + x2 * sum;
  return sum;
}

double dlog(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) {
    throw InvalidLimits("dlog requires positive arguments");
  }
  const double r = (p - q) / (p + q);
  if (std::abs(r) < 0.5) return 2.0 * std::atanh(r);
  return std::log(p / q);
}

double logmean(double p, double q) {
  const double t = dlog(p, q);
  // (p - q)/t == q*(e^t - 1)/t exactly
  return q * phi1(t);
}

double logquot(double p, double q) { return 1.0 / logmean(p, q); }

RootResult brent(const std::function<double(double)>& f, double lo, double hi,
                 double xtol, int max_iter) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return {a, 0.0, 0, true};
  if (fb == 0.0) return {b, 0.0, 0, true};
  if ((fa > 0.0) == (fb > 0.0)) {
    throw BracketFailure("brent: interval does not bracket a sign change");
  }
  double c = a, fc = fa;
  double d = b - a, e = d;
  RootResult out;
  for (int iter = 0; iter < max_iter; ++iter) {
    out.iterations = iter + 1;
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 =
        2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
        0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) {
      out.x = b;
      out.residual = fb;
      out.converged = true;
      return out;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // inverse quadratic / secant step
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q),
                             std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  out.x = b;
  out.residual = fb;
  out.converged = false;
  return out;
}

void bracket_expand(const std::function<double(double)>& f, double x0,
                    double delta0, int max_grow, double& lo, double& hi) {
  double delta = delta0;
  for (int k = 0; k < max_grow; ++k) {
    lo = x0 - delta;
    hi = x0 + delta;
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0 || fhi == 0.0 || (flo > 0.0) != (fhi > 0.0)) return;
    delta *= 2.0;
  }
  throw BracketFailure("bracket_expand: no sign change found");
}

RootResult newton_bisect(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double lo,
                         double hi, double ftol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if ((flo > 0.0) == (fhi > 0.0) && flo != 0.0 && fhi != 0.0) {
    throw BracketFailure("newton_bisect: interval does not bracket");
  }
  double x = 0.5 * (lo + hi);
  double fx = f(x);
  RootResult out;
  for (int iter = 0; iter < max_iter; ++iter) {
    out.iterations = iter + 1;
    if (std::abs(fx) <= ftol) {
      out.x = x;
      out.residual = fx;
      out.converged = true;
      return out;
    }
    // shrink the bracket with the current sign information
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    const double dfx = df(x);
    double xn = x - (dfx != 0.0 ? fx / dfx : 0.0);
    if (!(xn > lo) || !(xn < hi) || dfx == 0.0) {
      xn = 0.5 * (lo + hi);  // Newton left the bracket: bisect
    }
    x = xn;
    fx = f(x);
  }
  out.x = x;
  out.residual = fx;
  out.converged = false;
  return out;
}

namespace {

// Gauss-Kronrod 7-15 pair (QUADPACK constants).
constexpr std::array<double, 8> kK15Nodes = {
    0.000000000000000000000000000000000e+00,
    2.077849550078984676006894037732449e-01,
    4.058451513773971669066064120769615e-01,
    5.860872354676911302941448382587296e-01,
    7.415311855993944398638647732807884e-01,
    8.648644233597690727897127886409262e-01,
    9.491079123427585245261896840478513e-01,
    9.914553711208126392068546975263285e-01};

constexpr std::array<double, 8> kK15Weights = {
    2.094821410847278280129991748917143e-01,
    2.044329400752988924141619992346491e-01,
    1.903505780647854099132564024210137e-01,
    1.690047266392679028265834265985503e-01,
    1.406532597155259187451895905102379e-01,
    1.047900103222501838398763225415180e-01,
    6.309209262997855329070066318920429e-02,
    2.293532201052922496373200805896959e-02};

constexpr std::array<double, 4> kG7Weights = {
    4.179591836734693877551020408163265e-01,
    3.818300505051189449503697754889751e-01,
    2.797053914892766679014677714237796e-01,
    1.294849661688696932706114326790820e-01};

struct GkEstimate {
  double k15;
  double err;
};

GkEstimate gk15_panel(const std::function<double(double)>& f, double a,
                      double b) {
  const double hc = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double f0 = f(mid);
  double k15 = kK15Weights[0] * f0;
  double g7 = kG7Weights[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = hc * kK15Nodes[i];
    const double fsum = f(mid - dx) + f(mid + dx);
    k15 += kK15Weights[i] * fsum;
    if (i % 2 == 0) g7 += kG7Weights[i / 2] * fsum;
  }
  k15 *= hc;
  g7 *= hc;
  return {k15, std::abs(k15 - g7)};
}

double integrate_gk_rec(const std::function<double(double)>& f, double a,
                        double b, double tol, int depth) {
  const GkEstimate est = gk15_panel(f, a, b);
  if (est.err <= tol || depth <= 0) return est.k15;
  const double mid = 0.5 * (a + b);
  return integrate_gk_rec(f, a, mid, 0.5 * tol, depth - 1) +
         integrate_gk_rec(f, mid, b, 0.5 * tol, depth - 1);
}

// 15-point Gauss-Legendre nodes/weights on [-1, 1] (positive half).
constexpr std::array<double, 8> kGl15Nodes = {
    0.000000000000000000000000000000000e+00,
    2.011940939974345223006283033945962e-01,
    3.941513470775633698972073709810455e-01,
    5.709721726085388475372267372539106e-01,
    7.244177313601700474161860546139380e-01,
    8.482065834104272162006483207742169e-01,
    9.372733924007059043077589477102095e-01,
    9.879925180204854284895657185866126e-01};

constexpr std::array<double, 8> kGl15Weights = {
    2.025782419255612728806201999675193e-01,
    1.984314853271115764561183264438393e-01,
    1.861610000155622110268005618664228e-01,
    1.662692058169939335532008604812088e-01,
    1.395706779261543144478047945110283e-01,
    1.071592204671719350118695466858693e-01,
    7.036604748810812470926741645066734e-02,
    3.075324199611726835462839357720442e-02};

}  // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double tol, int max_depth) {
  if (a == b) return 0.0;
  return integrate_gk_rec(f, a, b, tol, max_depth);
}

double gauss15(const std::function<double(double)>& f, double a, double b) {
  const double hc = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = kGl15Weights[0] * f(mid);
  for (int i = 1; i < 8; ++i) {
    const double dx = hc * kGl15Nodes[i];
    acc += kGl15Weights[i] * (f(mid - dx) + f(mid + dx));
  }
  return acc * hc;
}

}  // namespace ionflux
