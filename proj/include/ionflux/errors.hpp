#ifndef IONFLUX_ERRORS_HPP
#define IONFLUX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ionflux {

/// Base class for all library failures so callers can catch one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid model data (non-positive concentrations, bad valences, bad geometry).
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// Hard-sphere packing fraction reached or exceeded one:
/// 1 - d*c1 - lambda*d*c2 <= 0, where the excess chemical potential diverges.
class PackingOverflow : public Error {
 public:
  using Error::Error;
};

/// Layer-limit computation hit non-positive concentrations.
class InvalidLimits : public Error {
 public:
  using Error::Error;
};

/// A layer is absent at zeroth order (u0 = 0) but the first-order matching
/// numerator is nonzero, so no finite first-order field value exists.
class DegenerateLayer : public Error {
 public:
  using Error::Error;
};

/// A scalar root-finder could not bracket a sign change.
class BracketFailure : public Error {
 public:
  using Error::Error;
};

/// Boundary concentrations fail bulk electroneutrality
/// (z1*l1 + z2*l2 = 0 and z1*r1 + z2*r2 = 0 are required).
class NonNeutralBoundary : public Error {
 public:
  using Error::Error;
};

/// An operation that requires equal valence magnitudes (z1 = -z2) was
/// called with other valences.
class ValenceMismatch : public Error {
 public:
  using Error::Error;
};

/// The interior-region length equation has no positive root for the supplied
/// junction values: no choice of the stretched span reproduces the required
/// channel resistance between the two charge jumps.  During matching
/// iterations this signals an inconsistent trial state rather than a bug.
class NoYStar : public Error {
 public:
  using Error::Error;
};

/// The net-charge density sigma = (z1 - z2) z1 c10 - z2 Q reached zero along
/// the interior region, where the first-order field equation divides by it.
class SigmaVanishes : public Error {
 public:
  using Error::Error;
};

/// Newton iteration (matching system or finite-epsilon solve) did not reach
/// the requested residual tolerance.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// The linearized system was numerically singular.
class SingularJacobian : public Error {
 public:
  using Error::Error;
};

/// Mesh resolution insufficient for the requested epsilon.
class MeshTooCoarse : public Error {
 public:
  using Error::Error;
};

/// Configuration file problems (unknown keys, missing sections, bad values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures while writing outputs.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ionflux

#endif  // IONFLUX_ERRORS_HPP
