#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace isop {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Errc : std::uint8_t {
  geometry_mismatch,
  antipodal,
  pole,
  hemisphere,
  degenerate,
  hypothesis,
  infeasible,
  non_convergence,
  unsupported,
  invalid_input,
  budget,
};

inline const char* errc_name(Errc e) {
  switch (e) {
    case Errc::geometry_mismatch: return "geometry_mismatch";
    case Errc::antipodal: return "antipodal";
    case Errc::pole: return "pole";
    case Errc::hemisphere: return "hemisphere";
    case Errc::degenerate: return "degenerate";
    case Errc::hypothesis: return "hypothesis";
    case Errc::infeasible: return "infeasible";
    case Errc::non_convergence: return "non_convergence";
    case Errc::unsupported: return "unsupported";
    case Errc::invalid_input: return "invalid_input";
    case Errc::budget: return "budget";
  }
  return "unknown";
}

/// Every failure raised by the library. `code()` tells the caller which
/// precondition broke; the message carries the numbers.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

namespace tol {
// on-model checks for ||x|| = 1 and <x,x>_M = -1 (relative to x0^2 in H)
inline constexpr double model = 1e-12;
// acos/acosh clamping, antipode and pole margins
inline constexpr double domain = 1e-9;
// Radon kernel entries below this fraction of the max are zero
inline constexpr double radon_zero = 1e-10;
// facet incidence / membership slack on unit-normalized lifts
inline constexpr double facet = 1e-9;
// relative singular-value cutoff for numeric rank
inline constexpr double rank = 1e-10;
}  // namespace tol

enum class Space : std::uint8_t { euclidean, hyperbolic, spherical };

struct Geometry {
  Space space = Space::euclidean;
  int dim = 2;

  static Geometry euclidean(int d) { return {Space::euclidean, d}; }
  static Geometry hyperbolic(int d) { return {Space::hyperbolic, d}; }
  static Geometry spherical(int d) { return {Space::spherical, d}; }

  bool is_euclidean() const { return space == Space::euclidean; }
  bool is_hyperbolic() const { return space == Space::hyperbolic; }
  bool is_spherical() const { return space == Space::spherical; }

  /// Length of the coordinate vector of a point.
  int ambient_dim() const { return is_euclidean() ? dim : dim + 1; }

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

inline char space_tag(Space s) {
  switch (s) {
    case Space::euclidean: return 'E';
    case Space::hyperbolic: return 'H';
    case Space::spherical: return 'S';
  }
  return '?';
}

inline Space parse_space(std::string_view s) {
  if (s == "E" || s == "euclidean") return Space::euclidean;
  if (s == "H" || s == "hyperbolic") return Space::hyperbolic;
  if (s == "S" || s == "spherical") return Space::spherical;
  throw Error(Errc::invalid_input, "unknown geometry '" + std::string(s) + "'");
}

inline std::string geometry_name(const Geometry& g) {
  return std::string(1, space_tag(g.space)) + "^" + std::to_string(g.dim);
}

/// Lorentzian form -x0 y0 + sum xi yi, time coordinate first.
inline double minkowski(const Vec& a, const Vec& b) {
  return a.dot(b) - 2.0 * a[0] * b[0];
}

/// Applies diag(-1, 1, ..., 1).
inline Vec flip_time(Vec v) {
  v[0] = -v[0];
  return v;
}

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace isop
