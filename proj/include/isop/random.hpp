#pragma once

#include "isop/geometry.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace isop {

using Rng = std::mt19937_64;

/// Independent generator for (seed, stream); used for per-trial and
/// per-stratum substreams so results do not depend on thread scheduling.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

/// Uniform on [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline Vec gaussian_vec(Rng& rng, int n) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

inline Vec random_unit(Rng& rng, int n) {
  for (;;) {
    Vec v = gaussian_vec(rng, n);
    const double r = v.norm();
    if (r > 1e-12) return v / r;
  }
}

/// Point at geodesic distance at most `radius` from the basepoint, uniform in
/// direction and in distance.
inline Point random_point(Rng& rng, Geometry g, double radius) {
  const Vec dir = random_unit(rng, g.dim);
  return exp_base(g, dir * (radius * uniform01(rng)));
}

inline std::vector<Point> random_points(Rng& rng, Geometry g, int n, double radius) {
  std::vector<Point> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) pts.push_back(random_point(rng, g, radius));
  return pts;
}

/// Point uniformly on the geodesic sphere of the given radius about the basepoint.
inline Point random_on_sphere(Rng& rng, Geometry g, double radius) {
  return exp_base(g, random_unit(rng, g.dim) * radius);
}

}  // namespace isop
