#pragma once

// Seeded random source for trajectory generation. Uses mt19937_64 for the raw
// stream and maps bits to doubles directly so that sequences do not depend on
// the standard library's distribution implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "manip/geometry.hpp"

namespace manip {

/// splitmix64 finalizer; used to derive independent per-trial seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) noexcept {
  return mix_seed(mix_seed(mix_seed(mix_seed(seed) ^ a) ^ b) ^ c);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform direction on the unit sphere.
  Vec3 unit_vector() {
    for (;;) {
      const Vec3 v{uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
      const double n = norm(v);
      if (n > 1e-3 && n <= 1.0) return v * (1.0 / n);
    }
  }

  /// Uniform point in the axis-aligned cube of the given edge, centred on the origin.
  Vec3 in_cube(double edge) {
    const double h = 0.5 * edge;
    return {uniform(-h, h), uniform(-h, h), uniform(-h, h)};
  }

  /// Uniform point in the ball of radius r.
  Vec3 in_ball(double r) { return unit_vector() * (r * std::cbrt(uniform())); }

  /// Uniformly distributed orientation (Shoemake's subgroup algorithm).
  UnitQuat orientation() {
    const double u1 = uniform(), u2 = uniform(), u3 = uniform();
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    const double t2 = 2.0 * std::numbers::pi * u2, t3 = 2.0 * std::numbers::pi * u3;
    return UnitQuat::from_components(b * std::cos(t3), a * std::sin(t2), a * std::cos(t2), b * std::sin(t3));
  }

  /// Rotation about a uniform axis with angle uniform in [0, max_angle].
  UnitQuat small_rotation(double max_angle) { return UnitQuat::from_axis_angle(unit_vector(), uniform(0.0, max_angle)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace manip
