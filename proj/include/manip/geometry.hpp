#pragma once

// Double-precision vector / unit-quaternion kernel used by every mapping.
//
// Conventions:
//  * Hamilton product, scalar-first (w, x, y, z), right-handed frames.
//  * Unit quaternions are kept in canonical sign (w >= 0; for w == 0 the first
//    non-zero vector component is positive), so powers and distances always
//    take the short arc.
//  * rotate_vec(q, v) is the conjugation q v q^-1 with v embedded as a pure
//    quaternion; conjugate_rot(q, r) is q r q^-1.
//
// Every function here is pure and thread-safe.

#include <array>
#include <cmath>

namespace manip {

struct Vec3 {
  double x{}, y{}, z{};

  constexpr Vec3() noexcept = default;
  constexpr Vec3(double x_, double y_, double z_) noexcept : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const noexcept { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const noexcept { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const noexcept { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const noexcept { return {x * s, y * s, z * s}; }
  constexpr Vec3& operator+=(const Vec3& o) noexcept {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  constexpr bool operator==(const Vec3&) const noexcept = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) noexcept { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) noexcept {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) noexcept { return std::sqrt(dot(v, v)); }

inline bool is_finite(const Vec3& v) noexcept {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Rotation stored as a canonical unit quaternion.
///
/// The only way to obtain one is through the factories, which normalize and
/// canonicalize, so every instance satisfies | |q| - 1 | <= 1e-12 and w >= 0.
class UnitQuat {
 public:
  constexpr UnitQuat() noexcept = default;

  static constexpr UnitQuat identity() noexcept { return {}; }

  /// Normalizes (w, x, y, z). Throws std::invalid_argument for a zero or
  /// non-finite input.
  static UnitQuat from_components(double w, double x, double y, double z);

  /// Rotation of `angle` radians about `axis` (need not be unit length).
  /// A zero axis or zero angle gives the identity.
  static UnitQuat from_axis_angle(const Vec3& axis, double angle);

  constexpr double w() const noexcept { return w_; }
  constexpr double x() const noexcept { return x_; }
  constexpr double y() const noexcept { return y_; }
  constexpr double z() const noexcept { return z_; }
  constexpr Vec3 vec() const noexcept { return {x_, y_, z_}; }
  constexpr std::array<double, 4> components() const noexcept { return {w_, x_, y_, z_}; }

  /// Rotation angle in [0, pi].
  double angle() const noexcept;
  /// Unit rotation axis; (0,0,0) for the identity.
  Vec3 axis() const noexcept;

  constexpr bool operator==(const UnitQuat&) const noexcept = default;

 private:
  constexpr UnitQuat(double w, double x, double y, double z) noexcept : w_(w), x_(x), y_(y), z_(z) {}

  double w_{1.0}, x_{0.0}, y_{0.0}, z_{0.0};
};

struct Pose {
  Vec3 p{};
  UnitQuat q{};

  constexpr bool operator==(const Pose&) const noexcept = default;
};

enum class DistanceMode { translation, rotation };

/// Hamilton product a*b (apply b first, then a).
UnitQuat compose(const UnitQuat& a, const UnitQuat& b) noexcept;

UnitQuat inverse(const UnitQuat& q) noexcept;

/// q v q^-1.
Vec3 rotate_vec(const UnitQuat& q, const Vec3& v) noexcept;

/// q r q^-1: same angle as r, axis rotated by q.
UnitQuat conjugate_rot(const UnitQuat& q, const UnitQuat& r) noexcept;

/// Spherical interpolation along the short arc; k outside [0, 1] extrapolates.
/// When a and b are closer than 1e-10 rad the result is a.
UnitQuat slerp(const UnitQuat& a, const UnitQuat& b, double k) noexcept;

/// q^k, i.e. slerp(identity, q, k): same axis, angle scaled by k.
UnitQuat quat_pow(const UnitQuat& q, double k) noexcept;

/// Distance between two orientations in [0, pi].
double rotation_distance(const UnitQuat& a, const UnitQuat& b) noexcept;

/// Euclidean distance of positions (translation) or relative rotation angle
/// in [0, pi] (rotation).
double pose_dist(const Pose& a, const Pose& b, DistanceMode mode) noexcept;

inline constexpr double kDegenerateArc = 1e-10;

}  // namespace manip
