#include "manip/geometry.hpp"

#include <stdexcept>

namespace manip {

namespace {

// Squared-norm deviation below which a quaternion is treated as already unit.
// A normalized result always lands inside it, so normalization is idempotent.
constexpr double kUnitSlack = 1e-14;

// Canonical sign: w > 0, or w == 0 and the first non-zero of (x, y, z) > 0.
bool needs_flip(double w, double x, double y, double z) noexcept {
  if (w != 0.0) return w < 0.0;
  if (x != 0.0) return x < 0.0;
  if (y != 0.0) return y < 0.0;
  return z < 0.0;
}

// Half-angle of a unit quaternion from atan2, accurate at both ends of the range.
double half_angle(double w, const Vec3& v) noexcept { return std::atan2(norm(v), std::abs(w)); }

}  // namespace

UnitQuat UnitQuat::from_components(double w, double x, double y, double z) {
  if (!std::isfinite(w) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    throw std::invalid_argument("quaternion has non-finite component");
  }
  const double n2 = w * w + x * x + y * y + z * z;
  if (n2 == 0.0) throw std::invalid_argument("zero quaternion");
  // Already-unit inputs are kept bit-for-bit so that normalization is idempotent.
  if (std::abs(n2 - 1.0) > kUnitSlack) {
    const double inv = 1.0 / std::sqrt(n2);
    w *= inv;
    x *= inv;
    y *= inv;
    z *= inv;
  }
  if (needs_flip(w, x, y, z)) return {-w, -x, -y, -z};
  return {w, x, y, z};
}

UnitQuat UnitQuat::from_axis_angle(const Vec3& axis, double angle) {
  const double n = norm(axis);
  if (n == 0.0 || angle == 0.0) return identity();
  const double s = std::sin(0.5 * angle) / n;
  return from_components(std::cos(0.5 * angle), axis.x * s, axis.y * s, axis.z * s);
}

double UnitQuat::angle() const noexcept { return 2.0 * half_angle(w_, vec()); }

Vec3 UnitQuat::axis() const noexcept {
  const Vec3 v = vec();
  const double n = norm(v);
  if (n == 0.0) return {};
  return v * (1.0 / n);
}

UnitQuat compose(const UnitQuat& a, const UnitQuat& b) noexcept {
  const double w = a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z();
  const double x = a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y();
  const double y = a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x();
  const double z = a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w();
  return UnitQuat::from_components(w, x, y, z);
}

UnitQuat inverse(const UnitQuat& q) noexcept {
  return UnitQuat::from_components(q.w(), -q.x(), -q.y(), -q.z());
}

Vec3 rotate_vec(const UnitQuat& q, const Vec3& v) noexcept {
  // Expanded form of q (0, v) q^-1: v + 2w (u x v) + 2 u x (u x v).
  const Vec3 u = q.vec();
  const Vec3 t = cross(u, v) * 2.0;
  return v + t * q.w() + cross(u, t);
}

UnitQuat conjugate_rot(const UnitQuat& q, const UnitQuat& r) noexcept {
  return compose(compose(q, r), inverse(q));
}

UnitQuat slerp(const UnitQuat& a, const UnitQuat& b, double k) noexcept {
  // Geometric form: a * (a^-1 b)^k, with the power taken in axis-angle space.
  // a^-1 b is canonical, hence already on the short arc.
  const UnitQuat rel = compose(inverse(a), b);
  const Vec3 v = rel.vec();
  const double half = half_angle(rel.w(), v);
  if (2.0 * half < kDegenerateArc) return a;
  const double scaled = k * half;
  const double s = std::sin(scaled) / norm(v);
  const UnitQuat step = UnitQuat::from_components(std::cos(scaled), v.x * s, v.y * s, v.z * s);
  return compose(a, step);
}

UnitQuat quat_pow(const UnitQuat& q, double k) noexcept { return slerp(UnitQuat::identity(), q, k); }

double rotation_distance(const UnitQuat& a, const UnitQuat& b) noexcept {
  return compose(a, inverse(b)).angle();
}

double pose_dist(const Pose& a, const Pose& b, DistanceMode mode) noexcept {
  if (mode == DistanceMode::translation) return norm(a.p - b.p);
  // 2 acos(w) of a b^-1, evaluated through atan2 so that nearly-equal
  // orientations do not snap to ~1.5e-8 rad as acos does near 1.
  return rotation_distance(a.q, b.q);
}

}  // namespace manip
