#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "manip/geometry.hpp"
#include "manip/random.hpp"

using namespace manip;

namespace {

constexpr double kPi = std::numbers::pi;

UnitQuat about_z(double deg) { return UnitQuat::from_axis_angle({0, 0, 1}, deg * kPi / 180.0); }
UnitQuat about_x(double deg) { return UnitQuat::from_axis_angle({1, 0, 0}, deg * kPi / 180.0); }

void check_quat(const UnitQuat& q, double w, double x, double y, double z, double eps = 1e-15) {
  CHECK(std::abs(q.w() - w) <= eps);
  CHECK(std::abs(q.x() - x) <= eps);
  CHECK(std::abs(q.y() - y) <= eps);
  CHECK(std::abs(q.z() - z) <= eps);
}

void check_vec(const Vec3& v, double x, double y, double z, double eps = 1e-15) {
  CHECK(std::abs(v.x - x) <= eps);
  CHECK(std::abs(v.y - y) <= eps);
  CHECK(std::abs(v.z - z) <= eps);
}

}  // namespace

TEST_CASE("construction normalizes and fixes the sign") {
  const UnitQuat q = UnitQuat::from_components(-2, 0, 0, 0);
  check_quat(q, 1, 0, 0, 0, 0);
  const UnitQuat half_turn = UnitQuat::from_components(0, 0, -1, 0);
  check_quat(half_turn, 0, 0, 1, 0, 0);
  CHECK_THROWS_AS(UnitQuat::from_components(0, 0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(UnitQuat::from_components(NAN, 0, 0, 1), std::invalid_argument);
}

TEST_CASE("normalization is idempotent") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const UnitQuat q = rng.orientation();
    const UnitQuat again = UnitQuat::from_components(q.w(), q.x(), q.y(), q.z());
    CHECK(again == q);
  }
}

TEST_CASE("compose") {
  Rng rng(1);
  const UnitQuat q = rng.orientation();
  CHECK(compose(UnitQuat::identity(), q) == q);
  CHECK(rotation_distance(compose(q, inverse(q)), UnitQuat::identity()) <= 1e-15);
  // Reference: scipy, z90 * z90.
  check_quat(compose(about_z(90), about_z(90)), 2.220446049250313e-16, 0, 0, 1.0, 1e-15);
}

TEST_CASE("compose is associative") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const UnitQuat a = rng.orientation();
    const UnitQuat b = rng.orientation();
    const UnitQuat c = rng.orientation();
    CHECK(rotation_distance(compose(compose(a, b), c), compose(a, compose(b, c))) <= 1e-12);
  }
}

TEST_CASE("inverse") {
  CHECK(inverse(UnitQuat::identity()) == UnitQuat::identity());
  // Reference: scipy, z90.inv().
  check_quat(inverse(about_z(90)), 0.7071067811865476, 0, 0, -0.7071067811865475, 1e-15);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const UnitQuat q = rng.orientation();
    const UnitQuat c = compose(q, inverse(q));
    CHECK(std::abs(c.w() - 1.0) <= 1e-12);
    CHECK(norm(c.vec()) <= 1e-12);
  }
}

TEST_CASE("rotate_vec") {
  check_vec(rotate_vec(UnitQuat::identity(), {1, 2, 3}), 1, 2, 3, 0);
  // Reference: scipy apply().
  check_vec(rotate_vec(about_z(90), {1, 0, 0}), 2.220446049250313e-16, 1.0, 0, 1e-15);
  check_vec(rotate_vec(about_x(180), {0, 1, 0}), 0, -1.0, 1.2246467991473532e-16, 1e-15);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = rng.in_ball(10.0);
    CHECK(std::abs(norm(rotate_vec(rng.orientation(), v)) - norm(v)) <= 1e-12);
  }
}

TEST_CASE("conjugate_rot") {
  const UnitQuat r = about_x(30);
  CHECK(conjugate_rot(UnitQuat::identity(), r) == r);
  // Reference: scipy, rotvec of z90 * x30 * z90^-1 = (0, pi/6, 0).
  const UnitQuat c = conjugate_rot(about_z(90), r);
  check_vec(c.axis() * c.angle(), 0, 0.5235987755982988, 0, 1e-15);
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const UnitQuat a = rng.orientation();
    const UnitQuat b = rng.orientation();
    CHECK(std::abs(conjugate_rot(a, b).angle() - b.angle()) <= 1e-12);
  }
}

TEST_CASE("slerp") {
  Rng rng(7);
  const UnitQuat a = rng.orientation();
  const UnitQuat b = rng.orientation();
  CHECK(slerp(a, b, 0.0) == a);
  CHECK(rotation_distance(slerp(a, b, 1.0), b) <= 1e-14);
  // Reference: scipy, 45 deg about z.
  check_quat(slerp(UnitQuat::identity(), about_z(90), 0.5), 0.9238795325112867, 0, 0, 0.3826834323650898, 1e-15);
  CHECK(rotation_distance(slerp(UnitQuat::identity(), b, -1.0), inverse(b)) <= 1e-14);
  // Degenerate arc returns the first endpoint unchanged.
  const UnitQuat near = compose(a, UnitQuat::from_axis_angle({0, 1, 0}, 1e-11));
  CHECK(slerp(a, near, 0.5) == a);
}

TEST_CASE("quat_pow") {
  Rng rng(8);
  const UnitQuat q = rng.orientation();
  CHECK(rotation_distance(quat_pow(q, 1.0), q) <= 1e-15);
  CHECK(quat_pow(q, 0.0) == UnitQuat::identity());
  check_quat(quat_pow(about_z(90), 0.5), 0.9238795325112867, 0, 0, 0.3826834323650898, 1e-15);
  CHECK(rotation_distance(quat_pow(q, -1.0), inverse(q)) <= 1e-15);
  for (double k : {-3.0, 0.5, 2.0, 7.0}) CHECK(quat_pow(UnitQuat::identity(), k) == UnitQuat::identity());
}

TEST_CASE("pose_dist") {
  const Pose p{{1, 2, 3}, about_z(40)};
  CHECK(pose_dist(p, p, DistanceMode::translation) == 0.0);
  CHECK(pose_dist(p, p, DistanceMode::rotation) == 0.0);
  CHECK(pose_dist({{0, 0, 0}, {}}, {{3, 4, 0}, {}}, DistanceMode::translation) == 5.0);
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const UnitQuat q = UnitQuat::from_axis_angle(rng.unit_vector(), kPi / 2);
    CHECK(std::abs(pose_dist({{}, {}}, {{}, q}, DistanceMode::rotation) - 1.5707963267948966) <= 1e-15);
  }
  // Symmetric.
  const UnitQuat a = rng.orientation();
  const UnitQuat b = rng.orientation();
  CHECK(pose_dist({{}, a}, {{}, b}, DistanceMode::rotation) == doctest::Approx(pose_dist({{}, b}, {{}, a}, DistanceMode::rotation)).epsilon(1e-14));
}

TEST_CASE("pose_dist resolves tiny angles") {
  // acos(w) cannot see below ~1.5e-8 rad; the atan2 form can.
  const UnitQuat q = UnitQuat::from_axis_angle({0, 0, 1}, 1e-10);
  CHECK(std::abs(pose_dist({{}, {}}, {{}, q}, DistanceMode::rotation) - 1e-10) <= 1e-24);
}

TEST_CASE("outputs carry canonical sign") {
  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const UnitQuat a = rng.orientation();
    const UnitQuat b = rng.orientation();
    for (const UnitQuat& q : {compose(a, b), inverse(a), slerp(a, b, rng.uniform(-2, 2)), conjugate_rot(a, b)}) {
      CHECK(q.w() >= 0.0);
      CHECK(std::abs(q.w() * q.w() + dot(q.vec(), q.vec()) - 1.0) <= 1e-12);
    }
  }
}
