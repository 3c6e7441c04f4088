#include "doctest.h"

#include <numbers>

#include "gapflyt/error.hpp"
#include "gapflyt/frames.hpp"
#include "gapflyt/rng.hpp"

using namespace gapflyt;

namespace {

Eigen::Matrix3d random_rotation(std::uint64_t key) {
  const Eigen::Vector3d axis(to_unit(hash_key(key, 1)) - 0.5, to_unit(hash_key(key, 2)) - 0.5,
                             to_unit(hash_key(key, 3)) - 0.5);
  return axis_rotation(axis.normalized(), 2.0 * std::numbers::pi * to_unit(hash_key(key, 4)));
}

Eigen::Vector3d random_vector(std::uint64_t key) {
  return {4.0 * to_unit(hash_key(key, 5)) - 2.0, 4.0 * to_unit(hash_key(key, 6)) - 2.0,
          4.0 * to_unit(hash_key(key, 7)) - 2.0};
}

const CameraModel kCam = CameraModel::centered(300.0, 576, 384);

}  // namespace

TEST_CASE("project: point on the optical axis lands on the principal point") {
  const Projection p = project({0.0, 0.0, 2.6}, kCam);
  CHECK(p.pixel.x() == doctest::Approx(288.0));
  CHECK(p.pixel.y() == doctest::Approx(192.0));
  CHECK(p.normalized.norm() == 0.0);
}

TEST_CASE("project: lateral offset uses f * X / Z + cx") {
  const Projection p = project({0.5, 0.0, 2.6}, kCam);
  CHECK(p.normalized.x() == doctest::Approx(0.19231).epsilon(1e-4));
  CHECK(p.pixel.x() == doctest::Approx(300.0 * 0.5 / 2.6 + 288.0).epsilon(1e-12));
  CHECK(p.pixel.x() == doctest::Approx(345.69).epsilon(1e-4));
}

TEST_CASE("project: points at or behind the camera throw BehindCamera") {
  for (double z : {-1.0, 0.0}) {
    try {
      project({0.0, 0.0, z}, kCam);
      FAIL("expected BehindCamera");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BehindCamera);
    }
  }
}

TEST_CASE("transform_point: identity, translation and yaw") {
  const FramedPoint p{{1.0, 2.0, 3.0}, Frame::C};
  const FramedPoint same = transform_point(p, RigidTransform::identity(Frame::C, Frame::W));
  CHECK((same.p - p.p).norm() == 0.0);
  CHECK(same.frame == Frame::W);

  const RigidTransform shift(Eigen::Matrix3d::Identity(), {0.0, 0.0, -2.6}, Frame::C, Frame::W);
  CHECK(transform_point({{0.0, 0.0, 2.6}, Frame::C}, shift).p.norm() < 1e-15);

  const RigidTransform yaw(axis_rotation(Eigen::Vector3d::UnitZ(), std::numbers::pi / 2), Eigen::Vector3d::Zero(),
                           Frame::B, Frame::W);
  const Eigen::Vector3d r = transform_point({{1.0, 0.0, 0.0}, Frame::B}, yaw).p;
  CHECK((r - Eigen::Vector3d(0.0, 1.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("transform_point: a point in the wrong frame throws FrameMismatch") {
  const RigidTransform t = RigidTransform::identity(Frame::C, Frame::W);
  try {
    transform_point({{1.0, 0.0, 0.0}, Frame::B}, t);
    FAIL("expected FrameMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FrameMismatch);
  }
}

TEST_CASE("compose: frame tags chain and mismatches throw") {
  const RigidTransform ab(random_rotation(1), random_vector(1), Frame::B, Frame::C);
  const RigidTransform bc(random_rotation(2), random_vector(2), Frame::C, Frame::W);
  const RigidTransform ac = compose(ab, bc);
  CHECK(ac.from() == Frame::B);
  CHECK(ac.to() == Frame::W);
  CHECK_THROWS_AS(compose(bc, ab), Error);
}

TEST_CASE("rigid transforms: orthonormality, inverse and associativity over random draws") {
  for (std::uint64_t k = 0; k < 50; ++k) {
    const RigidTransform a(random_rotation(3 * k), random_vector(3 * k), Frame::I, Frame::B);
    const RigidTransform b(random_rotation(3 * k + 1), random_vector(3 * k + 1), Frame::B, Frame::C);
    const RigidTransform c(random_rotation(3 * k + 2), random_vector(3 * k + 2), Frame::C, Frame::W);

    const Eigen::Matrix3d& r = a.rotation();
    CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-9));

    const RigidTransform round = compose(a, a.inverse());
    CHECK(round.from() == Frame::I);
    CHECK(round.to() == Frame::I);
    CHECK((round.rotation() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(round.translation().norm() < 1e-9);

    const RigidTransform left = compose(compose(a, b), c);
    const RigidTransform right = compose(a, compose(b, c));
    CHECK((left.rotation() - right.rotation()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((left.translation() - right.translation()).norm() < 1e-9);
  }
}

TEST_CASE("camera: normalize and denormalize are inverse; unproject recovers projected points") {
  for (int y = 0; y < kCam.height(); y += 37) {
    for (int x = 0; x < kCam.width(); x += 41) {
      const Pixel p(x, y);
      CHECK((kCam.denormalize(kCam.normalize(p)) - p).norm() < 1e-12);
    }
  }
  for (std::uint64_t k = 0; k < 100; ++k) {
    Eigen::Vector3d point = random_vector(k);
    point.z() = 0.5 + std::abs(point.z());
    const Projection proj = project(point, kCam);
    CHECK((kCam.unproject(proj.pixel, point.z()) - point).norm() < 1e-9);
  }
}

TEST_CASE("camera: invalid intrinsics are rejected") {
  CHECK_THROWS_AS(CameraModel(0.0, 10.0, 10.0, 20, 20), Error);
  CHECK_THROWS_AS(CameraModel(100.0, 20.0, 10.0, 20, 20), Error);
  CHECK_THROWS_AS(CameraModel(100.0, 10.0, -1.0, 20, 20), Error);
}

TEST_CASE("camera: resized keeps the field of view") {
  const CameraModel small = kCam.resized(48, 32);
  CHECK(small.focal() == doctest::Approx(300.0 * 32.0 / 384.0));
  CHECK(small.cx() == doctest::Approx(24.0));
  CHECK(small.cy() == doctest::Approx(16.0));
}

TEST_CASE("body and IMU frames are aligned") {
  const RigidTransform t = imu_from_body();
  CHECK(t.from() == Frame::B);
  CHECK(t.to() == Frame::I);
  CHECK(t.rotation() == Eigen::Matrix3d::Identity());
  CHECK(t.translation().norm() == 0.0);
}
