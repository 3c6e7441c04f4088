#include "doctest.h"

#include <cmath>
#include <vector>

#include "gapflyt/error.hpp"
#include "gapflyt/flythrough.hpp"
#include "gapflyt/polygon.hpp"

using namespace gapflyt;

namespace {

const CameraModel kCam = CameraModel::centered(300.0, 576, 384);

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

double truncate_sig3(double v) {
  const double scale = std::pow(10.0, 2 - static_cast<int>(std::floor(std::log10(v))));
  return std::floor(v * scale + 1e-9) / scale;
}

Pixel image_of(const Eigen::Vector3d& target, const QuadState& s) {
  const Eigen::Vector3d c = world_from_body_rotation(s.yaw).transpose() * (target - s.position);
  return project(c, kCam).pixel;
}

std::vector<QuadState> line(const Eigen::Vector3d& from, const Eigen::Vector3d& to, int n) {
  std::vector<QuadState> out(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) out[k].position = from + (to - from) * (static_cast<double>(k) / n);
  return out;
}

}  // namespace

TEST_CASE("scan_trajectory: spacing, count and attitude") {
  const auto poses = scan_trajectory(Eigen::Vector3d::Zero(), 0.4, 4);
  REQUIRE(poses.size() == 5);
  for (std::size_t k = 1; k < poses.size(); ++k) {
    const Eigen::Vector3d d = poses[k].translation() - poses[k - 1].translation();
    CHECK(d.x() == doctest::Approx(0.4 / (4.0 * std::sqrt(2.0))));
    CHECK(d.z() == doctest::Approx(0.0707).epsilon(1e-3));
    CHECK(d.y() == 0.0);
    CHECK(d.z() / d.x() == doctest::Approx(1.0));
    CHECK(poses[k].rotation() == Eigen::Matrix3d::Identity());
    CHECK(poses[k].from() == Frame::C);
    CHECK(poses[k].to() == Frame::W);
  }
  CHECK(scan_trajectory(Eigen::Vector3d::Zero(), 0.3, 1).size() == 2);
  CHECK(code_of([] { scan_trajectory(Eigen::Vector3d::Zero(), 0.0, 4); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { scan_trajectory(Eigen::Vector3d::Zero(), 0.3, 0); }) == ErrorCode::InvalidArgument);

  const double a = 15.0 * std::numbers::pi / 180.0;
  const auto shallow = scan_trajectory({1.0, 0.0, -0.5}, 0.3, 4, a);
  const Eigen::Vector3d total = shallow.back().translation() - shallow.front().translation();
  CHECK(total.norm() == doctest::Approx(0.3));
  CHECK(total.z() / total.x() == doctest::Approx(std::tan(a)));
}

TEST_CASE("servo_step: aligned target flies straight ahead") {
  QuadState s;
  ServoGains g;
  for (int i = 0; i < 30; ++i) s = servo_step(s, kCam.principal_point(), kCam, g, 1.0 / 30.0);
  CHECK(s.commanded_body_velocity.x() == 0.0);
  CHECK(s.commanded_body_velocity.y() == 0.0);
  CHECK(s.commanded_body_velocity.z() == 1.0);
  CHECK(s.position.x() == 0.0);
  CHECK(s.position.y() == 0.0);
  CHECK(s.position.z() > 0.0);
}

TEST_CASE("servo_step: proportional command and axis decoupling") {
  ServoGains g;
  g.kp = Eigen::Vector2d::Constant(0.02);
  const QuadState s0;
  const QuadState a = servo_step(s0, kCam.principal_point() + Pixel(10.0, 0.0), kCam, g, 1.0 / 30.0);
  CHECK(a.commanded_body_velocity.x() == doctest::Approx(0.2));
  CHECK(a.velocity.x() > 0.0);

  g.ki = Eigen::Vector2d::Constant(0.01);
  g.kd = Eigen::Vector2d::Constant(0.005);
  for (double ey : {-80.0, 0.0, 35.0}) {
    const QuadState b = servo_step(a, kCam.principal_point() + Pixel(12.0, ey), kCam, g, 1.0 / 30.0);
    const QuadState c = servo_step(a, kCam.principal_point() + Pixel(12.0, 0.0), kCam, g, 1.0 / 30.0);
    CHECK(b.commanded_body_velocity.x() == c.commanded_body_velocity.x());
  }
  for (double ex : {-60.0, 5.0}) {
    const QuadState b = servo_step(a, kCam.principal_point() + Pixel(ex, 20.0), kCam, g, 1.0 / 30.0);
    const QuadState c = servo_step(a, kCam.principal_point() + Pixel(0.0, 20.0), kCam, g, 1.0 / 30.0);
    CHECK(b.commanded_body_velocity.y() == c.commanded_body_velocity.y());
  }
  CHECK(code_of([&] { servo_step(s0, kCam.principal_point(), kCam, g, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("servo_step: closed loop drives the image error to zero") {
  const ServoGains g;
  const double dt = 1.0 / 30.0;
  for (const Eigen::Vector2d& offset : {Eigen::Vector2d(100.0, 0.0), Eigen::Vector2d(-70.0, 70.0),
                                       Eigen::Vector2d(0.0, -100.0), Eigen::Vector2d(30.0, 20.0)}) {
    const double depth = 8.0;
    const Eigen::Vector3d target(offset.x() * depth / 300.0, offset.y() * depth / 300.0, depth);
    QuadState s;
    double last = INFINITY;
    bool monotone = true;
    double e = 0.0;
    for (int k = 1; k * dt <= 3.0 + 1e-9; ++k) {
      const Pixel xs = image_of(target, s);
      s = servo_step(s, xs, kCam, g, dt);
      e = (image_of(target, s) - kCam.principal_point()).norm();
      if (k * dt > 0.5) {
        if (e > last) monotone = false;
        last = e;
      }
    }
    CHECK(monotone);
    CHECK(e < 1.0);
  }
}

TEST_CASE("traversal_check: clearance sign convention") {
  const Scene scene(2.6, 5.7, canned_gap("square", 1.0), TextureSpec{}, TextureSpec{});
  const TraversalResult centre = traversal_check(line({0, 0, 0}, {0, 0, 4}, 40), scene, 0.17);
  CHECK(centre.success);
  CHECK(centre.clearance == doctest::Approx(0.33));

  const TraversalResult off = traversal_check(line({0.34, 0, 0}, {0.34, 0, 4}, 40), scene, 0.17);
  CHECK_FALSE(off.success);
  CHECK(off.clearance == doctest::Approx(-0.01));
  CHECK(off.crossing.x() == doctest::Approx(0.34));

  const TraversalResult slanted = traversal_check(line({-1.0, 0, 0}, {0.3, 0, 5.2}, 13), scene, 0.17);
  CHECK(slanted.crossing.x() == doctest::Approx(-0.35));

  CHECK(code_of([&] { traversal_check(line({0, 0, 0}, {0, 0, 2.0}, 20), scene, 0.17); }) == ErrorCode::NotAttempted);
  CHECK(code_of([&] { traversal_check({}, scene, 0.17); }) == ErrorCode::NotAttempted);
}

TEST_CASE("theoretical_max_speed reproduces the tracker speed table") {
  const double expected[] = {8.00, 3.20, 1.92, 0.40};
  const double runtimes[] = {0.002, 0.005, 0.0083, 0.040};
  for (int i = 0; i < 4; ++i) {
    const double v = theoretical_max_speed(runtimes[i], 2.6, 5.7);
    CHECK(truncate_sig3(v) == doctest::Approx(expected[i]).epsilon(1e-12));
  }
  const double base = theoretical_max_speed(0.002, 2.6, 5.7);
  CHECK(theoretical_max_speed(0.002, 2.6, 5.7, kCalibratedFocal, 2.0) == doctest::Approx(2.0 * base).epsilon(1e-15));
  CHECK(theoretical_max_speed(0.005, 2.6, 5.7) * 0.005 == doctest::Approx(base * 0.002).epsilon(1e-15));
  CHECK(code_of([] { theoretical_max_speed(0.0, 2.6, 5.7); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { theoretical_max_speed(0.002, 5.7, 2.6); }) == ErrorCode::InvalidArgument);
}
