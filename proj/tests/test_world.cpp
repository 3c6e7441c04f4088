#include "doctest.h"

#include <cmath>
#include <numbers>

#include "gapflyt/error.hpp"
#include "gapflyt/image_ops.hpp"
#include "gapflyt/polygon.hpp"
#include "gapflyt/world.hpp"

using namespace gapflyt;

namespace {

const CameraModel kCam = CameraModel::centered(300.0, 576, 384);

Scene make_scene(TextureKind fg = TextureKind::newspaper, TextureKind bg = TextureKind::newspaper,
                 Polygon gap = canned_gap("square", 1.0)) {
  TextureSpec f{fg, 11, 1.0, 0.0};
  TextureSpec b{bg, 12, 1.0, 0.0};
  return Scene(2.6, 5.7, std::move(gap), f, b);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

// Sub-pixel horizontal shift d minimising SSD between a(x) and b(x + d) over a patch.
double horizontal_shift(const Image& a, const Image& b, int x0, int x1, int y0, int y1) {
  double best = 0.0;
  double best_cost = INFINITY;
  for (double d = -6.0; d <= 6.0; d += 0.01) {
    double cost = 0.0;
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const double diff = a(y, x) - bilinear(b, x + d, y);
        cost += diff * diff;
      }
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = d;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("depth_at: centre sees the background, far pixels the foreground") {
  const Scene scene = make_scene();
  const RigidTransform pose = camera_pose(Eigen::Vector3d::Zero());
  const SurfaceHit centre = depth_at({288.0, 192.0}, pose, kCam, scene);
  CHECK(centre.surface == Surface::background);
  CHECK(centre.depth == doctest::Approx(5.7));
  const SurfaceHit corner = depth_at({5.0, 5.0}, pose, kCam, scene);
  CHECK(corner.surface == Surface::foreground);
  CHECK(corner.depth == doctest::Approx(2.6));
}

TEST_CASE("depth_at: degenerate rays") {
  const Scene scene = make_scene();
  const RigidTransform sideways =
      camera_pose(Eigen::Vector3d::Zero(), axis_rotation(Eigen::Vector3d::UnitY(), std::numbers::pi / 2));
  CHECK(code_of([&] { depth_at({288.0, 192.0}, sideways, kCam, scene); }) == ErrorCode::NoIntersection);
  const RigidTransform beyond = camera_pose({0.0, 0.0, 7.0});
  CHECK(code_of([&] { depth_at({288.0, 192.0}, beyond, kCam, scene); }) == ErrorCode::BehindCamera);
}

TEST_CASE("ground_truth_mask: centred square projects to half-width 300*0.5/2.6") {
  const Scene scene = make_scene();
  const Mask g = ground_truth_mask(camera_pose(Eigen::Vector3d::Zero()), kCam, scene);
  const double half = 300.0 * 0.5 / 2.6;
  int row_count = 0;
  for (int x = 0; x < g.cols(); ++x) row_count += g(192, x) ? 1 : 0;
  CHECK(std::abs(row_count - 2.0 * half) <= 2.0);
  int col_count = 0;
  for (int y = 0; y < g.rows(); ++y) col_count += g(y, 288) ? 1 : 0;
  CHECK(std::abs(col_count - 2.0 * half) <= 2.0);
  CHECK(g.count() == doctest::Approx(4.0 * half * half).epsilon(0.04));
}

TEST_CASE("ground_truth_mask: limit cases") {
  const Scene scene = make_scene();
  const Mask away = ground_truth_mask(camera_pose({20.0, 0.0, 0.0}), kCam, scene);
  CHECK(away.count() == 0);
  const Mask close = ground_truth_mask(camera_pose({0.0, 0.0, 2.6 - 1e-3}), kCam, scene);
  CHECK(static_cast<double>(close.count()) >= 0.99 * close.size());
}

TEST_CASE("mask consistency and bimodal depth over every pixel") {
  const Scene scene = make_scene(TextureKind::newspaper, TextureKind::newspaper, canned_gap("chevron", 1.2));
  const CameraModel cam = kCam.resized(144, 96);
  const RigidTransform pose = camera_pose({0.1, -0.05, 0.2});
  const Mask g = ground_truth_mask(pose, cam, scene);
  for (int y = 0; y < cam.height(); ++y) {
    for (int x = 0; x < cam.width(); ++x) {
      const SurfaceHit hit = depth_at({x, y}, pose, cam, scene);
      CHECK(g(y, x) == (hit.surface == Surface::background));
      const double expected = hit.surface == Surface::background ? 5.7 - 0.2 : 2.6 - 0.2;
      CHECK(hit.depth == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("bumpy foreground depth stays within its relief amplitude") {
  TextureSpec bumpy{TextureKind::bumpy, 3, 1.0, 0.25};
  const Scene scene(2.6, 5.7, canned_gap("square", 1.0), bumpy, TextureSpec{});
  const CameraModel cam = kCam.resized(96, 64);
  const Grid<double> d = depth_map(camera_pose(Eigen::Vector3d::Zero()), cam, scene);
  double lo = INFINITY;
  for (double v : d.reshaped()) {
    if (v < 5.0) lo = std::min(lo, v);
    CHECK((v <= 2.6 + 1e-12 || v == doctest::Approx(5.7)));
  }
  CHECK(lo < 2.6);
  CHECK(lo >= 2.6 * 0.75 - 1e-12);
}

TEST_CASE("render: flat textures give a constant image") {
  const Scene scene = make_scene(TextureKind::flat_door, TextureKind::flat_door);
  const Image img = render(camera_pose(Eigen::Vector3d::Zero()), kCam.resized(96, 64), scene);
  CHECK(img.maxCoeff() == img.minCoeff());
  CHECK(sobel_x(img).abs().maxCoeff() == 0.0);
  CHECK(sobel_y(img).abs().maxCoeff() == 0.0);
}

TEST_CASE("render: deterministic and within [0,1]") {
  for (TextureKind kind : {TextureKind::newspaper, TextureKind::low_texture, TextureKind::leaves,
                           TextureKind::cloth, TextureKind::bumpy, TextureKind::wall}) {
    TextureSpec spec{kind, 5, 0.8, kind == TextureKind::bumpy ? 0.2 : 0.0};
    const Scene scene(2.6, 5.7, canned_gap("ellipse", 1.0), spec, spec);
    const CameraModel cam = kCam.resized(96, 64);
    const Image a = render(camera_pose({0.05, 0.0, 0.0}), cam, scene);
    const Image b = render(camera_pose({0.05, 0.0, 0.0}), cam, scene);
    CHECK((a == b).all());
    CHECK(a.allFinite());
    CHECK(a.minCoeff() >= 0.0);
    CHECK(a.maxCoeff() <= 1.0);
  }
}

TEST_CASE("render: lateral motion shifts each plane by f * dX / Z") {
  const Scene scene = make_scene();
  const double dx = 0.02;
  const Image a = render(camera_pose(Eigen::Vector3d::Zero()), kCam, scene);
  const Image b = render(camera_pose({dx, 0.0, 0.0}), kCam, scene);
  // Content moves opposite to the camera: a(x) = b(x - f dX / Z).
  const double fg = horizontal_shift(a, b, 40, 200, 20, 80);
  CHECK(std::abs(fg + 300.0 * dx / 2.6) <= 0.25);
  const double bg = horizontal_shift(a, b, 268, 308, 172, 212);
  CHECK(std::abs(bg + 300.0 * dx / 5.7) <= 0.25);
}

TEST_CASE("polygons: canned gaps are simple and centred") {
  for (const char* name : {"square", "rectangle", "triangle", "ellipse", "chevron"}) {
    const Polygon p = canned_gap(name, 1.0);
    CHECK(is_simple(p));
    CHECK(std::abs(signed_area(p)) > 0.0);
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& v : p) {
      lo = std::min(lo, v.x());
      hi = std::max(hi, v.x());
    }
    CHECK(hi - lo == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(code_of([] { canned_gap("hexagon", 1.0); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("polygons: containment and signed distance") {
  const Polygon sq = canned_gap("square", 1.0);
  CHECK(contains(sq, {0.0, 0.0}));
  CHECK_FALSE(contains(sq, {0.6, 0.0}));
  CHECK(signed_distance(sq, {0.0, 0.0}) == doctest::Approx(0.5));
  CHECK(signed_distance(sq, {0.7, 0.0}) == doctest::Approx(-0.2));
  const Polygon bow{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_FALSE(is_simple(bow));
  CHECK_FALSE(is_simple(Polygon{{0, 0}, {1, 0}}));
}

TEST_CASE("scene construction rejects bad geometry") {
  CHECK_THROWS_AS(Scene(5.7, 2.6, canned_gap("square", 1.0), TextureSpec{}, TextureSpec{}), Error);
  CHECK_THROWS_AS(Scene(0.0, 2.6, canned_gap("square", 1.0), TextureSpec{}, TextureSpec{}), Error);
  CHECK_THROWS_AS(Scene(2.6, 5.7, Polygon{{0, 0}, {1, 1}, {1, 0}, {0, 1}}, TextureSpec{}, TextureSpec{}), Error);
}

TEST_CASE("value noise is deterministic and bounded") {
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector2d p(0.37 * i, -0.11 * i);
    const double a = value_noise(99, p);
    CHECK(a == value_noise(99, p));
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
  }
}
