#include "gapflyt/world.hpp"

#include <cmath>
#include <limits>

#include "gapflyt/error.hpp"

namespace gapflyt {

namespace {

enum class TraceStatus { hit, parallel, behind };

struct Trace {
  TraceStatus status;
  SurfaceHit hit;
};

void check_pose(const RigidTransform& pose) {
  if (pose.from() != Frame::C || pose.to() != Frame::W) {
    throw Error(ErrorCode::FrameMismatch, "camera pose must map C -> W");
  }
}

// Ray with camera-frame direction (nx, ny, 1); the parameter s along it is
// therefore the camera Z depth.
Trace trace(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir, const Scene& scene, bool relief) {
  if (std::abs(dir.z()) < 1e-12) return {TraceStatus::parallel, {}};
  const double s_fg = (scene.z_foreground() - origin.z()) / dir.z();
  const double s_bg = (scene.z_background() - origin.z()) / dir.z();
  auto at = [&](double s) { return Eigen::Vector2d(origin.x() + s * dir.x(), origin.y() + s * dir.y()); };

  if (s_fg > 0.0) {
    const Eigen::Vector2d uv = at(s_fg);
    if (!contains(scene.gap_polygon(), uv)) {
      double s = s_fg;
      Eigen::Vector2d hit_uv = uv;
      if (relief && scene.fg_texture().has_relief()) {
        for (int it = 0; it < 4; ++it) {
          s = (scene.z_foreground() - scene.fg_relief(hit_uv) - origin.z()) / dir.z();
          hit_uv = at(s);
        }
      }
      return {TraceStatus::hit, {s, Surface::foreground, hit_uv}};
    }
  }
  if (s_bg > 0.0) return {TraceStatus::hit, {s_bg, Surface::background, at(s_bg)}};
  return {TraceStatus::behind, {}};
}

template <typename Fn>
void for_each_ray(const RigidTransform& pose, const CameraModel& cam, Fn&& fn) {
  check_pose(pose);
  const Eigen::Matrix3d& r = pose.rotation();
  const Eigen::Vector3d& o = pose.translation();
  for (int row = 0; row < cam.height(); ++row) {
    for (int col = 0; col < cam.width(); ++col) {
      const Eigen::Vector2d n = cam.normalize(Pixel(col, row));
      fn(row, col, o, r * Eigen::Vector3d(n.x(), n.y(), 1.0));
    }
  }
}

}  // namespace

Scene::Scene(double z_foreground, double z_background, Polygon gap_polygon, const TextureSpec& fg,
             const TextureSpec& bg)
    : z_f_(z_foreground), z_b_(z_background), gap_(std::move(gap_polygon)), fg_(fg), bg_(bg) {
  if (!(z_f_ > 0.0 && z_f_ < z_b_)) {
    throw Error(ErrorCode::InvalidArgument, "need 0 < z_foreground < z_background");
  }
  if (!is_simple(gap_)) {
    throw Error(ErrorCode::InvalidArgument, "gap polygon must be simple with nonzero area");
  }
}

double Scene::fg_relief(const Eigen::Vector2d& uv) const {
  return fg_.spec().depth_amplitude * z_f_ * fg_.relief(uv);
}

SurfaceHit depth_at(const Pixel& pixel, const RigidTransform& world_from_camera, const CameraModel& cam,
                    const Scene& scene) {
  check_pose(world_from_camera);
  const Eigen::Vector2d n = cam.normalize(pixel);
  const Eigen::Vector3d dir = world_from_camera.rotation() * Eigen::Vector3d(n.x(), n.y(), 1.0);
  const Trace t = trace(world_from_camera.translation(), dir, scene, true);
  switch (t.status) {
    case TraceStatus::parallel: throw Error(ErrorCode::NoIntersection, "ray parallel to the planes");
    case TraceStatus::behind: throw Error(ErrorCode::BehindCamera, "both planes behind the camera");
    case TraceStatus::hit: break;
  }
  return t.hit;
}

Mask ground_truth_mask(const RigidTransform& world_from_camera, const CameraModel& cam, const Scene& scene) {
  Mask mask = Mask::Constant(cam.height(), cam.width(), false);
  for_each_ray(world_from_camera, cam, [&](int row, int col, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
    const Trace t = trace(o, d, scene, false);
    mask(row, col) = t.status == TraceStatus::hit && t.hit.surface == Surface::background;
  });
  return mask;
}

Grid<double> depth_map(const RigidTransform& world_from_camera, const CameraModel& cam, const Scene& scene) {
  Grid<double> depth(cam.height(), cam.width());
  for_each_ray(world_from_camera, cam, [&](int row, int col, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
    const Trace t = trace(o, d, scene, true);
    depth(row, col) = t.status == TraceStatus::hit ? t.hit.depth : std::numeric_limits<double>::quiet_NaN();
  });
  return depth;
}

Image render(const RigidTransform& world_from_camera, const CameraModel& cam, const Scene& scene) {
  Image img(cam.height(), cam.width());
  const double inv_f = 1.0 / cam.focal();
  for_each_ray(world_from_camera, cam, [&](int row, int col, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
    const Trace t = trace(o, d, scene, true);
    if (t.status != TraceStatus::hit) {
      img(row, col) = 0.0;
      return;
    }
    const Texture& tex = t.hit.surface == Surface::foreground ? scene.fg_texture() : scene.bg_texture();
    img(row, col) = tex.luminance(t.hit.uv, t.hit.depth * inv_f);
  });
  return img;
}

}  // namespace gapflyt
