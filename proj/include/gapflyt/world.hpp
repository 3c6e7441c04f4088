#pragma once

#include <Eigen/Core>

#include "gapflyt/frames.hpp"
#include "gapflyt/grid.hpp"
#include "gapflyt/polygon.hpp"
#include "gapflyt/texture.hpp"

namespace gapflyt {

/// Two fronto-parallel textured planes at world Z = z_foreground and
/// Z = z_background; the foreground has a polygonal opening.
class Scene {
 public:
  Scene(double z_foreground, double z_background, Polygon gap_polygon, const TextureSpec& fg,
        const TextureSpec& bg);

  double z_foreground() const { return z_f_; }
  double z_background() const { return z_b_; }
  const Polygon& gap_polygon() const { return gap_; }
  const Texture& fg_texture() const { return fg_; }
  const Texture& bg_texture() const { return bg_; }

  /// Protrusion of the foreground towards the camera at plane point uv (metres).
  double fg_relief(const Eigen::Vector2d& uv) const;

 private:
  double z_f_;
  double z_b_;
  Polygon gap_;
  Texture fg_;
  Texture bg_;
};

enum class Surface { foreground, background };

struct SurfaceHit {
  double depth;          ///< camera-frame Z of the hit point (metres)
  Surface surface;
  Eigen::Vector2d uv;    ///< world (X, Y) of the hit point
};

/// Surface seen through `pixel`. Throws NoIntersection when the ray is
/// parallel to the planes and BehindCamera when both planes are behind.
SurfaceHit depth_at(const Pixel& pixel, const RigidTransform& world_from_camera, const CameraModel& cam,
                    const Scene& scene);

/// 1 where the pixel sees the background through the opening.
Mask ground_truth_mask(const RigidTransform& world_from_camera, const CameraModel& cam, const Scene& scene);

/// Per-pixel Z depth; NaN where no surface is hit.
Grid<double> depth_map(const RigidTransform& world_from_camera, const CameraModel& cam, const Scene& scene);

Image render(const RigidTransform& world_from_camera, const CameraModel& cam, const Scene& scene);

}  // namespace gapflyt
