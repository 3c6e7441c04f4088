#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <string_view>

#include "gapflyt/grid.hpp"

namespace gapflyt {

/// World, body, camera and IMU frames.
enum class Frame { W, B, C, I };

std::string_view to_string(Frame f);

/// A 3-vector carrying the frame it is expressed in.
struct FramedPoint {
  Eigen::Vector3d p;
  Frame frame;
};

/// Maps coordinates expressed in `from()` into `to()`: x_to = R x_from + t.
class RigidTransform {
 public:
  RigidTransform(Frame from, Frame to);
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation, Frame from,
                 Frame to);

  static RigidTransform identity(Frame from, Frame to) { return RigidTransform(from, to); }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  Frame from() const { return from_; }
  Frame to() const { return to_; }

  RigidTransform inverse() const;

  /// Applies the transform without a frame check.
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const { return rotation_ * p + translation_; }

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
  Frame from_;
  Frame to_;
};

/// compose(T_ab, T_bc) maps a -> c. Throws FrameMismatch unless T_ab.to() == T_bc.from().
RigidTransform compose(const RigidTransform& ab, const RigidTransform& bc);

/// R p + t tagged with T.to(); throws FrameMismatch if p is not in T.from().
FramedPoint transform_point(const FramedPoint& p, const RigidTransform& transform);

/// Rotation about a unit axis (right-handed), radians.
Eigen::Matrix3d axis_rotation(const Eigen::Vector3d& axis, double angle);

/// B and I are aligned and rigidly attached.
inline RigidTransform imu_from_body() { return RigidTransform::identity(Frame::B, Frame::I); }

struct Projection {
  Pixel pixel;
  Eigen::Vector2d normalized;
};

/// Pinhole camera, square pixels and zero skew. Camera frame: +X right,
/// +Y down, +Z along the optical axis.
class CameraModel {
 public:
  CameraModel(double focal_px, double cx, double cy, int width, int height);
  CameraModel(double focal_px, double cx, double cy, int width, int height,
              const RigidTransform& camera_from_body);

  /// Camera whose principal point sits at the image centre.
  static CameraModel centered(double focal_px, int width, int height);

  double focal() const { return focal_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  Pixel principal_point() const { return {cx_, cy_}; }
  int width() const { return width_; }
  int height() const { return height_; }
  const RigidTransform& camera_from_body() const { return extrinsic_; }

  Eigen::Vector2d normalize(const Pixel& pixel) const {
    return {(pixel.x() - cx_) / focal_, (pixel.y() - cy_) / focal_};
  }
  Pixel denormalize(const Eigen::Vector2d& n) const {
    return {focal_ * n.x() + cx_, focal_ * n.y() + cy_};
  }

  /// Camera-frame point at the given Z depth along the pixel ray.
  Eigen::Vector3d unproject(const Pixel& pixel, double depth) const;

  /// Same camera at a different resolution: focal and principal point scale with height.
  CameraModel resized(int width, int height) const;

 private:
  double focal_;
  double cx_;
  double cy_;
  int width_;
  int height_;
  RigidTransform extrinsic_;
};

/// Projects a C-frame point. Throws BehindCamera for Z <= 0.
Projection project(const Eigen::Vector3d& point_c, const CameraModel& cam);

/// World-from-camera pose of a camera at `position` with identity attitude.
RigidTransform camera_pose(const Eigen::Vector3d& position,
                           const Eigen::Matrix3d& rotation = Eigen::Matrix3d::Identity());

}  // namespace gapflyt
