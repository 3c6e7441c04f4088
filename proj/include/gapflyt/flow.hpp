#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "gapflyt/error.hpp"
#include "gapflyt/frames.hpp"
#include "gapflyt/grid.hpp"
#include "gapflyt/world.hpp"

namespace gapflyt {

/// Dense displacement field in pixels from a reference frame to another frame.
struct FlowField {
  Grid<double> u;
  Grid<double> v;
  Mask valid;

  FlowField(Eigen::Index rows, Eigen::Index cols)
      : u(Grid<double>::Zero(rows, cols)), v(Grid<double>::Zero(rows, cols)), valid(Mask::Constant(rows, cols, true)) {}

  Eigen::Index rows() const { return u.rows(); }
  Eigen::Index cols() const { return u.cols(); }

  /// Endpoint magnitude per pixel (invalid pixels included; mask separately).
  Grid<double> magnitude() const { return (u.square() + v.square()).sqrt(); }
};

/// Camera translation and rotation between two frames, expressed in the first
/// camera's frame (displacement per frame pair, not per second).
struct MotionSample {
  Eigen::Vector3d V = Eigen::Vector3d::Zero();
  Eigen::Vector3d Omega = Eigen::Vector3d::Zero();
};

/// Translational image motion of a point at normalized coordinates `x` and
/// depth `depth`, in normalized units.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> translational_flow(const Eigen::Matrix<Scalar, 2, 1>& x, Scalar depth,
                                                const Eigen::Matrix<Scalar, 3, 1>& V) {
  if (!(depth > Scalar(0))) throw Error(ErrorCode::InvalidDepth, "depth must be positive");
  return Eigen::Matrix<Scalar, 2, 1>(x.x() * V.z() - V.x(), x.y() * V.z() - V.y()) / depth;
}

/// Rotational image motion; depends only on the image position.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> rotational_flow(const Eigen::Matrix<Scalar, 2, 1>& x,
                                             const Eigen::Matrix<Scalar, 3, 1>& Omega) {
  Eigen::Matrix<Scalar, 2, 3> m;
  m << x.x() * x.y(), -(Scalar(1) + x.x() * x.x()), x.y(),
       Scalar(1) + x.y() * x.y(), -x.x() * x.y(), -x.x();
  return m * Omega;
}

/// Motion of camera j relative to camera i, in camera-i coordinates.
MotionSample motion_between(const RigidTransform& world_from_cam_i, const RigidTransform& world_from_cam_j);

/// Model flow (pixels) from frame i to frame j: f * (translational + rotational)
/// evaluated at each reference pixel with its true depth, plus seeded
/// N(0, sigma^2) noise per component. Pixels that hit no surface are invalid.
FlowField analytic_flow(const RigidTransform& pose_i, const RigidTransform& pose_j, const CameraModel& cam,
                        const Scene& scene, double sigma, std::uint64_t noise_seed = 0);

struct FlowEstimatorParams {
  int levels = 5;
  int window = 11;
  int iterations = 3;
  int median_radius = 2;  ///< median filter on (u, v) after every iteration; 0 disables
  /// Minimum eigenvalue of the window-averaged structure tensor for a valid estimate.
  double min_eigenvalue = 1e-5;
};

/// Dense coarse-to-fine Lucas-Kanade flow from img_i to img_j.
FlowField estimate_flow(const Image& img_i, const Image& img_j, const FlowEstimatorParams& params = {});

}  // namespace gapflyt
