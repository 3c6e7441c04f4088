#pragma once

#include <Eigen/Core>
#include <vector>

#include "gapflyt/frames.hpp"
#include "gapflyt/world.hpp"

namespace gapflyt {

struct QuadState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  ///< W, metres
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  ///< W, m/s
  Eigen::Vector3d commanded_body_velocity = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  // PID memory per image axis
  Eigen::Vector2d integral = Eigen::Vector2d::Zero();
  Eigen::Vector2d last_error = Eigen::Vector2d::Zero();
  bool has_last_error = false;
};

struct ServoGains {
  Eigen::Vector2d kp = Eigen::Vector2d::Constant(0.03);  ///< m/s per px
  Eigen::Vector2d ki = Eigen::Vector2d::Zero();         ///< m/s per px s
  Eigen::Vector2d kd = Eigen::Vector2d::Zero();         ///< m/s per px/s
  double forward_speed = 1.0;
  double integrator_clamp = 50.0;  ///< px s
  double velocity_lag = 0.15;      ///< s
  double v_max = 5.0;
};

/// Rotation taking body (= camera) axes to world axes for a heading `yaw`
/// about the vertical (world Y) axis.
Eigen::Matrix3d world_from_body_rotation(double yaw);

/// Camera pose of the vehicle; camera and body axes coincide.
RigidTransform camera_pose(const QuadState& state);

/// n_frames + 1 camera poses with identity attitude, equally spaced over
/// `extent` metres along a line in the X-Z plane at `angle` from +X.
std::vector<RigidTransform> scan_trajectory(const Eigen::Vector3d& start, double extent, int n_frames,
                                            double angle = 0.7853981633974483);

/// PID on e = x_s - principal point: lateral command from e_x, vertical from
/// e_y, constant forward speed, first-order velocity response then Euler
/// position integration.
QuadState servo_step(const QuadState& state, const Pixel& x_s, const CameraModel& cam, const ServoGains& gains,
                     double dt);

struct TraversalResult {
  bool success = false;
  double clearance = 0.0;  ///< metres, positive inside the eroded gap
  Eigen::Vector2d crossing = Eigen::Vector2d::Zero();
};

/// Judges where the trajectory pierces the foreground plane. Throws
/// NotAttempted when it never reaches the plane.
TraversalResult traversal_check(const std::vector<QuadState>& trajectory, const Scene& scene, double quad_radius);

inline constexpr double kCalibratedFocal = 298.7;

/// Speed keeping the fg/bg parallax within `blur_px` over one tracker runtime.
double theoretical_max_speed(double runtime_s, double z_f, double z_b, double focal_px = kCalibratedFocal,
                             double blur_px = 1.0);

}  // namespace gapflyt
