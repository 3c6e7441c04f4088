#include "gapflyt/flythrough.hpp"

#include <algorithm>
#include <cmath>

#include "gapflyt/error.hpp"
#include "gapflyt/polygon.hpp"

namespace gapflyt {

Eigen::Matrix3d world_from_body_rotation(double yaw) { return axis_rotation(Eigen::Vector3d::UnitY(), yaw); }

RigidTransform camera_pose(const QuadState& state) {
  return gapflyt::camera_pose(state.position, world_from_body_rotation(state.yaw));
}

std::vector<RigidTransform> scan_trajectory(const Eigen::Vector3d& start, double extent, int n_frames, double angle) {
  if (n_frames < 1) throw Error(ErrorCode::InvalidArgument, "scan needs at least one baseline");
  if (!(extent > 0.0)) throw Error(ErrorCode::InvalidArgument, "scan extent must be positive");
  const Eigen::Vector3d dir(std::cos(angle), 0.0, std::sin(angle));
  const double step = extent / n_frames;
  std::vector<RigidTransform> poses;
  poses.reserve(static_cast<std::size_t>(n_frames) + 1);
  for (int k = 0; k <= n_frames; ++k) poses.push_back(gapflyt::camera_pose(start + (k * step) * dir));
  return poses;
}

QuadState servo_step(const QuadState& state, const Pixel& x_s, const CameraModel& cam, const ServoGains& gains,
                     double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  QuadState next = state;
  const Eigen::Vector2d e = x_s - cam.principal_point();
  next.integral = (state.integral + e * dt).cwiseMax(-gains.integrator_clamp).cwiseMin(gains.integrator_clamp);
  const Eigen::Vector2d de = state.has_last_error ? Eigen::Vector2d((e - state.last_error) / dt) : Eigen::Vector2d::Zero();
  next.last_error = e;
  next.has_last_error = true;

  const Eigen::Vector2d u = gains.kp.cwiseProduct(e) + gains.ki.cwiseProduct(next.integral) + gains.kd.cwiseProduct(de);
  next.commanded_body_velocity = Eigen::Vector3d(u.x(), u.y(), gains.forward_speed);

  const Eigen::Vector3d target = world_from_body_rotation(state.yaw) * next.commanded_body_velocity;
  const double blend = gains.velocity_lag > 0.0 ? 1.0 - std::exp(-dt / gains.velocity_lag) : 1.0;
  next.velocity = state.velocity + blend * (target - state.velocity);
  const double speed = next.velocity.norm();
  if (speed > gains.v_max) next.velocity *= gains.v_max / speed;
  next.position = state.position + dt * next.velocity;
  return next;
}

TraversalResult traversal_check(const std::vector<QuadState>& trajectory, const Scene& scene, double quad_radius) {
  const double zf = scene.z_foreground();
  for (std::size_t k = 0; k + 1 < trajectory.size(); ++k) {
    const Eigen::Vector3d& a = trajectory[k].position;
    const Eigen::Vector3d& b = trajectory[k + 1].position;
    if (!(a.z() < zf && b.z() >= zf)) continue;
    const double t = (zf - a.z()) / (b.z() - a.z());
    const Eigen::Vector3d p = a + t * (b - a);
    TraversalResult r;
    r.crossing = p.head<2>();
    r.clearance = signed_distance(scene.gap_polygon(), r.crossing) - quad_radius;
    r.success = r.clearance > 0.0;
    return r;
  }
  throw Error(ErrorCode::NotAttempted, "trajectory never reaches the foreground plane");
}

double theoretical_max_speed(double runtime_s, double z_f, double z_b, double focal_px, double blur_px) {
  if (!(runtime_s > 0.0 && z_f > 0.0 && z_b > 0.0 && focal_px > 0.0 && blur_px > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "max-speed inputs must be positive");
  }
  if (!(z_f < z_b)) throw Error(ErrorCode::InvalidArgument, "foreground must be nearer than background");
  return blur_px / (focal_px * runtime_s * (1.0 / z_f - 1.0 / z_b));
}

}  // namespace gapflyt
