#include "gapflyt/frames.hpp"

#include <cmath>
#include <string>

#include "gapflyt/error.hpp"

namespace gapflyt {

namespace {

constexpr double kOrthoTol = 1e-9;

void check_rotation(const Eigen::Matrix3d& r) {
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(ortho < kOrthoTol) || std::abs(r.determinant() - 1.0) > kOrthoTol) {
    throw Error(ErrorCode::InvalidArgument, "rotation is not a proper orthonormal matrix");
  }
}

}  // namespace

std::string_view to_string(Frame f) {
  switch (f) {
    case Frame::W: return "W";
    case Frame::B: return "B";
    case Frame::C: return "C";
    case Frame::I: return "I";
  }
  return "?";
}

RigidTransform::RigidTransform(Frame from, Frame to)
    : rotation_(Eigen::Matrix3d::Identity()),
      translation_(Eigen::Vector3d::Zero()),
      from_(from),
      to_(to) {}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation,
                               Frame from, Frame to)
    : rotation_(rotation), translation_(translation), from_(from), to_(to) {
  check_rotation(rotation_);
  if (!translation_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "non-finite translation");
  }
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv(to_, from_);
  inv.rotation_ = rotation_.transpose();
  inv.translation_ = -(inv.rotation_ * translation_);
  return inv;
}

RigidTransform compose(const RigidTransform& ab, const RigidTransform& bc) {
  if (ab.to() != bc.from()) {
    throw Error(ErrorCode::FrameMismatch, "cannot compose " + std::string(to_string(ab.from())) +
                                              "->" + std::string(to_string(ab.to())) + " with " +
                                              std::string(to_string(bc.from())) + "->" +
                                              std::string(to_string(bc.to())));
  }
  return RigidTransform(bc.rotation() * ab.rotation(),
                        bc.rotation() * ab.translation() + bc.translation(), ab.from(), bc.to());
}

FramedPoint transform_point(const FramedPoint& p, const RigidTransform& transform) {
  if (p.frame != transform.from()) {
    throw Error(ErrorCode::FrameMismatch, "point in frame " + std::string(to_string(p.frame)) +
                                              ", transform expects " +
                                              std::string(to_string(transform.from())));
  }
  return {transform * p.p, transform.to()};
}

Eigen::Matrix3d axis_rotation(const Eigen::Vector3d& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

CameraModel::CameraModel(double focal_px, double cx, double cy, int width, int height)
    : CameraModel(focal_px, cx, cy, width, height, RigidTransform::identity(Frame::B, Frame::C)) {}

CameraModel::CameraModel(double focal_px, double cx, double cy, int width, int height,
                         const RigidTransform& camera_from_body)
    : focal_(focal_px), cx_(cx), cy_(cy), width_(width), height_(height), extrinsic_(camera_from_body) {
  if (!(focal_px > 0.0) || width <= 0 || height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "camera needs positive focal length and size");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw Error(ErrorCode::InvalidArgument, "principal point outside the image");
  }
  if (camera_from_body.from() != Frame::B || camera_from_body.to() != Frame::C) {
    throw Error(ErrorCode::FrameMismatch, "camera extrinsic must map B -> C");
  }
}

CameraModel CameraModel::centered(double focal_px, int width, int height) {
  return CameraModel(focal_px, width / 2.0, height / 2.0, width, height);
}

Eigen::Vector3d CameraModel::unproject(const Pixel& pixel, double depth) const {
  const Eigen::Vector2d n = normalize(pixel);
  return {n.x() * depth, n.y() * depth, depth};
}

CameraModel CameraModel::resized(int width, int height) const {
  const double s = static_cast<double>(height) / height_;
  return CameraModel(focal_ * s, cx_ * static_cast<double>(width) / width_, cy_ * s, width, height,
                     extrinsic_);
}

Projection project(const Eigen::Vector3d& point_c, const CameraModel& cam) {
  if (!(point_c.z() > 0.0)) {
    throw Error(ErrorCode::BehindCamera, "point has non-positive depth");
  }
  const Eigen::Vector2d n = point_c.head<2>() / point_c.z();
  return {cam.denormalize(n), n};
}

RigidTransform camera_pose(const Eigen::Vector3d& position, const Eigen::Matrix3d& rotation) {
  return RigidTransform(rotation, position, Frame::C, Frame::W);
}

}  // namespace gapflyt
