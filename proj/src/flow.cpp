#include "gapflyt/flow.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "gapflyt/image_ops.hpp"
#include "gapflyt/rng.hpp"

namespace gapflyt {

MotionSample motion_between(const RigidTransform& world_from_cam_i, const RigidTransform& world_from_cam_j) {
  if (world_from_cam_i.from() != Frame::C || world_from_cam_j.from() != Frame::C ||
      world_from_cam_i.to() != Frame::W || world_from_cam_j.to() != Frame::W) {
    throw Error(ErrorCode::FrameMismatch, "motion_between expects two C -> W poses");
  }
  const Eigen::Matrix3d ri_t = world_from_cam_i.rotation().transpose();
  MotionSample m;
  m.V = ri_t * (world_from_cam_j.translation() - world_from_cam_i.translation());
  const Eigen::AngleAxisd aa(ri_t * world_from_cam_j.rotation());
  m.Omega = aa.angle() * aa.axis();
  return m;
}

FlowField analytic_flow(const RigidTransform& pose_i, const RigidTransform& pose_j, const CameraModel& cam,
                        const Scene& scene, double sigma, std::uint64_t noise_seed) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise sigma must be non-negative");
  const MotionSample motion = motion_between(pose_i, pose_j);
  const Grid<double> depth = depth_map(pose_i, cam, scene);
  const double f = cam.focal();

  FlowField flow(cam.height(), cam.width());
  for (int row = 0; row < cam.height(); ++row) {
    for (int col = 0; col < cam.width(); ++col) {
      const double z = depth(row, col);
      if (!(z > 0.0)) {
        flow.valid(row, col) = false;
        continue;
      }
      const Eigen::Vector2d x = cam.normalize(Pixel(col, row));
      Eigen::Vector2d p = f * (translational_flow(x, z, motion.V) + rotational_flow(x, motion.Omega));
      if (sigma > 0.0) {
        const auto [n1, n2] = gaussian_pair(hash_key(noise_seed, row, col));
        p += sigma * Eigen::Vector2d(n1, n2);
      }
      flow.u(row, col) = p.x();
      flow.v(row, col) = p.y();
    }
  }
  return flow;
}

FlowField estimate_flow(const Image& img_i, const Image& img_j, const FlowEstimatorParams& params) {
  if (img_i.rows() != img_j.rows() || img_i.cols() != img_j.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "flow images differ in size");
  }
  const int levels = pyramid_levels(img_i.rows(), img_i.cols(), params.levels);
  const int radius = params.window / 2;
  const ImagePyramid pi(img_i, levels);
  const ImagePyramid pj(img_j, levels);

  Grid<double> u;
  Grid<double> v;
  Grid<double> min_eig;
  for (int l = levels - 1; l >= 0; --l) {
    const auto li = static_cast<std::size_t>(l);
    const Grid<double>& i1 = pi.levels[li];
    const Grid<double>& i2 = pj.levels[li];
    const Grid<double>& gx = pi.gx[li];
    const Grid<double>& gy = pi.gy[li];
    const Eigen::Index h = i1.rows();
    const Eigen::Index w = i1.cols();

    if (l == levels - 1) {
      u = Grid<double>::Zero(h, w);
      v = Grid<double>::Zero(h, w);
    } else {
      u = 2.0 * resample(u, h, w, 2.0);
      v = 2.0 * resample(v, h, w, 2.0);
    }

    const Grid<double> sxx = box_mean(gx * gx, radius);
    const Grid<double> sxy = box_mean(gx * gy, radius);
    const Grid<double> syy = box_mean(gy * gy, radius);
    const Grid<double> det = sxx * syy - sxy * sxy;

    Grid<double> it(h, w);
    for (int iter = 0; iter < params.iterations; ++iter) {
      for (Eigen::Index y = 0; y < h; ++y) {
        for (Eigen::Index x = 0; x < w; ++x) {
          it(y, x) = bilinear(i2, static_cast<double>(x) + u(y, x), static_cast<double>(y) + v(y, x)) - i1(y, x);
        }
      }
      const Grid<double> bx = box_mean(gx * it, radius);
      const Grid<double> by = box_mean(gy * it, radius);
      for (Eigen::Index k = 0; k < h * w; ++k) {
        const double d = det(k);
        if (d <= 1e-18) continue;
        u(k) -= (syy(k) * bx(k) - sxy(k) * by(k)) / d;
        v(k) -= (sxx(k) * by(k) - sxy(k) * bx(k)) / d;
      }
    }
    if (params.median_radius > 0) {
      u = median_filter(u, params.median_radius);
      v = median_filter(v, params.median_radius);
    }
    if (l == 0) {
      const Grid<double> half_trace = 0.5 * (sxx + syy);
      min_eig = half_trace - (half_trace.square() - det).max(0.0).sqrt();
    }
  }

  FlowField flow(img_i.rows(), img_i.cols());
  flow.u = u;
  flow.v = v;
  flow.valid = min_eig > params.min_eigenvalue && u.isFinite() && v.isFinite();
  // Displacements that land outside the second image have no correspondence.
  for (Eigen::Index y = 0; y < flow.rows(); ++y) {
    for (Eigen::Index x = 0; x < flow.cols(); ++x) {
      const double tx = static_cast<double>(x) + u(y, x);
      const double ty = static_cast<double>(y) + v(y, x);
      if (tx < 0.0 || ty < 0.0 || tx > static_cast<double>(flow.cols() - 1) || ty > static_cast<double>(flow.rows() - 1)) {
        flow.valid(y, x) = false;
      }
    }
  }
  flow.u = flow.valid.select(flow.u, 0.0);
  flow.v = flow.valid.select(flow.v, 0.0);
  return flow;
}

}  // namespace gapflyt
