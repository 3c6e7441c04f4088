#include "gapflyt/gaptrack.hpp"

#include <algorithm>
#include <cmath>

#include "gapflyt/error.hpp"
#include "gapflyt/morphology.hpp"

namespace gapflyt {

namespace {

Eigen::Matrix2Xd pixel_positions(const Mask& region) {
  Eigen::Matrix2Xd pts(2, region.count());
  Eigen::Index n = 0;
  for (Eigen::Index y = 0; y < region.rows(); ++y) {
    for (Eigen::Index x = 0; x < region.cols(); ++x) {
      if (region(y, x)) pts.col(n++) = Eigen::Vector2d(static_cast<double>(x), static_cast<double>(y));
    }
  }
  return pts;
}

// Nearest-pixel inverse map of q -> (q - offset) / scale over the reference mask.
Mask warp_similarity(const Mask& reference, double scale, const Eigen::Vector2d& offset) {
  const Eigen::Index h = reference.rows();
  const Eigen::Index w = reference.cols();
  Mask out = Mask::Constant(h, w, false);
  if (!(scale > 0.0) || !reference.any()) return out;

  Eigen::Index x_lo = w;
  Eigen::Index x_hi = -1;
  Eigen::Index y_lo = h;
  Eigen::Index y_hi = -1;
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      if (!reference(y, x)) continue;
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  const auto lo = [&](Eigen::Index v, double t, Eigen::Index n) {
    return std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(scale * (static_cast<double>(v) - 0.5) + t)), 0, n);
  };
  const auto hi = [&](Eigen::Index v, double t, Eigen::Index n) {
    return std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::ceil(scale * (static_cast<double>(v) + 0.5) + t)), -1,
                                    n - 1);
  };
  const Eigen::Index qx0 = lo(x_lo, offset.x(), w);
  const Eigen::Index qx1 = hi(x_hi, offset.x(), w);
  const Eigen::Index qy0 = lo(y_lo, offset.y(), h);
  const Eigen::Index qy1 = hi(y_hi, offset.y(), h);
  for (Eigen::Index qy = qy0; qy <= qy1; ++qy) {
    const auto py = static_cast<Eigen::Index>(std::lround((static_cast<double>(qy) - offset.y()) / scale));
    if (py < 0 || py >= h) continue;
    for (Eigen::Index qx = qx0; qx <= qx1; ++qx) {
      const auto px = static_cast<Eigen::Index>(std::lround((static_cast<double>(qx) - offset.x()) / scale));
      if (px >= 0 && px < w) out(qy, qx) = reference(py, px);
    }
  }
  return out;
}

void update_axis(Eigen::Vector2d& x, Eigen::Matrix2d& P, double z, double dt, const KalmanParams& p) {
  Eigen::Matrix2d F;
  F << 1.0, dt, 0.0, 1.0;
  Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
  Q(1, 1) = p.process_noise / (dt * dt);
  x = F * x;
  P = F * P * F.transpose() + Q;
  const double s = P(0, 0) + p.measurement_noise;
  if (s <= 0.0) {
    x(0) = z;
    return;
  }
  const Eigen::Vector2d k = P.col(0) / s;
  x += k * (z - x(0));
  P = (Eigen::Matrix2d::Identity() - k * Eigen::RowVector2d(1.0, 0.0)) * P;
}

}  // namespace

FoeEstimate estimate_foe(const CornerSet& before, const CornerSet& after) {
  const std::size_t n = std::min(before.points.size(), after.points.size());
  if (n < 2 || before.points.size() != after.points.size()) {
    throw Error(ErrorCode::DegenerateFoe, "need at least two corner correspondences");
  }
  Eigen::ArrayXd xi(static_cast<Eigen::Index>(n));
  Eigen::ArrayXd dx(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    xi(static_cast<Eigen::Index>(k)) = before.points[k].x();
    dx(static_cast<Eigen::Index>(k)) = after.points[k].x() - before.points[k].x();
  }
  // Normal equations of [x_i, -1] (alpha, beta)^T = x_j - x_i, solved about the mean.
  const double x_mean = xi.mean();
  const double d_mean = dx.mean();
  const Eigen::ArrayXd xc = xi - x_mean;
  const double sxx = xc.square().sum();
  const double det = static_cast<double>(n) * sxx;
  if (!(det > 1e-12)) throw Error(ErrorCode::DegenerateFoe, "corner x-coordinates are not distinct");

  FoeEstimate e;
  e.alpha = (xc * (dx - d_mean)).sum() / sxx;
  e.beta = e.alpha * x_mean - d_mean;
  if (!(std::abs(e.alpha) >= kAlphaMin)) throw Error(ErrorCode::NoDivergence, "no measurable divergence");

  double y0 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double yi = before.points[k].y();
    y0 += yi - (after.points[k].y() - yi) / e.alpha;
  }
  e.foe = Pixel(e.beta / e.alpha, y0 / static_cast<double>(n));
  return e;
}

namespace {

double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Keeps the pairs flagged in `keep` whose residual under `model` is within
// max(k * median, floor), the median taken over the flagged pairs.
void gate(const CornerSet& before, const CornerSet& after, const FoeEstimate& model, double k, double floor,
          std::vector<bool>& keep) {
  std::vector<double> residual(keep.size());
  std::vector<double> kept;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    residual[i] = (after.points[i] - propagate_point(before.points[i], model)).norm();
    if (keep[i]) kept.push_back(residual[i]);
  }
  if (kept.empty()) return;
  const double limit = std::max(k * median_of(std::move(kept)), floor);
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = keep[i] && residual[i] <= limit;
}

FoeEstimate fit_subset(const CornerSet& before, const CornerSet& after, const std::vector<bool>& keep) {
  CornerSet b{{}, before.owner};
  CornerSet a{{}, after.owner};
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (!keep[i]) continue;
    b.points.push_back(before.points[i]);
    a.points.push_back(after.points[i]);
  }
  return estimate_foe(b, a);
}

}  // namespace

FoeFit estimate_foe_trimmed(const CornerSet& before, const CornerSet& after, const FoeEstimate* prior,
                            const TrimParams& params) {
  if (before.points.size() != after.points.size()) {
    throw Error(ErrorCode::DegenerateFoe, "corner lists differ in length");
  }
  FoeFit fit;
  fit.inlier.assign(before.points.size(), true);
  if (prior) gate(before, after, *prior, params.k, params.prior_floor_px, fit.inlier);
  fit.estimate = fit_subset(before, after, fit.inlier);
  const auto count = std::count(fit.inlier.begin(), fit.inlier.end(), true);
  gate(before, after, fit.estimate, params.k, params.floor_px, fit.inlier);
  if (std::count(fit.inlier.begin(), fit.inlier.end(), true) < count) fit.estimate = fit_subset(before, after, fit.inlier);
  return fit;
}

Eigen::Vector2d mean_translation(const CornerSet& before, const CornerSet& after) {
  const std::size_t n = std::min(before.points.size(), after.points.size());
  if (n == 0) return Eigen::Vector2d::Zero();
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  for (std::size_t k = 0; k < n; ++k) sum += after.points[k] - before.points[k];
  return sum / static_cast<double>(n);
}

Mask propagate_labels(const Mask& set, const FoeEstimate& foe) {
  const double s = 1.0 + foe.alpha;
  if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must exceed -1");
  return warp_similarity(set, s, -foe.alpha * foe.foe);
}

TrackedSet::TrackedSet(Mask reference)
    : reference_(std::move(reference)), reference_area_(static_cast<double>(reference_.count())), empty_(!reference_.any()) {}

void TrackedSet::expand(const FoeEstimate& foe) {
  const double s = 1.0 + foe.alpha;
  scale_ *= s;
  offset_ = s * offset_ - foe.alpha * foe.foe;
  last_ = foe;
  has_last_ = true;
}

void TrackedSet::translate(const Eigen::Vector2d& d) { offset_ += d; }

void TrackedSet::clear() {
  reference_ = Mask::Constant(reference_.rows(), reference_.cols(), false);
  reference_area_ = 0.0;
  empty_ = true;
}

Mask TrackedSet::raster() const {
  if (empty_) return Mask::Constant(reference_.rows(), reference_.cols(), false);
  return warp_similarity(reference_, scale_, offset_);
}

Pixel safest_point(const Mask& region) {
  if (!region.any()) throw Error(ErrorCode::EmptyRegion, "safest point of an empty region");
  return geometric_median<double>(pixel_positions(region));
}

Pixel region_centroid(const Mask& region) {
  if (!region.any()) throw Error(ErrorCode::EmptyRegion, "centroid of an empty region");
  return pixel_positions(region).rowwise().mean();
}

Mask safe_region(const Mask& opening, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCode::InvalidArgument, "ellipse semi-axes must be positive");
  return erode_ellipse(opening, a, b);
}

Pixel kalman_update(Kalman2D& kalman, const Pixel& measured, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const KalmanParams& p = kalman.params;
  if (!kalman.initialized) {
    kalman.position = measured;
    kalman.velocity.setZero();
    for (auto& c : kalman.cov) {
      c.setZero();
      c(0, 0) = p.measurement_noise;
      c(1, 1) = p.initial_velocity_var / (dt * dt);
    }
    kalman.initialized = true;
    return kalman.position;
  }
  for (int axis = 0; axis < 2; ++axis) {
    Eigen::Vector2d x(kalman.position(axis), kalman.velocity(axis));
    update_axis(x, kalman.cov[axis], measured(axis), dt, p);
    kalman.position(axis) = x(0);
    kalman.velocity(axis) = x(1);
  }
  return kalman.position;
}

SafePoint select_safe_point(const TrackState& state) {
  const Eigen::Index nf = state.fg.size() ? state.fg.count() : 0;
  const Eigen::Index nb = state.bg.size() ? state.bg.count() : 0;
  if (nf == 0 && nb == 0) throw Error(ErrorCode::TrackingLost, "both label sets are empty");
  if (nf >= nb) return {state.fg_set.map(state.fg_anchor), Owner::foreground};
  return {state.bg_set.map(state.bg_anchor), Owner::background};
}

ResetFlags maybe_reset(TrackState& state, const Image& img, const TrackingParams& params) {
  ResetFlags flags;
  const auto reset = [&](TrackedSet& set, Mask& raster, CornerSet& corners, int k, Owner owner) {
    if (set.empty()) return false;
    if (static_cast<double>(raster.count()) < params.min_visible_fraction * set.propagated_area()) {
      corners.points.clear();
      set.clear();
      raster = Mask::Constant(img.rows(), img.cols(), false);
      return true;
    }
    if (corners.size() > k) return false;
    try {
      corners = detect_corners(img, raster, params.max_corners, owner, params.corners);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyCorners && e.code() != ErrorCode::EmptyRegion) throw;
      corners.points.clear();
      set.clear();
      raster = Mask::Constant(img.rows(), img.cols(), false);
    }
    return true;
  };
  flags.foreground = reset(state.fg_set, state.fg, state.fg_corners, params.k_foreground, Owner::foreground);
  flags.background = reset(state.bg_set, state.bg, state.bg_corners, params.k_background, Owner::background);
  return flags;
}

TrackState init_tracking(const Mask& foreground, const Mask& background, const Image& img,
                         const TrackingParams& params) {
  TrackState s;
  s.fg_set = TrackedSet(foreground);
  s.bg_set = TrackedSet(background);
  s.fg = s.fg_set.raster();
  s.bg = s.bg_set.raster();
  if (foreground.any()) s.fg_anchor = region_centroid(foreground);
  if (background.any()) s.bg_anchor = safest_point(background);
  s.kalman.params = params.kalman;
  maybe_reset(s, img, params);
  const SafePoint p = select_safe_point(s);
  s.raw_safest = p.point;
  s.safest = p.point;
  s.source = p.source;
  return s;
}

TrackStepLog track_step(TrackState& state, const ImagePyramid& prev, const ImagePyramid& next, const Image& next_img,
                        double dt, const TrackingParams& params) {
  const auto advance = [&](TrackedSet& set, CornerSet& corners) {
    if (set.empty() || corners.empty()) return;
    const TrackedCorners tracked = track_features(corners, prev, next, params.klt);
    auto [before, after] = survivors(corners, tracked);
    try {
      const FoeFit fit = estimate_foe_trimmed(before, after, set.last_motion());
      set.expand(fit.estimate);
      CornerSet kept{{}, after.owner};
      for (std::size_t i = 0; i < fit.inlier.size(); ++i) {
        if (fit.inlier[i]) kept.points.push_back(after.points[i]);
      }
      after = std::move(kept);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoDivergence && e.code() != ErrorCode::DegenerateFoe) throw;
      set.translate(mean_translation(before, after));
    }
    corners = std::move(after);
  };
  advance(state.fg_set, state.fg_corners);
  advance(state.bg_set, state.bg_corners);
  state.fg = state.fg_set.raster();
  state.bg = state.bg_set.raster();

  TrackStepLog log;
  log.reset = maybe_reset(state, next_img, params);
  const SafePoint p = select_safe_point(state);
  log.switched = p.source != state.source;
  state.source = p.source;
  state.raw_safest = p.point;
  const Pixel smoothed = kalman_update(state.kalman, p.point, dt);
  state.safest = Pixel(std::clamp(smoothed.x(), 0.0, static_cast<double>(next_img.cols() - 1)),
                       std::clamp(smoothed.y(), 0.0, static_cast<double>(next_img.rows() - 1)));

  log.fg_count = static_cast<int>(state.fg.count());
  log.bg_count = static_cast<int>(state.bg.count());
  log.fg_corners = state.fg_corners.size();
  log.bg_corners = state.bg_corners.size();
  log.raw = state.raw_safest;
  log.smoothed = state.safest;
  return log;
}

}  // namespace gapflyt
