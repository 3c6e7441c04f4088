#pragma once

#include <vector>

#include <Eigen/Core>

#include "gapflyt/features.hpp"
#include "gapflyt/grid.hpp"
#include "gapflyt/image_ops.hpp"

namespace gapflyt {

inline constexpr double kAlphaMin = 1e-4;

/// Expansion about the focus of expansion: p_j = p_i + alpha (p_i - foe).
struct FoeEstimate {
  double alpha = 0.0;
  double beta = 0.0;
  Pixel foe = Pixel::Zero();
};

/// Least-squares divergence and FOE from corner correspondences. Throws
/// DegenerateFoe (fewer than two pairs or rank-deficient system) and
/// NoDivergence when |alpha| < kAlphaMin.
FoeEstimate estimate_foe(const CornerSet& before, const CornerSet& after);

struct FoeFit {
  FoeEstimate estimate;
  std::vector<bool> inlier;  ///< per correspondence
};

struct TrimParams {
  double k = 3.0;              ///< residual limit in medians
  double floor_px = 0.1;       ///< lower bound on the limit after the fit
  double prior_floor_px = 1.0; ///< lower bound on the limit against the prior
};

/// estimate_foe restricted to correspondences consistent with the model:
/// pairs far from `prior` (last frame's estimate, when given) are gated out
/// first, then pairs whose residual exceeds max(k * median, floor_px) under
/// the fit are dropped and the fit repeated. Same errors as estimate_foe.
FoeFit estimate_foe_trimmed(const CornerSet& before, const CornerSet& after, const FoeEstimate* prior = nullptr,
                            const TrimParams& params = {});

/// Mean displacement of the correspondences; the fallback when there is no divergence.
Eigen::Vector2d mean_translation(const CornerSet& before, const CornerSet& after);

inline Pixel propagate_point(const Pixel& p, const FoeEstimate& foe) { return p + foe.alpha * (p - foe.foe); }

/// Moves every set pixel by p -> p + alpha (p - foe), dropping pixels that leave the grid.
Mask propagate_labels(const Mask& set, const FoeEstimate& foe);

/// A label set carried as its reference mask plus the accumulated similarity
/// p -> scale * p + offset, rasterised on demand so rounding never compounds.
class TrackedSet {
 public:
  TrackedSet() = default;
  explicit TrackedSet(Mask reference);

  void expand(const FoeEstimate& foe);
  void translate(const Eigen::Vector2d& d);
  void clear();

  Mask raster() const;
  /// Area of the propagated set before clipping to the grid.
  double propagated_area() const { return reference_area_ * scale_ * scale_; }
  /// Last expansion applied since construction, or null.
  const FoeEstimate* last_motion() const { return has_last_ ? &last_ : nullptr; }
  /// Where a reference-frame point lands under the accumulated similarity.
  Pixel map(const Pixel& reference_point) const { return scale_ * reference_point + offset_; }
  bool empty() const { return empty_; }
  double scale() const { return scale_; }
  const Eigen::Vector2d& offset() const { return offset_; }

 private:
  Mask reference_;
  double scale_ = 1.0;
  Eigen::Vector2d offset_ = Eigen::Vector2d::Zero();
  FoeEstimate last_;
  bool has_last_ = false;
  double reference_area_ = 0.0;
  bool empty_ = true;
};

/// Weiszfeld geometric median of the columns of `points`.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> geometric_median(const Eigen::Matrix<Scalar, 2, Eigen::Dynamic>& points,
                                             Scalar tolerance = Scalar(1e-3), int max_iterations = 100) {
  using Vec = Eigen::Matrix<Scalar, 2, 1>;
  const Scalar eps = Scalar(1e-9);
  Vec x = points.rowwise().mean();
  for (int iter = 0; iter < max_iterations; ++iter) {
    const Eigen::Array<Scalar, 1, Eigen::Dynamic> inv =
        1 / (points.colwise() - x).colwise().norm().array().max(eps);
    const Vec next = (points.array().rowwise() * inv).rowwise().sum().matrix() / inv.sum();
    const Scalar step = (next - x).norm();
    x = next;
    if (step <= tolerance) break;
  }
  return x;
}

/// Geometric median of the set's pixel positions. Throws EmptyRegion.
Pixel safest_point(const Mask& region);

/// Centroid of the set's pixel positions. Throws EmptyRegion.
Pixel region_centroid(const Mask& region);

/// Erosion of O by the axis-aligned ellipse with semi-axes a (x) and b (y) pixels.
Mask safe_region(const Mask& opening, double a, double b);

struct KalmanParams {
  double process_noise = 0.16;     ///< velocity variance per frame, px^2/frame^2
  double measurement_noise = 4.0;  ///< px^2
  double initial_velocity_var = 100.0;  ///< px^2/frame^2
};

/// Two independent constant-velocity filters (image x and y).
struct Kalman2D {
  KalmanParams params;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();  ///< px/s
  Eigen::Matrix2d cov[2] = {Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
  bool initialized = false;
};

/// Predict over dt seconds and fuse one measurement; returns the posterior position.
Pixel kalman_update(Kalman2D& kalman, const Pixel& measured, double dt);

struct TrackingParams {
  int k_foreground = 40;
  int k_background = 20;
  int max_corners = 100;
  double min_visible_fraction = 0.5;  ///< a set mostly pushed out of view is retired
  CornerParams corners;
  KltParams klt;
  KalmanParams kalman;
};

struct TrackState {
  TrackedSet fg_set;
  TrackedSet bg_set;
  Mask fg;  ///< current raster of fg_set
  Mask bg;
  CornerSet fg_corners{{}, Owner::foreground};
  CornerSet bg_corners{{}, Owner::background};
  Pixel fg_anchor = Pixel::Zero();  ///< x_{s,F} of the reference F
  Pixel bg_anchor = Pixel::Zero();  ///< x_{s,B} of the reference B
  Pixel raw_safest = Pixel::Zero();
  Pixel safest = Pixel::Zero();
  Owner source = Owner::background;
  Kalman2D kalman;
};

struct SafePoint {
  Pixel point;
  Owner source;
};

/// x_{s,F} (band centroid) when |F| >= |B|, else x_{s,B} (geometric median).
/// Both are taken on the reference sets and carried by the set's similarity,
/// so clipping at the image border does not drag them. Throws TrackingLost
/// when both sets are empty.
SafePoint select_safe_point(const TrackState& state);

struct ResetFlags {
  bool foreground = false;
  bool background = false;
};

/// Re-detects corners in a set whose corner count has fallen to its threshold;
/// a set with no detectable corners, or with less than min_visible_fraction of
/// its propagated area inside the image, is emptied.
ResetFlags maybe_reset(TrackState& state, const Image& img, const TrackingParams& params);

/// Builds the tracker on the reference frame from F and B.
TrackState init_tracking(const Mask& foreground, const Mask& background, const Image& img,
                         const TrackingParams& params);

struct TrackStepLog {
  int fg_count = 0;
  int bg_count = 0;
  int fg_corners = 0;
  int bg_corners = 0;
  Pixel raw = Pixel::Zero();
  Pixel smoothed = Pixel::Zero();
  bool switched = false;
  ResetFlags reset;
};

/// One frame of tracking: KLT on both corner sets, FOE propagation of F and
/// B, reset, switching and smoothing. Throws TrackingLost.
TrackStepLog track_step(TrackState& state, const ImagePyramid& prev, const ImagePyramid& next, const Image& next_img,
                        double dt, const TrackingParams& params);

}  // namespace gapflyt
