#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gapflyt/flow.hpp"
#include "gapflyt/grid.hpp"

namespace gapflyt {

/// Mean flow magnitude over N frames against one reference frame.
struct StackedFlow {
  int ref_index = 0;
  int count = 0;
  Grid<double> mean_magnitude;
  Mask valid;
};

/// Gradient magnitude of the inverse stacked magnitude, with its direction
/// components kept for edge thinning.
struct XiField {
  Grid<double> values;
  Grid<double> gx;
  Grid<double> gy;
  Mask valid;
  double threshold = 0.2;  ///< relative to max(values)
};

/// Disc radii (pixels) for the foreground band and background core.
struct LabelRadii {
  double eps1 = 12.0;
  double eps2 = 4.0;
  double eps3 = 6.0;

  /// Defaults are tuned for 384-row images and scale linearly with height.
  static LabelRadii for_height(int rows);
};

/// Opening O, contour C and label sets F, B, U on the reference frame.
struct GapDetection {
  Mask opening;
  Mask contour;
  Mask foreground_band;
  Mask background_core;
  Mask uncertainty;
};

struct LabelSets {
  Mask foreground;
  Mask background;
};

struct DetectionMetrics {
  double lambda_d = 0.0;  ///< |G & O| / |G|
  double lambda_n = 0.0;  ///< |G & !O| / |G|
  std::optional<double> lambda_p;  ///< |!G & O| / |G|, successful detections only
  bool success = false;
};

inline constexpr double kDivisionGuard = 1e-3;
inline constexpr double kOverlapForSuccess = 0.75;

/// Throws EmptyStack for no fields and DimensionMismatch for unequal sizes.
StackedFlow stack_flows(std::span<const FlowField> flows, int ref_index = 0);

/// Builds flow(ref -> j) for every j in `others` through `flow_source`.
StackedFlow stack_flows(int ref, std::span<const int> others,
                        const std::function<FlowField(int ref, int other)>& flow_source);

/// Sobel gradient magnitude of 1 / mean magnitude, optionally after a
/// Gaussian blur of `smoothing` px. Pixels whose support touches an invalid
/// flow sample are invalid.
XiField xi_field(const StackedFlow& stacked, double threshold = 0.2, double division_guard = kDivisionGuard,
                 double smoothing = 0.0);

/// Hysteresis edges of Xi closed with a disc. Throws NoGapFound when Xi is flat.
Mask edge_map(const XiField& xi, double morph_radius);

/// Hysteresis edges (threshold and threshold/2 of max), closing with a disc of
/// `morph_radius`. O is the largest enclosed region grown to the middle of
/// its edge band, holes filled. Throws NoGapFound if no closed region exists
/// and GapTooSmall if B is empty.
GapDetection detect_gap(const XiField& xi, double morph_radius, const LabelRadii& radii = {});

/// F = (O + disc(eps1)) \ (O + disc(eps2)); B = O - disc(eps3).
LabelSets label_sets(const Mask& opening, double eps1, double eps2, double eps3);

DetectionMetrics detection_metrics(const Mask& opening, const Mask& ground_truth);

}  // namespace gapflyt
