#include "gapflyt/ts2p.hpp"

#include <cmath>
#include <utility>

#include "gapflyt/error.hpp"
#include "gapflyt/image_ops.hpp"
#include "gapflyt/morphology.hpp"

namespace gapflyt {

namespace {

int largest_enclosed(const Components& c) {
  int best = -1;
  for (std::size_t i = 0; i < c.sizes.size(); ++i) {
    if (c.touches_border[i]) continue;
    if (best < 0 || c.sizes[i] > c.sizes[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace

LabelRadii LabelRadii::for_height(int rows) {
  const double s = rows / 384.0;
  return {12.0 * s, 4.0 * s, 6.0 * s};
}

StackedFlow stack_flows(std::span<const FlowField> flows, int ref_index) {
  if (flows.empty()) throw Error(ErrorCode::EmptyStack, "no flow fields to stack");
  const Eigen::Index h = flows.front().rows();
  const Eigen::Index w = flows.front().cols();
  StackedFlow s;
  s.ref_index = ref_index;
  s.count = static_cast<int>(flows.size());
  s.mean_magnitude = Grid<double>::Zero(h, w);
  s.valid = Mask::Constant(h, w, true);
  for (const auto& f : flows) {
    if (f.rows() != h || f.cols() != w) throw Error(ErrorCode::DimensionMismatch, "flow fields differ in size");
    s.mean_magnitude += f.magnitude();
    s.valid = s.valid && f.valid;
  }
  s.mean_magnitude = s.valid.select(s.mean_magnitude / static_cast<double>(s.count), 0.0);
  return s;
}

StackedFlow stack_flows(int ref, std::span<const int> others,
                        const std::function<FlowField(int ref, int other)>& flow_source) {
  if (others.empty()) throw Error(ErrorCode::EmptyStack, "no frames besides the reference");
  std::vector<FlowField> flows;
  flows.reserve(others.size());
  for (int j : others) flows.push_back(flow_source(ref, j));
  return stack_flows(flows, ref);
}

XiField xi_field(const StackedFlow& stacked, double threshold, double division_guard, double smoothing) {
  const Grid<double> inverse = gaussian_blur(
      stacked.valid.select(1.0 / stacked.mean_magnitude.max(division_guard), 0.0), smoothing);
  XiField xi;
  xi.threshold = threshold;
  xi.gx = sobel_x(inverse);
  xi.gy = sobel_y(inverse);

  // A response is trustworthy only if its whole support is valid.
  const int reach = 1 + (smoothing > 0.0 ? static_cast<int>(std::ceil(3.0 * smoothing)) : 0);
  const Grid<double> invalid = (!stacked.valid).cast<double>();
  xi.valid = box_mean(invalid, reach) <= 0.0;
  xi.values = xi.valid.select((xi.gx.square() + xi.gy.square()).sqrt(), 0.0);
  return xi;
}

Mask edge_map(const XiField& xi, double morph_radius) {
  const double peak = xi.valid.any() ? xi.valid.select(xi.values, 0.0).maxCoeff() : 0.0;
  if (!(peak > 0.0) || !std::isfinite(peak)) throw Error(ErrorCode::NoGapFound, "no edge response in Xi");
  return close_disc(hysteresis(xi.values, xi.valid, xi.threshold * peak, 0.5 * xi.threshold * peak), morph_radius);
}

GapDetection detect_gap(const XiField& xi, double morph_radius, const LabelRadii& radii) {
  const Mask edges = edge_map(xi, morph_radius);
  const Components regions = connected_components(!edges, false);
  Mask outside = Mask::Constant(edges.rows(), edges.cols(), false);
  for (Eigen::Index k = 0; k < edges.size(); ++k) {
    const int label = regions.labels(k);
    if (label >= 0 && regions.touches_border[static_cast<std::size_t>(label)]) outside(k) = true;
  }
  const Mask enclosed = !edges && !outside;
  if (!enclosed.any()) throw Error(ErrorCode::NoGapFound, "edges enclose no region");

  // The edge band is split down the middle: band pixels nearer an enclosed
  // pixel than to the outside belong to the opening.
  const Grid<double> d_inner = weighted_sq_distance(enclosed);
  const Grid<double> d_outer = weighted_sq_distance(outside);
  const Components parts = connected_components(enclosed || (edges && d_inner <= d_outer), false);
  const int best = largest_enclosed(parts);
  if (best < 0) throw Error(ErrorCode::NoGapFound, "edges enclose no region");
  Mask opening = parts.labels == best;

  const Components holes = connected_components(!opening, false);
  for (Eigen::Index k = 0; k < opening.size(); ++k) {
    const int label = holes.labels(k);
    if (label >= 0 && !holes.touches_border[static_cast<std::size_t>(label)]) opening(k) = true;
  }

  GapDetection d;
  d.opening = std::move(opening);
  d.contour = boundary(d.opening);
  const LabelSets sets = label_sets(d.opening, radii.eps1, radii.eps2, radii.eps3);
  d.foreground_band = sets.foreground;
  d.background_core = sets.background;
  d.uncertainty = !(d.foreground_band || d.background_core);
  return d;
}

LabelSets label_sets(const Mask& opening, double eps1, double eps2, double eps3) {
  if (!(eps1 > eps2 && eps2 >= 0.0 && eps3 >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "label radii need eps1 > eps2 >= 0 and eps3 >= 0");
  }
  LabelSets s;
  s.foreground = dilate_disc(opening, eps1) && !dilate_disc(opening, eps2);
  s.background = erode_disc(opening, eps3);
  if (!s.background.any()) throw Error(ErrorCode::GapTooSmall, "background core vanished after erosion");
  return s;
}

DetectionMetrics detection_metrics(const Mask& opening, const Mask& ground_truth) {
  if (opening.rows() != ground_truth.rows() || opening.cols() != ground_truth.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "opening and ground truth differ in size");
  }
  const auto g = static_cast<double>(ground_truth.count());
  if (g == 0.0) throw Error(ErrorCode::EmptyGroundTruth, "ground truth mask is empty");
  const auto hit = static_cast<double>((ground_truth && opening).count());
  const auto missed = static_cast<double>((ground_truth && !opening).count());
  DetectionMetrics m;
  m.lambda_d = hit / g;
  m.lambda_n = missed / g;
  m.success = m.lambda_d >= kOverlapForSuccess;
  if (m.success) m.lambda_p = static_cast<double>((!ground_truth && opening).count()) / g;
  return m;
}

}  // namespace gapflyt
