#pragma once

#include <utility>
#include <vector>

#include "gapflyt/grid.hpp"
#include "gapflyt/image_ops.hpp"

namespace gapflyt {

enum class Owner { foreground, background };

struct CornerSet {
  std::vector<Pixel> points;
  Owner owner = Owner::foreground;

  int size() const { return static_cast<int>(points.size()); }
  bool empty() const { return points.empty(); }
};

struct CornerParams {
  int window_radius = 2;
  double min_distance = 5.0;
  double quality = 0.01;     ///< fraction of the best score in the region
  double min_score = 1e-6;   ///< absolute floor on the min eigenvalue
};

/// Shi-Tomasi corners inside `region`, strongest first (ties row-major), at
/// least `min_distance` apart. Throws EmptyRegion for an empty region and
/// EmptyCorners when nothing in it is textured.
CornerSet detect_corners(const Image& img, const Mask& region, int max_n, Owner owner = Owner::foreground,
                         const CornerParams& params = {});

struct KltParams {
  int levels = 3;
  int window_radius = 7;
  int iterations = 12;
  double epsilon = 0.01;        ///< px; stop when the update is smaller
  double max_residual = 0.05;   ///< RMS intensity difference over the window
  double min_eigenvalue = 1e-6;
};

struct TrackedCorners {
  CornerSet corners;           ///< one entry per input corner, in input order
  std::vector<bool> survived;
};

/// Pyramidal Lucas-Kanade point tracking from img_i to img_j.
TrackedCorners track_features(const CornerSet& corners, const Image& img_i, const Image& img_j,
                              const KltParams& params = {});
TrackedCorners track_features(const CornerSet& corners, const ImagePyramid& pyr_i, const ImagePyramid& pyr_j,
                              const KltParams& params = {});

/// Survivor pairs (before, after) in input order.
std::pair<CornerSet, CornerSet> survivors(const CornerSet& before, const TrackedCorners& tracked);

}  // namespace gapflyt
