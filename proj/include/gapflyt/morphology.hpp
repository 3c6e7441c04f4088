#pragma once

#include <vector>

#include "gapflyt/grid.hpp"

namespace gapflyt {

/// Minimum over set pixels q of wx*(px-qx)^2 + wy*(py-qy)^2 for every pixel p
/// (exact separable lower-envelope transform). +inf when the set is empty.
Grid<double> weighted_sq_distance(const Mask& set, double wx = 1.0, double wy = 1.0);

/// Minkowski sum with the disc {d : |d|^2 <= r^2}.
Mask dilate_disc(const Mask& set, double radius);

/// Minkowski difference with the same disc. Pixels outside the grid count as
/// outside the set unless `outside_in_set` is true.
Mask erode_disc(const Mask& set, double radius, bool outside_in_set = false);

/// Minkowski sum/difference with the axis-aligned ellipse
/// {d : b^2 dx^2 + a^2 dy^2 <= a^2 b^2}, semi-axes a (x) and b (y).
Mask dilate_ellipse(const Mask& set, double a, double b);
Mask erode_ellipse(const Mask& set, double a, double b, bool outside_in_set = false);

/// Morphological closing with a disc; never removes pixels of `set`.
Mask close_disc(const Mask& set, double radius);

/// Set pixels with a 4-neighbour outside the set or on the grid border.
Mask boundary(const Mask& set);

struct Components {
  Grid<int> labels;           ///< -1 for background, otherwise component id
  std::vector<int> sizes;
  std::vector<bool> touches_border;
};

Components connected_components(const Mask& set, bool eight_connected);

/// Pixels >= low that are 8-connected to some pixel >= high.
Mask hysteresis(const Grid<double>& values, const Mask& candidates, double high, double low);

}  // namespace gapflyt
