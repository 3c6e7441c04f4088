#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace gapflyt {

/// Dense per-pixel grid, rows = image height, row-major like the image data.
template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Luminance image, values in [0,1].
using Image = Grid<double>;

/// Binary pixel set over an image grid.
using Mask = Grid<bool>;

using Pixel = Eigen::Vector2d;  // (x = column, y = row)

inline bool in_bounds(const Pixel& p, Eigen::Index width, Eigen::Index height) {
  return p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= static_cast<double>(width - 1) &&
         p.y() <= static_cast<double>(height - 1);
}

}  // namespace gapflyt
