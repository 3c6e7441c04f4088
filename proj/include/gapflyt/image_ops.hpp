#pragma once

#include <algorithm>
#include <vector>

#include "gapflyt/grid.hpp"

namespace gapflyt {

/// Bilinear lookup at (x = column, y = row) with edge clamping.
template <typename Derived>
typename Derived::Scalar bilinear(const Eigen::ArrayBase<Derived>& g, double x, double y) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index w = g.cols();
  const Eigen::Index h = g.rows();
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const auto x0 = static_cast<Eigen::Index>(x);
  const auto y0 = static_cast<Eigen::Index>(y);
  const Eigen::Index x1 = std::min(x0 + 1, w - 1);
  const Eigen::Index y1 = std::min(y0 + 1, h - 1);
  const Scalar tx = static_cast<Scalar>(x - static_cast<double>(x0));
  const Scalar ty = static_cast<Scalar>(y - static_cast<double>(y0));
  const Scalar top = g(y0, x0) + (g(y0, x1) - g(y0, x0)) * tx;
  const Scalar bottom = g(y1, x0) + (g(y1, x1) - g(y1, x0)) * tx;
  return top + (bottom - top) * ty;
}

/// Mean over a (2r+1)^2 window clipped to the grid.
Grid<double> box_mean(const Grid<double>& g, int radius);

/// Median over a (2r+1)^2 window clipped to the grid.
Grid<double> median_filter(const Grid<double>& g, int radius);

/// Unnormalised 3x3 Sobel derivatives, replicated border.
Grid<double> sobel_x(const Grid<double>& g);
Grid<double> sobel_y(const Grid<double>& g);

/// Central differences divided by 2 (unit-pixel derivative), replicated border.
Grid<double> gradient_x(const Grid<double>& g);
Grid<double> gradient_y(const Grid<double>& g);

Grid<double> gaussian_blur(const Grid<double>& g, double sigma);

/// 5-tap binomial blur followed by 2x decimation; size (n+1)/2.
Grid<double> pyr_down(const Grid<double>& g);

/// Resamples `g` to rows x cols, treating pixel x of the output as x/scale of the input.
Grid<double> resample(const Grid<double>& g, Eigen::Index rows, Eigen::Index cols, double scale);

/// Number of levels (<= requested) keeping the coarsest side >= min_side.
int pyramid_levels(Eigen::Index rows, Eigen::Index cols, int requested, int min_side = 8);

/// Image pyramid with unit-pixel gradients per level.
struct ImagePyramid {
  std::vector<Grid<double>> levels;
  std::vector<Grid<double>> gx;
  std::vector<Grid<double>> gy;

  ImagePyramid(const Grid<double>& base, int levels);
  int size() const { return static_cast<int>(levels.size()); }
};

}  // namespace gapflyt
