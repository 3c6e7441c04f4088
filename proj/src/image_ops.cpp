#include "gapflyt/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gapflyt {

namespace {

Eigen::Index clampi(Eigen::Index v, Eigen::Index lo, Eigen::Index hi) { return std::min(std::max(v, lo), hi); }

// Separable correlation with a symmetric-or-not kernel, replicated border.
Grid<double> separable(const Grid<double>& g, const std::vector<double>& kx, const std::vector<double>& ky) {
  const Eigen::Index h = g.rows();
  const Eigen::Index w = g.cols();
  const auto rx = static_cast<Eigen::Index>(kx.size() / 2);
  const auto ry = static_cast<Eigen::Index>(ky.size() / 2);
  Grid<double> tmp(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (Eigen::Index k = -rx; k <= rx; ++k) acc += kx[static_cast<std::size_t>(k + rx)] * g(y, clampi(x + k, 0, w - 1));
      tmp(y, x) = acc;
    }
  }
  Grid<double> out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (Eigen::Index k = -ry; k <= ry; ++k) acc += ky[static_cast<std::size_t>(k + ry)] * tmp(clampi(y + k, 0, h - 1), x);
      out(y, x) = acc;
    }
  }
  return out;
}

}  // namespace

Grid<double> box_mean(const Grid<double>& g, int radius) {
  const Eigen::Index h = g.rows();
  const Eigen::Index w = g.cols();
  // Summed-area table with a zero row/column in front.
  Grid<double> sat = Grid<double>::Zero(h + 1, w + 1);
  for (Eigen::Index y = 0; y < h; ++y) {
    double row = 0.0;
    for (Eigen::Index x = 0; x < w; ++x) {
      row += g(y, x);
      sat(y + 1, x + 1) = sat(y, x + 1) + row;
    }
  }
  Grid<double> out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    const Eigen::Index y0 = std::max<Eigen::Index>(0, y - radius);
    const Eigen::Index y1 = std::min<Eigen::Index>(h, y + radius + 1);
    for (Eigen::Index x = 0; x < w; ++x) {
      const Eigen::Index x0 = std::max<Eigen::Index>(0, x - radius);
      const Eigen::Index x1 = std::min<Eigen::Index>(w, x + radius + 1);
      const double sum = sat(y1, x1) - sat(y0, x1) - sat(y1, x0) + sat(y0, x0);
      out(y, x) = sum / static_cast<double>((y1 - y0) * (x1 - x0));
    }
  }
  return out;
}

Grid<double> median_filter(const Grid<double>& g, int radius) {
  const Eigen::Index h = g.rows();
  const Eigen::Index w = g.cols();
  Grid<double> out(h, w);
  std::vector<double> window;
  window.reserve(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      window.clear();
      for (Eigen::Index yy = std::max<Eigen::Index>(0, y - radius); yy <= std::min(h - 1, y + radius); ++yy) {
        for (Eigen::Index xx = std::max<Eigen::Index>(0, x - radius); xx <= std::min(w - 1, x + radius); ++xx) {
          window.push_back(g(yy, xx));
        }
      }
      const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      out(y, x) = *mid;
    }
  }
  return out;
}

Grid<double> sobel_x(const Grid<double>& g) { return separable(g, {-1.0, 0.0, 1.0}, {1.0, 2.0, 1.0}); }
Grid<double> sobel_y(const Grid<double>& g) { return separable(g, {1.0, 2.0, 1.0}, {-1.0, 0.0, 1.0}); }

Grid<double> gradient_x(const Grid<double>& g) { return separable(g, {-0.5, 0.0, 0.5}, {1.0}); }
Grid<double> gradient_y(const Grid<double>& g) { return separable(g, {1.0}, {-0.5, 0.0, 0.5}); }

Grid<double> gaussian_blur(const Grid<double>& g, double sigma) {
  if (sigma <= 0.0) return g;
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[static_cast<std::size_t>(i + r)];
  }
  for (auto& v : k) v /= sum;
  return separable(g, k, k);
}

Grid<double> pyr_down(const Grid<double>& g) {
  const std::vector<double> k{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const Grid<double> blurred = separable(g, k, k);
  const Eigen::Index h = (g.rows() + 1) / 2;
  const Eigen::Index w = (g.cols() + 1) / 2;
  Grid<double> out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) out(y, x) = blurred(2 * y, 2 * x);
  }
  return out;
}

Grid<double> resample(const Grid<double>& g, Eigen::Index rows, Eigen::Index cols, double scale) {
  Grid<double> out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      out(y, x) = bilinear(g, static_cast<double>(x) / scale, static_cast<double>(y) / scale);
    }
  }
  return out;
}

int pyramid_levels(Eigen::Index rows, Eigen::Index cols, int requested, int min_side) {
  int levels = 1;
  Eigen::Index side = std::min(rows, cols);
  while (levels < requested && (side + 1) / 2 >= min_side) {
    side = (side + 1) / 2;
    ++levels;
  }
  return levels;
}

ImagePyramid::ImagePyramid(const Grid<double>& base, int n) {
  levels.reserve(static_cast<std::size_t>(n));
  levels.push_back(base);
  for (int l = 1; l < n; ++l) levels.push_back(pyr_down(levels.back()));
  for (const auto& img : levels) {
    gx.push_back(gradient_x(img));
    gy.push_back(gradient_y(img));
  }
}

}  // namespace gapflyt
