#include "gapflyt/morphology.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace gapflyt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D lower envelope of parabolas w*(p-q)^2 + f(q).
void envelope_1d(const std::vector<double>& f, double w, std::vector<double>& out, std::vector<int>& v,
                 std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[static_cast<std::size_t>(q)] == kInf) continue;
    const double fq = f[static_cast<std::size_t>(q)] + w * q * q;
    while (k >= 0) {
      const int vk = v[static_cast<std::size_t>(k)];
      const double s = (fq - (f[static_cast<std::size_t>(vk)] + w * vk * vk)) / (2.0 * w * (q - vk));
      if (s <= z[static_cast<std::size_t>(k)]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] =
        k == 0 ? -kInf
               : (fq - (f[static_cast<std::size_t>(v[static_cast<std::size_t>(k - 1)])] +
                        w * v[static_cast<std::size_t>(k - 1)] * v[static_cast<std::size_t>(k - 1)])) /
                     (2.0 * w * (q - v[static_cast<std::size_t>(k - 1)]));
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  int j = 0;
  for (int p = 0; p < n; ++p) {
    while (j < k && z[static_cast<std::size_t>(j + 1)] < p) ++j;
    const int q = v[static_cast<std::size_t>(j)];
    const double d = static_cast<double>(p - q);
    out[static_cast<std::size_t>(p)] = w * (d * d) + f[static_cast<std::size_t>(q)];
  }
}

// Squared distance from each pixel to the nearest pixel outside the grid.
double border_sq_distance(Eigen::Index x, Eigen::Index y, Eigen::Index w, Eigen::Index h, double wx, double wy) {
  const double dx = static_cast<double>(std::min(x + 1, w - x));
  const double dy = static_cast<double>(std::min(y + 1, h - y));
  return std::min(wx * (dx * dx), wy * (dy * dy));
}

Mask dilate_weighted(const Mask& set, double wx, double wy, double threshold) {
  return weighted_sq_distance(set, wx, wy) <= threshold;
}

Mask erode_weighted(const Mask& set, double wx, double wy, double threshold, bool outside_in_set) {
  const Grid<double> d = weighted_sq_distance(!set, wx, wy);
  Mask out(set.rows(), set.cols());
  for (Eigen::Index y = 0; y < set.rows(); ++y) {
    for (Eigen::Index x = 0; x < set.cols(); ++x) {
      double nearest = d(y, x);
      if (!outside_in_set) nearest = std::min(nearest, border_sq_distance(x, y, set.cols(), set.rows(), wx, wy));
      out(y, x) = nearest > threshold;
    }
  }
  return out;
}

}  // namespace

Grid<double> weighted_sq_distance(const Mask& set, double wx, double wy) {
  const Eigen::Index h = set.rows();
  const Eigen::Index w = set.cols();
  Grid<double> cols_pass(h, w);
  {
    std::vector<double> f(static_cast<std::size_t>(h)), out(static_cast<std::size_t>(h)), z(static_cast<std::size_t>(h) + 1);
    std::vector<int> v(static_cast<std::size_t>(h));
    for (Eigen::Index x = 0; x < w; ++x) {
      for (Eigen::Index y = 0; y < h; ++y) f[static_cast<std::size_t>(y)] = set(y, x) ? 0.0 : kInf;
      envelope_1d(f, wy, out, v, z);
      for (Eigen::Index y = 0; y < h; ++y) cols_pass(y, x) = out[static_cast<std::size_t>(y)];
    }
  }
  Grid<double> result(h, w);
  {
    std::vector<double> f(static_cast<std::size_t>(w)), out(static_cast<std::size_t>(w)), z(static_cast<std::size_t>(w) + 1);
    std::vector<int> v(static_cast<std::size_t>(w));
    for (Eigen::Index y = 0; y < h; ++y) {
      for (Eigen::Index x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = cols_pass(y, x);
      envelope_1d(f, wx, out, v, z);
      for (Eigen::Index x = 0; x < w; ++x) result(y, x) = out[static_cast<std::size_t>(x)];
    }
  }
  return result;
}

Mask dilate_disc(const Mask& set, double radius) { return dilate_weighted(set, 1.0, 1.0, radius * radius); }

Mask erode_disc(const Mask& set, double radius, bool outside_in_set) {
  return erode_weighted(set, 1.0, 1.0, radius * radius, outside_in_set);
}

Mask dilate_ellipse(const Mask& set, double a, double b) {
  return dilate_weighted(set, b * b, a * a, (a * a) * (b * b));
}

Mask erode_ellipse(const Mask& set, double a, double b, bool outside_in_set) {
  return erode_weighted(set, b * b, a * a, (a * a) * (b * b), outside_in_set);
}

Mask close_disc(const Mask& set, double radius) {
  if (radius <= 0.0) return set;
  return erode_disc(dilate_disc(set, radius), radius, true) || set;
}

Mask boundary(const Mask& set) {
  const Eigen::Index h = set.rows();
  const Eigen::Index w = set.cols();
  Mask out = Mask::Constant(h, w, false);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      if (!set(y, x)) continue;
      out(y, x) = x == 0 || y == 0 || x == w - 1 || y == h - 1 || !set(y, x - 1) || !set(y, x + 1) ||
                  !set(y - 1, x) || !set(y + 1, x);
    }
  }
  return out;
}

Components connected_components(const Mask& set, bool eight_connected) {
  const Eigen::Index h = set.rows();
  const Eigen::Index w = set.cols();
  Components c;
  c.labels = Grid<int>::Constant(h, w, -1);
  std::vector<Eigen::Index> stack;
  static constexpr std::array<std::array<int, 2>, 8> kNeighbours{
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
  const int n_neighbours = eight_connected ? 8 : 4;
  for (Eigen::Index start = 0; start < h * w; ++start) {
    if (!set(start) || c.labels(start) >= 0) continue;
    const int id = static_cast<int>(c.sizes.size());
    c.sizes.push_back(0);
    c.touches_border.push_back(false);
    c.labels(start) = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const Eigen::Index k = stack.back();
      stack.pop_back();
      const Eigen::Index y = k / w;
      const Eigen::Index x = k % w;
      ++c.sizes.back();
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) c.touches_border.back() = true;
      for (int n = 0; n < n_neighbours; ++n) {
        const Eigen::Index nx = x + kNeighbours[static_cast<std::size_t>(n)][0];
        const Eigen::Index ny = y + kNeighbours[static_cast<std::size_t>(n)][1];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const Eigen::Index nk = ny * w + nx;
        if (set(nk) && c.labels(nk) < 0) {
          c.labels(nk) = id;
          stack.push_back(nk);
        }
      }
    }
  }
  return c;
}

Mask hysteresis(const Grid<double>& values, const Mask& candidates, double high, double low) {
  const Mask weak = candidates && (values >= low);
  const Components comps = connected_components(weak, true);
  std::vector<bool> keep(comps.sizes.size(), false);
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (weak(k) && values(k) >= high) keep[static_cast<std::size_t>(comps.labels(k))] = true;
  }
  Mask out(values.rows(), values.cols());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    out(k) = comps.labels(k) >= 0 && keep[static_cast<std::size_t>(comps.labels(k))];
  }
  return out;
}

}  // namespace gapflyt
