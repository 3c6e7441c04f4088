#include "gapflyt/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gapflyt/error.hpp"

namespace gapflyt {

namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

int orientation(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                        const Eigen::Vector2d& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

double segment_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

}  // namespace

double signed_area(const Polygon& poly) {
  double area = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    area += cross(poly[i], poly[(i + 1) % n]);
  }
  return 0.5 * area;
}

bool is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3 || std::abs(signed_area(poly)) <= 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool contains(const Polygon& poly, const Eigen::Vector2d& point) {
  bool inside = false;
  for (std::size_t i = 0, n = poly.size(), j = n - 1; i < n; j = i++) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[j];
    if ((a.y() > point.y()) != (b.y() > point.y())) {
      const double x = a.x() + (point.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (point.x() < x) inside = !inside;
    }
  }
  return inside;
}

double boundary_distance(const Polygon& poly, const Eigen::Vector2d& point) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    best = std::min(best, segment_distance(poly[i], poly[(i + 1) % n], point));
  }
  return best;
}

double signed_distance(const Polygon& poly, const Eigen::Vector2d& point) {
  const double d = boundary_distance(poly, point);
  return contains(poly, point) ? d : -d;
}

Polygon translated(Polygon poly, const Eigen::Vector2d& offset) {
  for (auto& v : poly) v += offset;
  return poly;
}

Polygon canned_gap(std::string_view name, double size) {
  const double h = 0.5 * size;
  if (name == "square") {
    return {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
  }
  if (name == "rectangle") {
    return {{-h, -0.6 * h}, {h, -0.6 * h}, {h, 0.6 * h}, {-h, 0.6 * h}};
  }
  if (name == "triangle") {
    return {{0.0, -h}, {h, h}, {-h, h}};
  }
  if (name == "ellipse") {
    Polygon poly;
    constexpr int kSides = 32;
    for (int i = 0; i < kSides; ++i) {
      const double t = 2.0 * std::numbers::pi * i / kSides;
      poly.emplace_back(h * std::cos(t), 0.7 * h * std::sin(t));
    }
    return poly;
  }
  if (name == "chevron") {
    return {{-h, -h}, {0.0, -0.4 * h}, {h, -h}, {h, h}, {-h, h}};
  }
  throw Error(ErrorCode::InvalidConfig, "unknown gap shape '" + std::string(name) + "'");
}

}  // namespace gapflyt
