#pragma once

#include <Eigen/Core>

#include <string_view>
#include <vector>

namespace gapflyt {

/// Ordered vertices of a simple polygon (either orientation).
using Polygon = std::vector<Eigen::Vector2d>;

double signed_area(const Polygon& poly);

/// At least 3 vertices, nonzero area, no two non-adjacent edges touching.
bool is_simple(const Polygon& poly);

/// Even-odd rule; points exactly on an edge may land on either side.
bool contains(const Polygon& poly, const Eigen::Vector2d& point);

/// Euclidean distance to the polygon boundary.
double boundary_distance(const Polygon& poly, const Eigen::Vector2d& point);

/// Positive inside, negative outside.
double signed_distance(const Polygon& poly, const Eigen::Vector2d& point);

Polygon translated(Polygon poly, const Eigen::Vector2d& offset);

/// Gap outlines resembling the five test windows: "square", "rectangle",
/// "triangle", "ellipse" and the non-convex "chevron". `size` is the overall
/// width in metres; the outline is centred on the origin.
Polygon canned_gap(std::string_view name, double size);

}  // namespace gapflyt
