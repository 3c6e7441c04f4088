#include "gapflyt/features.hpp"

#include <algorithm>
#include <cmath>

#include "gapflyt/error.hpp"

namespace gapflyt {

namespace {

double min_eigenvalue(double sxx, double sxy, double syy) {
  const double half_trace = 0.5 * (sxx + syy);
  const double det = sxx * syy - sxy * sxy;
  return half_trace - std::sqrt(std::max(half_trace * half_trace - det, 0.0));
}

struct Candidate {
  double score;
  Eigen::Index index;
};

}  // namespace

CornerSet detect_corners(const Image& img, const Mask& region, int max_n, Owner owner, const CornerParams& params) {
  if (region.rows() != img.rows() || region.cols() != img.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "corner region and image differ in size");
  }
  if (!region.any()) throw Error(ErrorCode::EmptyRegion, "corner region is empty");
  if (max_n <= 0) throw Error(ErrorCode::InvalidArgument, "max_n must be positive");

  const Grid<double> gx = gradient_x(img);
  const Grid<double> gy = gradient_y(img);
  const Grid<double> sxx = box_mean(gx * gx, params.window_radius);
  const Grid<double> sxy = box_mean(gx * gy, params.window_radius);
  const Grid<double> syy = box_mean(gy * gy, params.window_radius);

  const Eigen::Index h = img.rows();
  const Eigen::Index w = img.cols();
  Grid<double> score = Grid<double>::Zero(h, w);
  for (Eigen::Index k = 0; k < h * w; ++k) score(k) = min_eigenvalue(sxx(k), sxy(k), syy(k));

  const Eigen::Index margin = params.window_radius + 1;
  double best = 0.0;
  for (Eigen::Index y = margin; y < h - margin; ++y) {
    for (Eigen::Index x = margin; x < w - margin; ++x) {
      if (region(y, x)) best = std::max(best, score(y, x));
    }
  }
  const double floor = std::max(params.min_score, params.quality * best);

  std::vector<Candidate> candidates;
  for (Eigen::Index y = margin; y < h - margin; ++y) {
    for (Eigen::Index x = margin; x < w - margin; ++x) {
      const double s = score(y, x);
      if (!region(y, x) || s < floor) continue;
      bool peak = true;
      for (Eigen::Index dy = -1; dy <= 1 && peak; ++dy) {
        for (Eigen::Index dx = -1; dx <= 1 && peak; ++dx) peak = score(y + dy, x + dx) <= s;
      }
      if (peak) candidates.push_back({s, y * w + x});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.score != b.score ? a.score > b.score : a.index < b.index;
  });

  // Bucket grid so the spacing test only looks at nearby accepted corners.
  const double cell = params.min_distance;
  const auto gw = static_cast<Eigen::Index>(std::ceil(static_cast<double>(w) / cell));
  const auto gh = static_cast<Eigen::Index>(std::ceil(static_cast<double>(h) / cell));
  std::vector<std::vector<Pixel>> buckets(static_cast<std::size_t>(gw * gh));
  const double min_sq = params.min_distance * params.min_distance;

  CornerSet out;
  out.owner = owner;
  for (const Candidate& c : candidates) {
    if (out.size() >= max_n) break;
    const Pixel p(static_cast<double>(c.index % w), static_cast<double>(c.index / w));
    const auto cx = static_cast<Eigen::Index>(p.x() / cell);
    const auto cy = static_cast<Eigen::Index>(p.y() / cell);
    bool clear = true;
    for (Eigen::Index by = std::max<Eigen::Index>(cy - 1, 0); by <= std::min(cy + 1, gh - 1) && clear; ++by) {
      for (Eigen::Index bx = std::max<Eigen::Index>(cx - 1, 0); bx <= std::min(cx + 1, gw - 1) && clear; ++bx) {
        for (const Pixel& q : buckets[static_cast<std::size_t>(by * gw + bx)]) {
          if ((q - p).squaredNorm() < min_sq) {
            clear = false;
            break;
          }
        }
      }
    }
    if (!clear) continue;
    buckets[static_cast<std::size_t>(cy * gw + cx)].push_back(p);
    out.points.push_back(p);
  }
  if (out.empty()) throw Error(ErrorCode::EmptyCorners, "no textured pixels in region");
  return out;
}

TrackedCorners track_features(const CornerSet& corners, const Image& img_i, const Image& img_j,
                              const KltParams& params) {
  if (img_i.rows() != img_j.rows() || img_i.cols() != img_j.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "tracking images differ in size");
  }
  const int levels = pyramid_levels(img_i.rows(), img_i.cols(), params.levels);
  return track_features(corners, ImagePyramid(img_i, levels), ImagePyramid(img_j, levels), params);
}

TrackedCorners track_features(const CornerSet& corners, const ImagePyramid& pyr_i, const ImagePyramid& pyr_j,
                              const KltParams& params) {
  if (pyr_i.size() != pyr_j.size() || pyr_i.size() == 0 ||
      pyr_i.levels[0].rows() != pyr_j.levels[0].rows() || pyr_i.levels[0].cols() != pyr_j.levels[0].cols()) {
    throw Error(ErrorCode::DimensionMismatch, "tracking pyramids differ");
  }
  const int levels = std::min(pyr_i.size(), params.levels);
  const int r = params.window_radius;
  const auto n = static_cast<std::size_t>((2 * r + 1) * (2 * r + 1));
  const double w0 = static_cast<double>(pyr_i.levels[0].cols());
  const double h0 = static_cast<double>(pyr_i.levels[0].rows());

  TrackedCorners out;
  out.corners.owner = corners.owner;
  out.corners.points.reserve(corners.points.size());
  out.survived.reserve(corners.points.size());

  std::vector<double> tmpl(n), tgx(n), tgy(n);
  for (const Pixel& p : corners.points) {
    Eigen::Vector2d d = Eigen::Vector2d::Zero();
    double residual = 0.0;
    double lambda_min = 0.0;
    bool ok = true;
    for (int l = levels - 1; l >= 0 && ok; --l) {
      const auto li = static_cast<std::size_t>(l);
      const Grid<double>& ii = pyr_i.levels[li];
      const Grid<double>& jj = pyr_j.levels[li];
      const double scale = std::ldexp(1.0, -l);
      const Eigen::Vector2d pl = p * scale;
      if (l != levels - 1) d *= 2.0;

      double hxx = 0.0;
      double hxy = 0.0;
      double hyy = 0.0;
      std::size_t k = 0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx, ++k) {
          const double x = pl.x() + dx;
          const double y = pl.y() + dy;
          tmpl[k] = bilinear(ii, x, y);
          tgx[k] = bilinear(pyr_i.gx[li], x, y);
          tgy[k] = bilinear(pyr_i.gy[li], x, y);
          hxx += tgx[k] * tgx[k];
          hxy += tgx[k] * tgy[k];
          hyy += tgy[k] * tgy[k];
        }
      }
      const double det = hxx * hyy - hxy * hxy;
      lambda_min = min_eigenvalue(hxx, hxy, hyy) / static_cast<double>(n);
      if (!(lambda_min >= params.min_eigenvalue) || det <= 0.0) {
        ok = false;
        break;
      }
      for (int iter = 0; iter < params.iterations; ++iter) {
        double bx = 0.0;
        double by = 0.0;
        double sq = 0.0;
        k = 0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx, ++k) {
            const double e = bilinear(jj, pl.x() + d.x() + dx, pl.y() + d.y() + dy) - tmpl[k];
            bx += tgx[k] * e;
            by += tgy[k] * e;
            sq += e * e;
          }
        }
        residual = std::sqrt(sq / static_cast<double>(n));
        const Eigen::Vector2d step((hyy * bx - hxy * by) / det, (hxx * by - hxy * bx) / det);
        d -= step;
        if (!d.allFinite()) {
          ok = false;
          break;
        }
        if (step.norm() < params.epsilon) break;
      }
    }
    const Pixel q = p + d;
    if (ok) {
      double sq = 0.0;
      std::size_t k = 0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx, ++k) {
          const double e = bilinear(pyr_j.levels[0], q.x() + dx, q.y() + dy) - tmpl[k];
          sq += e * e;
        }
      }
      residual = std::sqrt(sq / static_cast<double>(n));
    }
    const bool inside = q.allFinite() && q.x() >= 0.0 && q.y() >= 0.0 && q.x() <= w0 - 1.0 && q.y() <= h0 - 1.0;
    out.corners.points.push_back(q.allFinite() ? q : p);
    out.survived.push_back(ok && inside && residual <= params.max_residual);
  }
  return out;
}

std::pair<CornerSet, CornerSet> survivors(const CornerSet& before, const TrackedCorners& tracked) {
  CornerSet a;
  CornerSet b;
  a.owner = before.owner;
  b.owner = before.owner;
  for (std::size_t i = 0; i < before.points.size() && i < tracked.survived.size(); ++i) {
    if (!tracked.survived[i]) continue;
    a.points.push_back(before.points[i]);
    b.points.push_back(tracked.corners.points[i]);
  }
  return {a, b};
}

}  // namespace gapflyt
