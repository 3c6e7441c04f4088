#include "gapflyt/texture.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "gapflyt/error.hpp"
#include "gapflyt/rng.hpp"

namespace gapflyt {

namespace {

constexpr double kPi = std::numbers::pi;

double quintic(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double lattice(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  return to_unit(splitmix64(seed ^ (static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ULL) ^
                            (static_cast<std::uint64_t>(j) * 0xD1B54A32D192ED03ULL)));
}

constexpr std::array<double, 7> kNewspaperCells{0.24, 0.12, 0.06, 0.03, 0.015, 0.0075, 0.00375};

// Weight of a detail scale `cell` given the pixel footprint: 0 below ~1.5 px, 1 above 3 px.
double lod_fade(double cell, double footprint) {
  if (footprint <= 0.0) return 1.0;
  return std::clamp((cell / footprint - 1.5) / 1.5, 0.0, 1.0);
}

double smooth_coverage(double signed_dist, double footprint) {
  const double w = std::max(footprint, 1e-4);
  return std::clamp(signed_dist / w + 0.5, 0.0, 1.0);
}

double segment_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  const Eigen::Vector2d ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (a + t * ab - p).norm();
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) { return hash_key(seed, tag); }

}  // namespace

std::string_view to_string(TextureKind kind) {
  switch (kind) {
    case TextureKind::newspaper: return "newspaper";
    case TextureKind::low_texture: return "low_texture";
    case TextureKind::leaves: return "leaves";
    case TextureKind::cloth: return "cloth";
    case TextureKind::bumpy: return "bumpy";
    case TextureKind::flat_door: return "flat_door";
    case TextureKind::wall: return "wall";
  }
  return "?";
}

std::optional<TextureKind> texture_kind_from_string(std::string_view name) {
  for (auto k : {TextureKind::newspaper, TextureKind::low_texture, TextureKind::leaves, TextureKind::cloth,
                 TextureKind::bumpy, TextureKind::flat_door, TextureKind::wall}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

double value_noise(std::uint64_t seed, const Eigen::Vector2d& p) {
  const double fx = std::floor(p.x());
  const double fy = std::floor(p.y());
  const auto i = static_cast<std::int64_t>(fx);
  const auto j = static_cast<std::int64_t>(fy);
  const double tx = quintic(p.x() - fx);
  const double ty = quintic(p.y() - fy);
  const double v00 = lattice(seed, i, j);
  const double v10 = lattice(seed, i + 1, j);
  const double v01 = lattice(seed, i, j + 1);
  const double v11 = lattice(seed, i + 1, j + 1);
  const double top = v00 + (v10 - v00) * tx;
  const double bottom = v01 + (v11 - v01) * tx;
  return top + (bottom - top) * ty;
}

Texture::Texture(const TextureSpec& spec) : spec_(spec) {
  if (!(spec.amplitude >= 0.0 && spec.amplitude <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "texture amplitude must lie in [0,1]");
  }
  if (!(spec.depth_amplitude >= 0.0 && spec.depth_amplitude <= 0.25)) {
    throw Error(ErrorCode::InvalidArgument, "texture depth amplitude must lie in [0,0.25]");
  }
  for (std::size_t k = 0; k < octave_seeds_.size(); ++k) octave_seeds_[k] = hash_key(spec.seed, 0x9E45ULL, k);

  if (spec.kind == TextureKind::low_texture) {
    // A handful of hand-drawn strokes in a ring around the opening.
    constexpr int kStrokes = 14;
    constexpr int kPoints = 12;
    for (int s = 0; s < kStrokes; ++s) {
      const std::uint64_t key = hash_key(spec.seed, 0x5C01ULL, s);
      const double angle = 2.0 * kPi * to_unit(hash_key(key, 1));
      const double radius = 0.45 + 0.45 * to_unit(hash_key(key, 2));
      double heading = 2.0 * kPi * to_unit(hash_key(key, 3));
      Stroke stroke;
      Eigen::Vector2d p(radius * std::cos(angle), radius * std::sin(angle));
      for (int k = 0; k < kPoints; ++k) {
        stroke.points.push_back(p);
        heading += 0.9 * (to_unit(hash_key(key, 10 + k)) - 0.5);
        p += 0.03 * Eigen::Vector2d(std::cos(heading), std::sin(heading));
      }
      stroke.lo = stroke.points.front();
      stroke.hi = stroke.points.front();
      for (const auto& q : stroke.points) {
        stroke.lo = stroke.lo.cwiseMin(q);
        stroke.hi = stroke.hi.cwiseMax(q);
      }
      strokes_.push_back(std::move(stroke));
    }
  }
  if (spec.kind == TextureKind::cloth) {
    for (int w = 0; w < 4; ++w) {
      const std::uint64_t key = hash_key(spec.seed, 0xC107ULL, w);
      const double dir = 2.0 * kPi * to_unit(hash_key(key, 1));
      const double wavelength = 0.12 + 0.28 * to_unit(hash_key(key, 2));
      const double phase = 2.0 * kPi * to_unit(hash_key(key, 3));
      waves_.emplace_back(std::cos(dir), std::sin(dir), 2.0 * kPi / wavelength, phase);
    }
  }
}

bool Texture::has_relief() const {
  return spec_.depth_amplitude > 0.0 &&
         (spec_.kind == TextureKind::bumpy || spec_.kind == TextureKind::leaves ||
          spec_.kind == TextureKind::cloth);
}

double Texture::relief(const Eigen::Vector2d& uv) const {
  if (!has_relief()) return 0.0;
  switch (spec_.kind) {
    case TextureKind::bumpy: {
      const std::uint64_t s = sub_seed(spec_.seed, 0xB0B0ULL);
      return 0.7 * value_noise(s, uv / 0.25) + 0.3 * value_noise(s + 1, uv / 0.12);
    }
    case TextureKind::leaves:
      return value_noise(sub_seed(spec_.seed, 0x1EAFULL), uv / 0.1);
    case TextureKind::cloth: {
      double acc = 0.0;
      for (const auto& w : waves_) acc += std::sin(w.z() * 0.5 * (w.x() * uv.x() + w.y() * uv.y()) + w.w());
      return 0.5 + 0.5 * acc / static_cast<double>(waves_.size());
    }
    default:
      return 0.0;
  }
}

double Texture::luminance(const Eigen::Vector2d& uv, double footprint) const {
  double v = 0.5;
  switch (spec_.kind) {
    case TextureKind::newspaper:
    case TextureKind::bumpy: v = newspaper(uv, footprint); break;
    case TextureKind::low_texture: v = low_texture(uv, footprint); break;
    case TextureKind::leaves: v = leaves(uv, footprint); break;
    case TextureKind::cloth: v = cloth(uv, footprint); break;
    case TextureKind::wall: v = wall(uv, footprint); break;
    case TextureKind::flat_door: v = 0.8; break;
  }
  return std::clamp(v, 0.0, 1.0);
}

double Texture::newspaper(const Eigen::Vector2d& uv, double footprint) const {
  const auto& kCells = kNewspaperCells;
  double acc = 0.0;
  double norm = 0.0;
  double weight = 1.0;
  for (std::size_t k = 0; k < kCells.size(); ++k, weight *= 0.8) {
    const double fade = lod_fade(kCells[k], footprint);
    if (fade <= 0.0) continue;
    const double w = weight * fade;
    acc += w * (value_noise(octave_seeds_[k], uv / kCells[k]) - 0.5);
    norm += w * w;
  }
  if (norm <= 0.0) return 0.5;
  return 0.5 + spec_.amplitude * acc / std::sqrt(norm);
}

double Texture::low_texture(const Eigen::Vector2d& uv, double footprint) const {
  constexpr double kHalfWidth = 0.006;
  double ink = 0.0;
  for (const auto& s : strokes_) {
    if ((uv.array() < s.lo.array() - 0.02).any() || (uv.array() > s.hi.array() + 0.02).any()) continue;
    double d = 1e9;
    for (std::size_t k = 0; k + 1 < s.points.size(); ++k) {
      d = std::min(d, segment_distance(s.points[k], s.points[k + 1], uv));
    }
    ink = std::max(ink, smooth_coverage(kHalfWidth - d, footprint));
  }
  return 0.85 - spec_.amplitude * 0.65 * ink;
}

double Texture::leaves(const Eigen::Vector2d& uv, double footprint) const {
  constexpr double kCell = 0.1;
  const double ci = std::floor(uv.x() / kCell);
  const double cj = std::floor(uv.y() / kCell);
  double best_priority = -1.0;
  double coverage = 0.0;
  double leaf_lum = 0.0;
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      const auto i = static_cast<std::int64_t>(ci) + di;
      const auto j = static_cast<std::int64_t>(cj) + dj;
      const std::uint64_t key = hash_key(spec_.seed, 0x1EAFULL, i, j);
      const bool small = to_unit(hash_key(key, 7)) < 0.4;
      const double scale = small ? 0.55 : 1.0;
      const Eigen::Vector2d centre((static_cast<double>(i) + 0.5 + 0.7 * (to_unit(hash_key(key, 1)) - 0.5)) * kCell,
                                   (static_cast<double>(j) + 0.5 + 0.7 * (to_unit(hash_key(key, 2)) - 0.5)) * kCell);
      const double angle = kPi * to_unit(hash_key(key, 3));
      const double a = scale * (0.045 + 0.025 * to_unit(hash_key(key, 4)));
      const double b = scale * (small ? 0.028 : 0.018 + 0.012 * to_unit(hash_key(key, 5)));
      const Eigen::Vector2d d = uv - centre;
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      const double lx = c * d.x() + s * d.y();
      const double ly = -s * d.x() + c * d.y();
      const double e = std::sqrt((lx / a) * (lx / a) + (ly / b) * (ly / b));
      if (e >= 1.0 + footprint / b) continue;
      const double priority = to_unit(hash_key(key, 6));
      if (priority <= best_priority) continue;
      best_priority = priority;
      coverage = smooth_coverage((1.0 - e) * b, footprint);
      // Glossy front faces and matte backs alternate from leaf to leaf.
      const bool front = ((i + j) & 1) == 0;
      double lum = front ? 0.88 : 0.32;
      const double vein = smooth_coverage(0.0025 - std::abs(ly), footprint);
      lum -= (front ? 0.35 : 0.12) * vein;
      lum += 0.08 * lod_fade(0.01, footprint) *
             (value_noise(hash_key(key, 8), Eigen::Vector2d(lx, ly) / 0.01) - 0.5);
      leaf_lum = lum;
    }
  }
  const double under = 0.12;
  return under + spec_.amplitude * coverage * (leaf_lum - under);
}

double Texture::cloth(const Eigen::Vector2d& uv, double footprint) const {
  double acc = 0.0;
  for (const auto& w : waves_) acc += std::sin(w.z() * (w.x() * uv.x() + w.y() * uv.y()) + w.w());
  const double weave = lod_fade(0.02, footprint) * (value_noise(hash_key(spec_.seed, 0xC1ULL), uv / 0.02) - 0.5);
  return 0.55 + spec_.amplitude * (0.3 * acc / static_cast<double>(waves_.size()) + 0.1 * weave);
}

double Texture::wall(const Eigen::Vector2d& uv, double footprint) const {
  constexpr double kCell = 0.45;
  const double ci = std::floor(uv.x() / kCell);
  const double cj = std::floor(uv.y() / kCell);
  const std::uint64_t key =
      hash_key(spec_.seed, 0x3A11ULL, static_cast<std::int64_t>(ci), static_cast<std::int64_t>(cj));
  const double base = 0.8;
  if (to_unit(hash_key(key, 1)) > 0.4) return base;
  const double r = 0.05 + 0.04 * to_unit(hash_key(key, 2));
  const Eigen::Vector2d centre((ci + r / kCell + (1.0 - 2.0 * r / kCell) * to_unit(hash_key(key, 3))) * kCell,
                               (cj + r / kCell + (1.0 - 2.0 * r / kCell) * to_unit(hash_key(key, 4))) * kCell);
  const double d = (uv - centre).norm();
  const double inside = smooth_coverage(r - d, footprint);
  if (inside <= 0.0) return base;
  const double ring = smooth_coverage(0.006 - std::abs(d - 0.8 * r), footprint);
  double logo = 0.3 + 0.5 * lod_fade(0.012, footprint) * value_noise(hash_key(key, 5), uv / 0.012);
  logo = logo * (1.0 - ring) + 0.05 * ring;
  return base + spec_.amplitude * inside * (logo - base);
}

}  // namespace gapflyt
