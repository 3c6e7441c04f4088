#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace gapflyt {

enum class TextureKind { newspaper, low_texture, leaves, cloth, bumpy, flat_door, wall };

std::string_view to_string(TextureKind kind);
std::optional<TextureKind> texture_kind_from_string(std::string_view name);

struct TextureSpec {
  TextureKind kind = TextureKind::newspaper;
  std::uint64_t seed = 0;
  double amplitude = 1.0;        ///< contrast scale in [0,1]
  double depth_amplitude = 0.0;  ///< relief as a fraction of viewing distance, <= 0.25
};

/// Procedural surface pattern painted on a plane, in metres of plane
/// coordinates. Lookups are pure functions of (spec, uv, footprint).
class Texture {
 public:
  explicit Texture(const TextureSpec& spec);

  const TextureSpec& spec() const { return spec_; }

  /// Luminance in [0,1]. `footprint` is the size of one pixel on the surface
  /// (metres); detail finer than about two pixels is faded out.
  double luminance(const Eigen::Vector2d& uv, double footprint) const;

  /// Smooth relief in [0,1]; zero for kinds without depth perturbation.
  double relief(const Eigen::Vector2d& uv) const;

  bool has_relief() const;

 private:
  struct Stroke {
    std::vector<Eigen::Vector2d> points;
    Eigen::Vector2d lo, hi;
  };

  double newspaper(const Eigen::Vector2d& uv, double footprint) const;
  double low_texture(const Eigen::Vector2d& uv, double footprint) const;
  double leaves(const Eigen::Vector2d& uv, double footprint) const;
  double cloth(const Eigen::Vector2d& uv, double footprint) const;
  double wall(const Eigen::Vector2d& uv, double footprint) const;

  TextureSpec spec_;
  std::array<std::uint64_t, 7> octave_seeds_{};
  std::vector<Stroke> strokes_;
  std::vector<Eigen::Vector4d> waves_;  // (dir x, dir y, wavenumber, phase)
};

/// Smoothly interpolated lattice noise in [0,1] with unit cell size.
double value_noise(std::uint64_t seed, const Eigen::Vector2d& p);

}  // namespace gapflyt
