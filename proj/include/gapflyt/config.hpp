#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gapflyt/frames.hpp"
#include "gapflyt/texture.hpp"

namespace gapflyt {

inline constexpr int kConfigSchema = 1;

enum class FlowSource { analytic, estimated };

std::string_view to_string(FlowSource source);
FlowSource flow_source_from_string(std::string_view name);

struct SceneConfig {
  double z_f = 2.6;
  double z_b = 5.7;
  std::string gap_shape = "square";
  double gap_size = 1.0;  ///< metres
  Eigen::Vector2d gap_center = Eigen::Vector2d::Zero();
  TextureKind fg_texture = TextureKind::newspaper;
  TextureKind bg_texture = TextureKind::newspaper;
  double fg_amplitude = 1.0;
  double bg_amplitude = 1.0;
  double fg_relief = 0.0;
  std::uint64_t texture_seed = 7;
};

struct CameraConfig {
  int width = 576;
  int height = 384;
  std::optional<double> focal;  ///< default 300 px at 384 rows, scaled with height
  std::optional<double> flow_sigma;  ///< px; default 0.5 px at 384 rows, scaled with height

  double focal_px() const { return focal ? *focal : 300.0 * height / 384.0; }
  double flow_sigma_px() const { return flow_sigma ? *flow_sigma : 0.5 * height / 384.0; }
  CameraModel model() const { return CameraModel::centered(focal_px(), width, height); }
};

struct DetectionConfig {
  int frames = 4;
  double scan_extent = 0.3;     ///< metres
  double scan_angle_deg = 15.0;
  double threshold = 0.2;
  std::optional<double> eps1;   ///< px; default scales with height
  std::optional<double> eps2;
  std::optional<double> eps3;
  std::optional<double> morph_radius;
  std::optional<double> xi_smoothing;  ///< px; default 2 px at 384 rows, scaled with height
  FlowSource flow = FlowSource::analytic;
  double position_jitter = 0.05;  ///< metres, uniform per trial on X and Y
};

struct TrackingConfig {
  int k_f = 40;
  int k_b = 20;
  int max_corners = 100;
  double kalman_q = 0.16;
  double kalman_r = 4.0;
};

struct ControlConfig {
  double kp = 0.03;
  double ki = 0.0;
  double kd = 0.0;
  double forward_speed = 1.0;
  double quad_radius = 0.17;
  double dt = 1.0 / 30.0;
  double velocity_lag = 0.15;
  double v_max = 5.0;
  double integrator_clamp = 50.0;
  double frame_runtime = 0.002;  ///< tracker runtime per frame, seconds
};

struct TrialConfig {
  std::vector<std::uint64_t> seeds{1};
  std::uint64_t master_seed = 0;
  double max_sim_time = 8.0;
};

struct ScenarioConfig {
  SceneConfig scene;
  CameraConfig camera;
  DetectionConfig detection;
  TrackingConfig tracking;
  ControlConfig control;
  TrialConfig trial;
};

/// Parses `key = value` lines grouped under [scene], [camera], [detection],
/// [tracking], [control] and [trial]; a top-level `schema = 1` is required.
/// Unknown keys, bad values and out-of-range settings throw InvalidConfig.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

/// Throws InvalidConfig when a setting is outside its documented range.
void validate(const ScenarioConfig& cfg);

/// "7", "1,4,9" or an inclusive range "1..150".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace gapflyt
