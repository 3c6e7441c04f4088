#include "gapflyt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "gapflyt/error.hpp"
#include "gapflyt/polygon.hpp"

namespace gapflyt {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

double to_double(const std::string& key, std::string_view s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) bad(key + ": not a number: " + std::string(s));
  return v;
}

std::int64_t to_int(const std::string& key, std::string_view s) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) bad(key + ": not an integer: " + std::string(s));
  return v;
}

std::uint64_t to_uint(const std::string& key, std::string_view s) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) bad(key + ": not a non-negative integer: " + std::string(s));
  return v;
}

TextureKind to_texture(const std::string& key, std::string_view s) {
  const auto kind = texture_kind_from_string(s);
  if (!kind) bad(key + ": unknown texture: " + std::string(s));
  return *kind;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, std::string_view)>;

template <typename Member>
Setter real(Member member) {
  return [member](ScenarioConfig& c, const std::string& k, std::string_view v) { std::invoke(member, c) = to_double(k, v); };
}

template <typename Member>
Setter integer(Member member) {
  return [member](ScenarioConfig& c, const std::string& k, std::string_view v) {
    std::invoke(member, c) = static_cast<int>(to_int(k, v));
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"scene.z_f", real([](ScenarioConfig& c) -> double& { return c.scene.z_f; })},
      {"scene.z_b", real([](ScenarioConfig& c) -> double& { return c.scene.z_b; })},
      {"scene.gap_shape", [](ScenarioConfig& c, const std::string&, std::string_view v) { c.scene.gap_shape = v; }},
      {"scene.gap_size", real([](ScenarioConfig& c) -> double& { return c.scene.gap_size; })},
      {"scene.gap_center_x", real([](ScenarioConfig& c) -> double& { return c.scene.gap_center.x(); })},
      {"scene.gap_center_y", real([](ScenarioConfig& c) -> double& { return c.scene.gap_center.y(); })},
      {"scene.fg_texture",
       [](ScenarioConfig& c, const std::string& k, std::string_view v) { c.scene.fg_texture = to_texture(k, v); }},
      {"scene.bg_texture",
       [](ScenarioConfig& c, const std::string& k, std::string_view v) { c.scene.bg_texture = to_texture(k, v); }},
      {"scene.fg_amplitude", real([](ScenarioConfig& c) -> double& { return c.scene.fg_amplitude; })},
      {"scene.bg_amplitude", real([](ScenarioConfig& c) -> double& { return c.scene.bg_amplitude; })},
      {"scene.fg_relief", real([](ScenarioConfig& c) -> double& { return c.scene.fg_relief; })},
      {"scene.texture_seed",
       [](ScenarioConfig& c, const std::string& k, std::string_view v) { c.scene.texture_seed = to_uint(k, v); }},

      {"camera.width", integer([](ScenarioConfig& c) -> int& { return c.camera.width; })},
      {"camera.height", integer([](ScenarioConfig& c) -> int& { return c.camera.height; })},
      {"camera.focal", [](ScenarioConfig& c, const std::string& k, std::string_view v) { c.camera.focal = to_double(k, v); }},
      {"camera.flow_sigma",
       [](ScenarioConfig& c, const std::string& k, std::string_view v) { c.camera.flow_sigma = to_double(k, v); }},

      {"detection.frames", integer([](ScenarioConfig& c) -> int& { return c.detection.frames; })},
      {"detection.scan_extent", real([](ScenarioConfig& c) -> double& { return c.detection.scan_extent; })},
      {"detection.scan_angle_deg", real([](ScenarioConfig& c) -> double& { return c.detection.scan_angle_deg; })},
      {"detection.threshold", real([](ScenarioConfig& c) -> double& { return c.detection.threshold; })},
      {"detection.eps1", [](ScenarioConfig& c, const std::string& k, std::string_view v) { c.detection.eps1 = to_double(k, v); }},
      {"detection.eps2", [](ScenarioConfig& c, const std::string& k, std::string_view v) { c.detection.eps2 = to_double(k, v); }},
      {"detection.eps3", [](ScenarioConfig& c, const std::string& k, std::string_view v) { c.detection.eps3 = to_double(k, v); }},
      {"detection.morph_radius",
       [](ScenarioConfig& c, const std::string& k, std::string_view v) { c.detection.morph_radius = to_double(k, v); }},
      {"detection.xi_smoothing",
       [](ScenarioConfig& c, const std::string& k, std::string_view v) { c.detection.xi_smoothing = to_double(k, v); }},
      {"detection.flow",
       [](ScenarioConfig& c, const std::string&, std::string_view v) { c.detection.flow = flow_source_from_string(v); }},
      {"detection.position_jitter", real([](ScenarioConfig& c) -> double& { return c.detection.position_jitter; })},

      {"tracking.k_f", integer([](ScenarioConfig& c) -> int& { return c.tracking.k_f; })},
      {"tracking.k_b", integer([](ScenarioConfig& c) -> int& { return c.tracking.k_b; })},
      {"tracking.max_corners", integer([](ScenarioConfig& c) -> int& { return c.tracking.max_corners; })},
      {"tracking.kalman_q", real([](ScenarioConfig& c) -> double& { return c.tracking.kalman_q; })},
      {"tracking.kalman_r", real([](ScenarioConfig& c) -> double& { return c.tracking.kalman_r; })},

      {"control.kp", real([](ScenarioConfig& c) -> double& { return c.control.kp; })},
      {"control.ki", real([](ScenarioConfig& c) -> double& { return c.control.ki; })},
      {"control.kd", real([](ScenarioConfig& c) -> double& { return c.control.kd; })},
      {"control.forward_speed", real([](ScenarioConfig& c) -> double& { return c.control.forward_speed; })},
      {"control.quad_radius", real([](ScenarioConfig& c) -> double& { return c.control.quad_radius; })},
      {"control.dt", real([](ScenarioConfig& c) -> double& { return c.control.dt; })},
      {"control.velocity_lag", real([](ScenarioConfig& c) -> double& { return c.control.velocity_lag; })},
      {"control.v_max", real([](ScenarioConfig& c) -> double& { return c.control.v_max; })},
      {"control.integrator_clamp", real([](ScenarioConfig& c) -> double& { return c.control.integrator_clamp; })},
      {"control.frame_runtime", real([](ScenarioConfig& c) -> double& { return c.control.frame_runtime; })},

      {"trial.seeds",
       [](ScenarioConfig& c, const std::string&, std::string_view v) { c.trial.seeds = parse_seed_list(v); }},
      {"trial.master_seed",
       [](ScenarioConfig& c, const std::string& k, std::string_view v) { c.trial.master_seed = to_uint(k, v); }},
      {"trial.max_sim_time", real([](ScenarioConfig& c) -> double& { return c.trial.max_sim_time; })},
  };
  return table;
}

void require(bool ok, const std::string& msg) {
  if (!ok) bad(msg);
}

}  // namespace

std::string_view to_string(FlowSource source) { return source == FlowSource::analytic ? "analytic" : "estimated"; }

FlowSource flow_source_from_string(std::string_view name) {
  if (name == "analytic") return FlowSource::analytic;
  if (name == "estimated") return FlowSource::estimated;
  bad("unknown flow source: " + std::string(name));
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  const auto range = text.find("..");
  if (range != std::string_view::npos) {
    const std::uint64_t a = to_uint("seeds", text.substr(0, range));
    const std::uint64_t b = to_uint("seeds", text.substr(range + 2));
    if (b < a) bad("seed range is empty: " + std::string(text));
    for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto token = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    seeds.push_back(to_uint("seeds", token));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return seeds;
}

ScenarioConfig parse_config(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    bad(std::string("malformed config: ") + e.what());
  }

  ScenarioConfig cfg;
  bool has_schema = false;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string key = item.fullname();
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
    if (key == "schema") {
      if (to_int(key, value) != kConfigSchema) bad("unsupported schema version " + value);
      has_schema = true;
      continue;
    }
    const auto it = setters().find(key);
    if (it == setters().end()) bad("unknown key: " + key);
    it->second(cfg, key, value);
  }
  if (!has_schema) bad("missing schema key");
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot open config " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void validate(const ScenarioConfig& c) {
  require(c.scene.z_f > 0.0 && c.scene.z_b > c.scene.z_f, "need 0 < z_f < z_b");
  require(c.scene.gap_size > 0.0, "gap_size must be positive");
  try {
    canned_gap(c.scene.gap_shape, c.scene.gap_size);
  } catch (const Error&) {
    bad("unknown gap shape: " + c.scene.gap_shape);
  }
  require(c.scene.fg_amplitude >= 0.0 && c.scene.fg_amplitude <= 1.0, "fg_amplitude must lie in [0,1]");
  require(c.scene.bg_amplitude >= 0.0 && c.scene.bg_amplitude <= 1.0, "bg_amplitude must lie in [0,1]");
  require(c.scene.fg_relief >= 0.0 && c.scene.fg_relief <= 0.25, "fg_relief must lie in [0,0.25]");

  require(c.camera.width >= 16 && c.camera.width <= 4096, "camera width must lie in [16,4096]");
  require(c.camera.height >= 16 && c.camera.height <= 4096, "camera height must lie in [16,4096]");
  require(c.camera.focal_px() > 0.0, "focal must be positive");
  require(c.camera.flow_sigma_px() >= 0.0, "flow_sigma must be non-negative");

  require(c.detection.frames >= 1 && c.detection.frames <= 64, "frames must lie in [1,64]");
  require(c.detection.scan_extent > 0.0, "scan_extent must be positive");
  require(c.detection.scan_angle_deg >= 0.0 && c.detection.scan_angle_deg <= 90.0,
          "scan_angle_deg must lie in [0,90]");
  require(c.detection.threshold > 0.0 && c.detection.threshold < 1.0, "threshold must lie in (0,1)");
  for (const auto& eps : {c.detection.eps1, c.detection.eps2, c.detection.eps3, c.detection.morph_radius,
                          c.detection.xi_smoothing}) {
    require(!eps || *eps >= 0.0, "radii must be non-negative");
  }
  require(c.detection.position_jitter >= 0.0, "position_jitter must be non-negative");

  require(c.tracking.k_f >= 0 && c.tracking.k_b >= 0, "corner thresholds must be non-negative");
  require(c.tracking.max_corners > std::max(c.tracking.k_f, c.tracking.k_b), "max_corners must exceed k_f and k_b");
  require(c.tracking.kalman_q >= 0.0 && c.tracking.kalman_r >= 0.0, "Kalman noise must be non-negative");

  require(c.control.kp >= 0.0 && c.control.ki >= 0.0 && c.control.kd >= 0.0, "gains must be non-negative");
  require(c.control.forward_speed > 0.0, "forward_speed must be positive");
  require(c.control.quad_radius > 0.0, "quad_radius must be positive");
  require(c.control.dt > 0.0 && c.control.dt <= 0.5, "dt must lie in (0,0.5]");
  require(c.control.velocity_lag >= 0.0, "velocity_lag must be non-negative");
  require(c.control.v_max > 0.0, "v_max must be positive");
  require(c.control.integrator_clamp >= 0.0, "integrator_clamp must be non-negative");
  require(c.control.frame_runtime > 0.0, "frame_runtime must be positive");

  require(!c.trial.seeds.empty(), "seed list is empty");
  require(c.trial.max_sim_time > 0.0, "max_sim_time must be positive");
}

}  // namespace gapflyt
