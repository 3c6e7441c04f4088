#include "gapflyt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "json.hpp"

#include "gapflyt/error.hpp"
#include "gapflyt/flow.hpp"
#include "gapflyt/gaptrack.hpp"
#include "gapflyt/image_ops.hpp"
#include "gapflyt/polygon.hpp"
#include "gapflyt/rng.hpp"

namespace gapflyt {

namespace {

using Clock = std::chrono::steady_clock;
using ordered_json = nlohmann::ordered_json;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

enum Stream : std::uint64_t { kFgTexture = 1, kBgTexture, kFlowNoise, kJitterX, kJitterY };

LabelRadii label_radii(const ScenarioConfig& cfg) {
  LabelRadii r = LabelRadii::for_height(cfg.camera.height);
  if (cfg.detection.flow == FlowSource::estimated) {
    // Estimated openings run short on the occluded side; keep F clear of the gap.
    const double s = cfg.camera.height / 384.0;
    r.eps1 = 20.0 * s;
    r.eps2 = 10.0 * s;
  }
  if (cfg.detection.eps1) r.eps1 = *cfg.detection.eps1;
  if (cfg.detection.eps2) r.eps2 = *cfg.detection.eps2;
  if (cfg.detection.eps3) r.eps3 = *cfg.detection.eps3;
  return r;
}

double morph_radius(const ScenarioConfig& cfg) {
  if (cfg.detection.morph_radius) return *cfg.detection.morph_radius;
  return std::max(1.0, 3.0 * cfg.camera.height / 384.0);
}

double xi_smoothing(const ScenarioConfig& cfg) {
  if (cfg.detection.xi_smoothing) return *cfg.detection.xi_smoothing;
  return 2.0 * cfg.camera.height / 384.0;
}

TrackingParams tracking_params(const ScenarioConfig& cfg) {
  TrackingParams p;
  p.k_foreground = cfg.tracking.k_f;
  p.k_background = cfg.tracking.k_b;
  p.max_corners = cfg.tracking.max_corners;
  p.kalman.process_noise = cfg.tracking.kalman_q;
  p.kalman.measurement_noise = cfg.tracking.kalman_r;
  return p;
}

ServoGains servo_gains(const ScenarioConfig& cfg) {
  ServoGains g;
  g.kp = Eigen::Vector2d::Constant(cfg.control.kp);
  g.ki = Eigen::Vector2d::Constant(cfg.control.ki);
  g.kd = Eigen::Vector2d::Constant(cfg.control.kd);
  g.forward_speed = cfg.control.forward_speed;
  g.velocity_lag = cfg.control.velocity_lag;
  g.v_max = cfg.control.v_max;
  g.integrator_clamp = cfg.control.integrator_clamp;
  return g;
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::string phase_name(bool done) { return done ? "done" : "servo"; }

}  // namespace

TrialSetup make_trial_setup(const ScenarioConfig& cfg, std::uint64_t seed) {
  const std::uint64_t key = hash_key(cfg.trial.master_seed, seed);
  const SceneConfig& s = cfg.scene;
  TextureSpec fg{s.fg_texture, hash_key(s.texture_seed, key, kFgTexture), s.fg_amplitude, s.fg_relief};
  TextureSpec bg{s.bg_texture, hash_key(s.texture_seed, key, kBgTexture), s.bg_amplitude, 0.0};
  Scene scene(s.z_f, s.z_b, translated(canned_gap(s.gap_shape, s.gap_size), s.gap_center), fg, bg);

  const DetectionConfig& d = cfg.detection;
  const double angle = d.scan_angle_deg * std::numbers::pi / 180.0;
  const double jx = d.position_jitter * (2.0 * to_unit(hash_key(key, kJitterX)) - 1.0);
  const double jy = d.position_jitter * (2.0 * to_unit(hash_key(key, kJitterY)) - 1.0);
  // The scan ends in front of the gap at world Z = 0.
  const Eigen::Vector3d start(s.gap_center.x() - d.scan_extent * std::cos(angle) + jx, s.gap_center.y() + jy,
                              -d.scan_extent * std::sin(angle));
  return TrialSetup{key, std::move(scene), cfg.camera.model(), scan_trajectory(start, d.scan_extent, d.frames, angle)};
}

bool same_outcome(const TrialReport& a, const TrialReport& b) {
  return report_json(a, false) == report_json(b, false);
}

DetectionPhase run_detection_phase(const ScenarioConfig& cfg, std::uint64_t seed, bool render_reference) {
  const auto t0 = Clock::now();
  DetectionPhase phase(make_trial_setup(cfg, seed));
  const TrialSetup& setup = phase.setup;
  const RigidTransform& ref = setup.reference();
  phase.ground_truth = ground_truth_mask(ref, setup.camera, setup.scene);

  const bool estimated = cfg.detection.flow == FlowSource::estimated;
  if (estimated || render_reference) phase.reference_image = render(ref, setup.camera, setup.scene);

  const int n = cfg.detection.frames;
  std::vector<FlowField> flows;
  flows.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const RigidTransform& other = setup.scan[static_cast<std::size_t>(k)];
    if (estimated) {
      flows.push_back(estimate_flow(phase.reference_image, render(other, setup.camera, setup.scene)));
    } else {
      flows.push_back(analytic_flow(ref, other, setup.camera, setup.scene, cfg.camera.flow_sigma_px(),
                                    hash_key(setup.key, kFlowNoise, k)));
    }
  }

  try {
    const StackedFlow stacked = stack_flows(flows, n);
    phase.xi = xi_field(stacked, cfg.detection.threshold, kDivisionGuard, xi_smoothing(cfg));
    phase.detection = detect_gap(*phase.xi, morph_radius(cfg), label_radii(cfg));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoGapFound && e.code() != ErrorCode::GapTooSmall) throw;
    phase.report.failure = std::string(to_string(e.code()));
  }

  const Mask opening = phase.detection ? phase.detection->opening
                                       : Mask::Constant(phase.ground_truth.rows(), phase.ground_truth.cols(), false);
  const DetectionMetrics m = detection_metrics(opening, phase.ground_truth);
  phase.report.lambda_d = m.lambda_d;
  phase.report.lambda_n = m.lambda_n;
  phase.report.lambda_p = m.lambda_p;
  phase.report.success = m.success && phase.detection.has_value();
  phase.elapsed_ms = ms_since(t0);
  return phase;
}

const CsvRow& trajectory_header() {
  static const CsvRow h{"t", "x", "y", "z", "vx", "vy", "vz", "e_x", "e_y", "phase"};
  return h;
}

const CsvRow& track_log_header() {
  static const CsvRow h{"frame",     "F",         "B",        "C_F",        "C_B",          "xs_raw_x", "xs_raw_y",
                        "xs_smooth_x", "xs_smooth_y", "switched", "reset_F", "reset_B"};
  return h;
}

TrialReport run_trial(const ScenarioConfig& cfg, std::uint64_t seed, TrialArtifacts* artifacts) {
  TrialReport report;
  report.seed = seed;
  report.flow = cfg.detection.flow;

  DetectionPhase phase = run_detection_phase(cfg, seed, true);
  report.detection = phase.report;
  report.timings_ms["detection"] = phase.elapsed_ms;
  if (!phase.detection) {
    report.failure = phase.report.failure.empty() ? "DetectionFailed" : phase.report.failure;
    return report;
  }

  const auto t0 = Clock::now();
  const TrialSetup& setup = phase.setup;
  const CameraModel& cam = setup.camera;
  const TrackingParams tparams = tracking_params(cfg);
  const ServoGains gains = servo_gains(cfg);
  const double dt = cfg.control.dt;
  const int levels = pyramid_levels(cam.height(), cam.width(), tparams.klt.levels);

  const auto log_pose = [&](double t, const QuadState& q, const Pixel& xs, bool done) {
    if (!artifacts) return;
    const Eigen::Vector2d e = xs - cam.principal_point();
    artifacts->trajectory.push_back({format_number(t), format_number(q.position.x()), format_number(q.position.y()),
                                     format_number(q.position.z()), format_number(q.velocity.x()),
                                     format_number(q.velocity.y()), format_number(q.velocity.z()),
                                     format_number(e.x()), format_number(e.y()), phase_name(done)});
  };
  if (artifacts) {
    for (std::size_t k = 0; k < setup.scan.size(); ++k) {
      const Eigen::Vector3d& p = setup.scan[k].translation();
      artifacts->trajectory.push_back({format_number(0.0), format_number(p.x()), format_number(p.y()),
                                       format_number(p.z()), "0", "0", "0", "0", "0", "scan"});
    }
  }

  std::vector<QuadState> trajectory;
  QuadState q;
  q.position = setup.reference().translation();
  trajectory.push_back(q);

  try {
    TrackState track = init_tracking(phase.detection->foreground_band, phase.detection->background_core,
                                     phase.reference_image, tparams);
    ImagePyramid prev(phase.reference_image, levels);
    double t = 0.0;
    for (int frame = 1; t < cfg.trial.max_sim_time; ++frame) {
      q = servo_step(q, track.safest, cam, gains, dt);
      t += dt;
      trajectory.push_back(q);
      report.traversal.max_speed = std::max(report.traversal.max_speed, q.velocity.norm());
      const bool crossed = q.position.z() >= setup.scene.z_foreground();
      log_pose(t, q, track.safest, crossed);
      if (crossed) break;

      const Image img = render(camera_pose(q), cam, setup.scene);
      ImagePyramid next(img, levels);
      const TrackStepLog log = track_step(track, prev, next, img, dt, tparams);
      prev = std::move(next);
      if (artifacts) {
        artifacts->track_log.push_back({std::to_string(frame), std::to_string(log.fg_count),
                                        std::to_string(log.bg_count), std::to_string(log.fg_corners),
                                        std::to_string(log.bg_corners), format_number(log.raw.x()),
                                        format_number(log.raw.y()), format_number(log.smoothed.x()),
                                        format_number(log.smoothed.y()), log.switched ? "1" : "0",
                                        log.reset.foreground ? "1" : "0", log.reset.background ? "1" : "0"});
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TrackingLost) throw;
    report.tracking_lost = true;
    report.failure = "TrackingLost";
  }
  report.timings_ms["flight"] = ms_since(t0);

  const double limit = theoretical_max_speed(cfg.control.frame_runtime, cfg.scene.z_f, cfg.scene.z_b, cam.focal());
  report.traversal.speed_violation = report.traversal.max_speed > limit;

  if (report.tracking_lost) return report;
  try {
    const TraversalResult r = traversal_check(trajectory, setup.scene, cfg.control.quad_radius);
    report.traversal.attempted = true;
    report.traversal.success = r.success;
    report.traversal.clearance = r.clearance;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotAttempted) throw;
    report.failure = "NotAttempted";
    return report;
  }
  report.success = report.traversal.success;
  if (!report.success) report.failure = "Collision";
  return report;
}

BatchSummary aggregate(std::string scenario, FlowSource flow, BatchMode mode, std::vector<TrialReport> rows) {
  std::sort(rows.begin(), rows.end(), [](const TrialReport& a, const TrialReport& b) { return a.seed < b.seed; });
  BatchSummary s;
  s.scenario = std::move(scenario);
  s.flow = flow;
  s.mode = mode;
  s.trials = static_cast<int>(rows.size());
  int detected = 0;
  int traversed = 0;
  double sum_n = 0.0;
  double sum_p = 0.0;
  for (const auto& r : rows) {
    if (r.success) ++traversed;
    if (!r.detection.success) continue;
    ++detected;
    sum_n += r.detection.lambda_n;
    sum_p += r.detection.lambda_p.value_or(0.0);
  }
  if (s.trials > 0) s.dr = static_cast<double>(detected) / s.trials;
  if (detected > 0) {
    s.afn = sum_n / detected;
    s.afp = sum_p / detected;
  }
  if (mode == BatchMode::fly && s.trials > 0) s.success_rate = static_cast<double>(traversed) / s.trials;
  s.rows = std::move(rows);
  return s;
}

BatchSummary run_batch(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds, BatchMode mode,
                       const std::string& scenario) {
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "batch needs at least one seed");
  std::vector<TrialReport> rows;
  rows.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    if (mode == BatchMode::fly) {
      rows.push_back(run_trial(cfg, seed));
      continue;
    }
    const DetectionPhase phase = run_detection_phase(cfg, seed);
    TrialReport r;
    r.seed = seed;
    r.flow = cfg.detection.flow;
    r.detection = phase.report;
    r.failure = phase.report.success ? "" : (phase.report.failure.empty() ? "DetectionFailed" : phase.report.failure);
    r.timings_ms["detection"] = phase.elapsed_ms;
    rows.push_back(std::move(r));
  }
  return aggregate(scenario, cfg.detection.flow, mode, std::move(rows));
}

std::vector<std::pair<std::string, ScenarioConfig>> texture_scenarios(const ScenarioConfig& base) {
  struct Row {
    TextureKind fg;
    TextureKind bg;
    const char* shape;
  };
  using K = TextureKind;
  const std::vector<Row> rows = {
      {K::bumpy, K::leaves, nullptr},        {K::bumpy, K::flat_door, nullptr}, {K::bumpy, K::newspaper, nullptr},
      {K::bumpy, K::cloth, nullptr},         {K::leaves, K::wall, nullptr},     {K::leaves, K::newspaper, nullptr},
      {K::cloth, K::wall, nullptr},          {K::low_texture, K::leaves, "square"},
      {K::low_texture, K::leaves, "triangle"}, {K::low_texture, K::leaves, "chevron"},
  };
  std::vector<std::pair<std::string, ScenarioConfig>> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ScenarioConfig c = base;
    c.scene.z_f = 2.8;
    c.scene.z_b = 5.6;
    c.detection.frames = 3;
    c.scene.fg_texture = rows[i].fg;
    c.scene.bg_texture = rows[i].bg;
    c.scene.fg_relief = rows[i].fg == K::bumpy ? 0.25 : rows[i].fg == K::leaves ? 0.10 : 0.0;
    if (rows[i].shape) c.scene.gap_shape = rows[i].shape;
    const std::string name = std::to_string(i + 1) + ":" + std::string(to_string(rows[i].fg)) + "/" +
                             std::string(to_string(rows[i].bg)) + "/" + c.scene.gap_shape;
    out.emplace_back(name, std::move(c));
  }
  return out;
}

std::string report_json(const TrialReport& r, bool include_timings) {
  ordered_json j;
  j["seed"] = r.seed;
  j["flow"] = std::string(to_string(r.flow));
  j["detection"] = {{"lambda_d", r.detection.lambda_d},
                    {"lambda_n", r.detection.lambda_n},
                    {"lambda_p", optional_number(r.detection.lambda_p)},
                    {"success", r.detection.success},
                    {"failure", r.detection.failure}};
  j["traversal"] = {{"attempted", r.traversal.attempted},
                    {"success", r.traversal.success},
                    {"clearance", r.traversal.clearance},
                    {"max_speed", r.traversal.max_speed},
                    {"speed_violation", r.traversal.speed_violation}};
  j["tracking_lost"] = r.tracking_lost;
  j["success"] = r.success;
  j["failure"] = r.failure;
  if (include_timings) {
    ordered_json t = ordered_json::object();
    for (const auto& [k, v] : r.timings_ms) t[k] = v;
    j["timings_ms"] = t;
  }
  return j.dump(2);
}

std::string summary_json(const std::vector<BatchSummary>& summaries) {
  ordered_json all = ordered_json::array();
  for (const auto& s : summaries) {
    ordered_json j;
    j["scenario"] = s.scenario;
    j["flow"] = std::string(to_string(s.flow));
    j["mode"] = s.mode == BatchMode::fly ? "fly" : "detect";
    j["trials"] = s.trials;
    j["dr"] = s.dr;
    j["afn"] = optional_number(s.afn);
    j["afp"] = optional_number(s.afp);
    j["success_rate"] = optional_number(s.success_rate);
    all.push_back(j);
  }
  return all.dump(2) + "\n";
}

const CsvRow& batch_csv_header() {
  static const CsvRow h{"scenario",  "flow",      "seed",      "lambda_d",      "lambda_n", "lambda_p",
                        "detected",  "attempted", "traversed", "clearance",     "max_speed", "tracking_lost",
                        "failure"};
  return h;
}

CsvRow batch_csv_row(const std::string& scenario, const TrialReport& r) {
  return {scenario,
          std::string(to_string(r.flow)),
          std::to_string(r.seed),
          format_number(r.detection.lambda_d),
          format_number(r.detection.lambda_n),
          r.detection.lambda_p ? format_number(*r.detection.lambda_p) : "",
          r.detection.success ? "1" : "0",
          r.traversal.attempted ? "1" : "0",
          r.success ? "1" : "0",
          r.traversal.attempted ? format_number(r.traversal.clearance) : "",
          format_number(r.traversal.max_speed),
          r.tracking_lost ? "1" : "0",
          r.failure};
}

}  // namespace gapflyt
