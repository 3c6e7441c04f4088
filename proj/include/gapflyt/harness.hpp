#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapflyt/config.hpp"
#include "gapflyt/flythrough.hpp"
#include "gapflyt/io.hpp"
#include "gapflyt/ts2p.hpp"
#include "gapflyt/world.hpp"

namespace gapflyt {

/// Everything about a trial that follows from (config, seed) before any
/// image is processed.
struct TrialSetup {
  std::uint64_t key = 0;
  Scene scene;
  CameraModel camera;
  std::vector<RigidTransform> scan;  ///< oldest first; the last pose is the reference
  const RigidTransform& reference() const { return scan.back(); }
};

TrialSetup make_trial_setup(const ScenarioConfig& cfg, std::uint64_t seed);

struct DetectionReport {
  double lambda_d = 0.0;
  double lambda_n = 1.0;
  std::optional<double> lambda_p;
  bool success = false;
  std::string failure;  ///< empty unless the detector raised
};

struct TraversalReport {
  bool attempted = false;
  bool success = false;
  double clearance = 0.0;
  double max_speed = 0.0;
  bool speed_violation = false;
};

struct TrialReport {
  std::uint64_t seed = 0;
  FlowSource flow = FlowSource::analytic;
  DetectionReport detection;
  TraversalReport traversal;
  bool tracking_lost = false;
  bool success = false;
  std::string failure;
  std::map<std::string, double> timings_ms;  ///< wall clock; excluded from comparisons
};

bool same_outcome(const TrialReport& a, const TrialReport& b);

struct DetectionPhase {
  explicit DetectionPhase(TrialSetup s) : setup(std::move(s)) {}

  TrialSetup setup;
  std::optional<GapDetection> detection;
  std::optional<XiField> xi;
  Mask ground_truth;
  Image reference_image;  ///< rendered only on the estimated-flow path or on request
  DetectionReport report;
  double elapsed_ms = 0.0;
};

/// Scan, flow (analytic or estimated), stacking, Xi, gap extraction and
/// scoring against the ground truth at the reference pose.
DetectionPhase run_detection_phase(const ScenarioConfig& cfg, std::uint64_t seed, bool render_reference = false);

struct TrialArtifacts {
  std::vector<CsvRow> trajectory;
  std::vector<CsvRow> track_log;
};

const CsvRow& trajectory_header();
const CsvRow& track_log_header();

/// Detection, then closed-loop tracking and servoing until the vehicle
/// crosses the foreground plane or the time budget runs out.
TrialReport run_trial(const ScenarioConfig& cfg, std::uint64_t seed, TrialArtifacts* artifacts = nullptr);

enum class BatchMode { detect, fly };

struct BatchSummary {
  std::string scenario;
  FlowSource flow = FlowSource::analytic;
  BatchMode mode = BatchMode::detect;
  int trials = 0;
  double dr = 0.0;
  std::optional<double> afn;  ///< over successful detections
  std::optional<double> afp;
  std::optional<double> success_rate;  ///< fly mode only
  std::vector<TrialReport> rows;  ///< sorted by seed
};

BatchSummary aggregate(std::string scenario, FlowSource flow, BatchMode mode, std::vector<TrialReport> rows);

BatchSummary run_batch(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds, BatchMode mode,
                       const std::string& scenario = "canonical");

/// The ten foreground/background texture pairings of the robustness study,
/// built on `base` with the study's depths and frame count.
std::vector<std::pair<std::string, ScenarioConfig>> texture_scenarios(const ScenarioConfig& base);

std::string report_json(const TrialReport& report, bool include_timings = true);
std::string summary_json(const std::vector<BatchSummary>& summaries);
const CsvRow& batch_csv_header();
CsvRow batch_csv_row(const std::string& scenario, const TrialReport& report);

}  // namespace gapflyt
