#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gapflyt/config.hpp"
#include "gapflyt/error.hpp"
#include "gapflyt/flythrough.hpp"
#include "gapflyt/harness.hpp"
#include "gapflyt/io.hpp"
#include "gapflyt/world.hpp"

namespace fs = std::filesystem;
using namespace gapflyt;

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 1;
  std::string seeds;
  std::string out = "out";
  std::string flow;
};

ScenarioConfig load(const Common& c) {
  ScenarioConfig cfg = c.config.empty() ? ScenarioConfig{} : load_config(c.config);
  if (!c.flow.empty()) cfg.detection.flow = flow_source_from_string(c.flow);
  if (!c.seeds.empty()) cfg.trial.seeds = parse_seed_list(c.seeds);
  validate(cfg);
  return cfg;
}

fs::path seed_dir(const Common& c) {
  fs::path dir = fs::path(c.out) / ("seed_" + std::to_string(c.seed));
  fs::create_directories(dir);
  return dir;
}

void print_summary(const BatchSummary& s) {
  std::printf("%-40s %-9s n=%-4d DR=%.3f AFN=%s AFP=%s", s.scenario.c_str(), std::string(to_string(s.flow)).c_str(),
              s.trials, s.dr, s.afn ? format_number(*s.afn).c_str() : "-", s.afp ? format_number(*s.afp).c_str() : "-");
  if (s.success_rate) std::printf(" success=%.3f", *s.success_rate);
  std::printf("\n");
}

int cmd_detect(const Common& c) {
  const ScenarioConfig cfg = load(c);
  const DetectionPhase phase = run_detection_phase(cfg, c.seed, true);
  const fs::path dir = seed_dir(c);
  write_pgm((dir / "reference.pgm").string(), phase.reference_image);
  write_pgm((dir / "ground_truth.pgm").string(), to_image(phase.ground_truth));
  if (phase.xi) write_pgm((dir / "xi.pgm").string(), normalized(phase.xi->values));
  if (phase.detection) {
    write_pgm((dir / "opening.pgm").string(), to_image(phase.detection->opening));
    Image labels = 0.5 * to_image(phase.detection->uncertainty) + to_image(phase.detection->background_core);
    write_pgm((dir / "labels.pgm").string(), labels);
  }
  TrialReport r;
  r.seed = c.seed;
  r.flow = cfg.detection.flow;
  r.detection = phase.report;
  r.failure = phase.report.failure;
  r.timings_ms["detection"] = phase.elapsed_ms;
  write_text((dir / "metrics.json").string(), report_json(r) + "\n");
  std::printf("seed %llu: lambda_D=%.4f lambda_N=%.4f detected=%d\n", static_cast<unsigned long long>(c.seed),
              phase.report.lambda_d, phase.report.lambda_n, phase.report.success ? 1 : 0);
  return 0;
}

int cmd_fly(const Common& c) {
  const ScenarioConfig cfg = load(c);
  TrialArtifacts artifacts;
  const TrialReport r = run_trial(cfg, c.seed, &artifacts);
  const fs::path dir = seed_dir(c);
  write_csv((dir / "trajectory.csv").string(), trajectory_header(), artifacts.trajectory);
  write_csv((dir / "track_log.csv").string(), track_log_header(), artifacts.track_log);
  write_text((dir / "report.json").string(), report_json(r) + "\n");
  std::printf("seed %llu: detected=%d traversed=%d clearance=%.3f m%s%s\n", static_cast<unsigned long long>(c.seed),
              r.detection.success ? 1 : 0, r.success ? 1 : 0, r.traversal.clearance,
              r.failure.empty() ? "" : " failure=", r.failure.c_str());
  return r.success ? 0 : 2;
}

int cmd_batch(const Common& c, bool fly, bool textures) {
  const ScenarioConfig cfg = load(c);
  const BatchMode mode = fly ? BatchMode::fly : BatchMode::detect;
  std::vector<std::pair<std::string, ScenarioConfig>> scenarios;
  if (textures) {
    scenarios = texture_scenarios(cfg);
  } else {
    scenarios.emplace_back("canonical", cfg);
  }
  std::vector<BatchSummary> summaries;
  std::vector<CsvRow> rows;
  for (const auto& [name, scenario] : scenarios) {
    summaries.push_back(run_batch(scenario, cfg.trial.seeds, mode, name));
    print_summary(summaries.back());
    for (const auto& r : summaries.back().rows) rows.push_back(batch_csv_row(name, r));
  }
  fs::create_directories(c.out);
  write_csv((fs::path(c.out) / "batch.csv").string(), batch_csv_header(), rows);
  write_text((fs::path(c.out) / "summary.json").string(), summary_json(summaries));
  return 0;
}

int cmd_render(const Common& c) {
  const ScenarioConfig cfg = load(c);
  const TrialSetup setup = make_trial_setup(cfg, c.seed);
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / ("scene_" + std::to_string(c.seed) + ".pgm");
  write_pgm(path.string(), render(setup.reference(), setup.camera, setup.scene));
  std::printf("%s\n", path.string().c_str());
  return 0;
}

int cmd_maxspeed(const std::vector<double>& runtimes_ms, double z_f, double z_b, double focal, double blur) {
  std::printf("runtime_ms,max_speed_mps\n");
  for (double ms : runtimes_ms) {
    std::printf("%s,%s\n", format_number(ms).c_str(),
                format_number(theoretical_max_speed(ms / 1000.0, z_f, z_b, focal, blur)).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gap detection, tracking and fly-through simulator"};
  app.require_subcommand(1);
  Common common;

  const auto add_common = [&common](CLI::App* sub, bool seeds) {
    sub->add_option("--config", common.config, "Scenario config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Trial seed");
    if (seeds) sub->add_option("--seeds", common.seeds, "Seed list, e.g. 1..150");
    sub->add_option("--out", common.out, "Output directory");
    sub->add_option("--flow", common.flow, "Flow source")->check(CLI::IsMember({"analytic", "estimated"}));
  };

  CLI::App* detect = app.add_subcommand("detect", "Run one detection phase and dump Xi, O and G");
  add_common(detect, false);
  CLI::App* fly = app.add_subcommand("fly", "Run one full trial and dump trajectory and track log");
  add_common(fly, false);
  CLI::App* batch = app.add_subcommand("batch", "Run many seeds and aggregate DR/AFN/AFP");
  add_common(batch, true);
  bool batch_fly = false;
  bool textures = false;
  batch->add_flag("--fly", batch_fly, "Run full trials instead of detection only");
  batch->add_flag("--textures", textures, "Run the ten texture scenarios");
  CLI::App* render_cmd = app.add_subcommand("render", "Render the reference view as PGM");
  add_common(render_cmd, false);

  CLI::App* maxspeed = app.add_subcommand("maxspeed", "Theoretical maximum speed for tracker runtimes");
  std::vector<double> runtimes{2.0, 5.0, 8.3, 40.0};
  double z_f = 2.6;
  double z_b = 5.7;
  double focal = kCalibratedFocal;
  double blur = 1.0;
  maxspeed->add_option("--runtime-ms", runtimes, "Tracker runtimes in milliseconds");
  maxspeed->add_option("--zf", z_f, "Foreground depth (m)");
  maxspeed->add_option("--zb", z_b, "Background depth (m)");
  maxspeed->add_option("--focal", focal, "Focal length (px)");
  maxspeed->add_option("--blur", blur, "Allowed parallax (px)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*detect) return cmd_detect(common);
    if (*fly) return cmd_fly(common);
    if (*batch) return cmd_batch(common, batch_fly, textures);
    if (*render_cmd) return cmd_render(common);
    if (*maxspeed) return cmd_maxspeed(runtimes, z_f, z_b, focal, blur);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
