#include "roomaware/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "roomaware/angles.hpp"
#include "roomaware/errors.hpp"
#include "roomaware/orientation_filter.hpp"

namespace roomaware {

namespace {

using nlohmann::json;

constexpr std::uint64_t kWarmupStream = 11;
constexpr std::uint64_t kMclStream = 12;
constexpr std::uint64_t kFilterStream = 13;
constexpr std::uint64_t kWorldSeedTag = 101;
constexpr std::uint64_t kTrialSeedTag = 202;

double pose_distance(const Pose2D& a, const Pose2D& b) {
  return std::hypot(a.x - b.x, a.y - b.y) + std::abs(angle_diff(a.heading, b.heading));
}

// Believed positions may drift; keep them inside the cylinder for the
// view-center ray intersection.
Vec2 clamp_into_cylinder(Vec2 p, const CylinderParams& cyl) {
  const Vec2 rel = p - cyl.center;
  const double r = rel.norm();
  const double limit = 0.95 * cyl.radius;
  if (r <= limit) return p;
  return cyl.center + rel * (limit / r);
}

double believed_view_center(const Pose2D& pose, double head_yaw, const CylinderParams& cyl) {
  const ViewPose view{clamp_into_cylinder({pose.x, pose.y}, cyl), pose.heading, head_yaw, 0.0};
  return view_center_azimuth(view, cyl);
}

Pose2D integrate_odometry(const Pose2D& pose, const Odometry& odom) {
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  return {pose.x + c * odom.dx - s * odom.dy, pose.y + s * odom.dx + c * odom.dy,
          wrap_pi(pose.heading + odom.dheading)};
}

std::vector<PerceivedTile> perceive(const FrameBundle& bundle, const TileGrid& grid,
                                    const BinningConfig& binning, double believed_vc) {
  // The robot back-projects the image under its believed pose: every tile
  // label shifts rigidly by the believed-minus-true view-center offset.
  const double shift = angle_diff(believed_vc, bundle.true_view_center);
  std::vector<PerceivedTile> out;
  out.reserve(bundle.tile_samples.size());
  for (const TileSampleSet& s : bundle.tile_samples) {
    if (s.pixels.empty()) continue;
    PerceivedTile tile;
    tile.id = {s.id.row, grid.col_at(grid.tile_center_azimuth(s.id.col) + shift)};
    tile.histogram = build_histogram(s.pixels, binning);
    out.push_back(std::move(tile));
  }
  return out;
}

json pose_json(const Pose2D& p) { return json::array({p.x, p.y, p.heading}); }

}  // namespace

std::string_view to_string(TrialOutcome::Classification c) {
  switch (c) {
    case TrialOutcome::Classification::Flip: return "flip";
    case TrialOutcome::Classification::Purge: return "purge";
    case TrialOutcome::Classification::Failed: return "failed";
  }
  return "?";
}

BackgroundModel train_background(const Config& cfg, ScenarioKind kind, bool switch_side,
                                 double seconds, std::uint64_t world_seed,
                                 std::uint64_t warmup_seed) {
  Scenario scenario = cfg.make_scenario(kind, switch_side);
  scenario.duration_frames = static_cast<int>(std::lround(seconds * cfg.frame_rate));
  // Calibration spin covering the whole wall in full revolutions. Partial
  // coverage would let the seen/unseen boundary disambiguate poses on its
  // own, and unevenly trained tiles carry systematically larger mean error.
  if (seconds > 0.0) {
    const double revolutions = std::max(1.0, std::round(seconds / 30.0));
    scenario.body_spin_rate = revolutions * kTwoPi / seconds;
  }
  World world(cfg.world, scenario, world_seed, warmup_seed);

  BackgroundModel model(world.grid(), cfg.n_param);
  model.set_training_gate(true, GateReason::Manual, -scenario.duration_frames - 1);

  Pose2D believed = world.true_start_pose();
  for (long frame = 0; frame < scenario.duration_frames; ++frame) {
    const FrameBundle bundle = world.step(frame, believed);
    believed = bundle.true_pose;  // warmup trusts the pose; this is the initial knowledge
    const double vc = bundle.true_view_center;
    for (const PerceivedTile& tile :
         perceive(bundle, world.grid(), cfg.binning, vc)) {
      model.update_tile(tile.id, tile.histogram);
    }
  }
  return model;
}

TrialResult run_trial(const Config& cfg, ScenarioKind kind, bool switch_side,
                      std::uint64_t world_seed, std::uint64_t trial_seed, bool verbose) {
  cfg.validate();

  const Scenario scenario = cfg.make_scenario(kind, switch_side);
  World world(cfg.world, scenario, world_seed, trial_seed);
  const TileGrid& grid = world.grid();
  const CylinderParams& cyl = cfg.world.cylinder;

  BackgroundModel model =
      train_background(cfg, kind, switch_side, cfg.warmup_s, world_seed,
                       derive_seed(trial_seed, kWarmupStream));
  model.set_training_gate(false, GateReason::Manual, -1);

  RandomStream mcl_rng(derive_seed(trial_seed, kMclStream));
  RandomStream filter_rng(derive_seed(trial_seed, kFilterStream));

  const Pose2D true_start = world.true_start_pose();
  const Pose2D believed_start =
      scenario.init == InitMode::ReflectedPose ? reflect(true_start) : true_start;
  std::vector<SelfLocParticle> selfloc = init_at(believed_start, cfg.mcl, mcl_rng);
  std::vector<OrientationParticle> filter = init_uniform(cfg.filter, filter_rng);
  ConfidenceHistory history(cfg.confidence_window);
  BehaviourController controller(cfg.bc);

  const long duration = scenario.duration_frames;
  const long settle_frames = static_cast<long>(std::lround(cfg.settle_s * cfg.frame_rate));
  const long correctness_delay =
      static_cast<long>(std::lround(cfg.correctness_delay_s * cfg.frame_rate));

  std::string log;
  log.reserve(1 << 16);
  {
    json meta;
    meta["meta"] = {
        {"scenario", std::string(to_string(kind))},
        {"init", scenario.init == InitMode::ReflectedPose ? "reflected" : "correct"},
        {"switch_side", switch_side},
        {"world_seed", world_seed},
        {"trial_seed", trial_seed},
        {"frame_rate", cfg.frame_rate},
        {"duration_frames", duration},
        {"confidence_window", cfg.confidence_window},
        {"bc",
         {{"flip_margin", cfg.bc.flip_margin},
          {"purge_margin", cfg.bc.purge_margin},
          {"hold_frames", cfg.bc.hold_frames},
          {"cooldown_frames", cfg.bc.cooldown_frames},
          {"train_margin", cfg.bc.train_margin}}},
    };
    log += meta.dump();
    log += '\n';
  }

  TrialOutcome outcome;
  long first_signal_frame = -1;
  long stop_frame = duration;
  bool correctness_judged = false;
  double prev_head_yaw = 0.0;

  long frame = 0;
  for (; frame < stop_frame; ++frame) {
    const BestPose believed_prev = best_pose(selfloc, cfg.mcl.multimodal_threshold);
    const FrameBundle bundle = world.step(frame, believed_prev.pose);

    // Belief advanced by this frame's odometry; commands applied later do not
    // leak into the motion delta fed to the orientation filter.
    const Pose2D believed_now = integrate_odometry(believed_prev.pose, bundle.odometry);
    const double vc_now = believed_view_center(believed_now, bundle.head_yaw, cyl);
    const double vc_prev = believed_view_center(believed_prev.pose, prev_head_yaw, cyl);
    const double delta_view = angle_diff(vc_now, vc_prev);
    prev_head_yaw = bundle.head_yaw;

    const std::vector<PerceivedTile> perceived = perceive(bundle, grid, cfg.binning, vc_now);
    for (const PerceivedTile& tile : perceived) model.update_tile(tile.id, tile.histogram);

    predict(filter, delta_view, cfg.filter, filter_rng);
    weigh(filter, perceived, vc_now, model, cfg.filter, cfg.sigma0);
    try {
      resample_and_inject(filter, cfg.filter, filter_rng);
    } catch (const DegenerateWeights&) {
      filter = init_uniform(cfg.filter, filter_rng);
    }

    const ConfidencePair conf = pose_confidences(filter, vc_now, cfg.confidence_fov);
    history.push(conf);
    const ConfidencePair smoothed = history.smoothed();

    const BehaviourController::Decision decision =
        controller.decide(smoothed, believed_prev.multimodal, bundle.fall, frame);
    model.set_training_gate(decision.training_gate,
                            bundle.fall ? GateReason::Fall : GateReason::LowConfidence, frame);

    bool command_ignored = false;
    if (decision.command) {
      switch (decision.command->kind) {
        case CommandKind::FlipPose:
          flip_pose(selfloc);
          break;
        case CommandKind::PurgeReflection:
          try {
            purge_reflection(selfloc, believed_prev.pose, cfg.mcl.purge_radius, mcl_rng);
          } catch (const PurgeWouldEmpty&) {
            command_ignored = true;
          }
          break;
        case CommandKind::ResetOrientation:
          reset_orientation(selfloc, mcl_rng);
          break;
      }
      if (!outcome.first_signal_kind) {
        outcome.first_signal_kind = decision.command->kind;
        outcome.first_signal_time_s = frame / cfg.frame_rate;
      }
      if (first_signal_frame < 0 && (decision.command->kind == CommandKind::FlipPose ||
                                     decision.command->kind == CommandKind::PurgeReflection)) {
        first_signal_frame = frame;
        outcome.classification = decision.command->kind == CommandKind::FlipPose
                                     ? TrialOutcome::Classification::Flip
                                     : TrialOutcome::Classification::Purge;
        stop_frame = std::min(duration, frame + std::max(settle_frames, correctness_delay) + 1);
      }
    }

    mcl_step(selfloc, bundle.odometry, bundle.observations, cfg.world.map, cfg.mcl, mcl_rng);

    const BestPose believed_post = best_pose(selfloc, cfg.mcl.multimodal_threshold);
    if (first_signal_frame >= 0 && !correctness_judged &&
        (frame >= first_signal_frame + correctness_delay || frame == stop_frame - 1)) {
      outcome.correct_after_signal = pose_distance(believed_post.pose, bundle.true_pose) <
                                     pose_distance(believed_post.pose, reflect(bundle.true_pose));
      correctness_judged = true;
    }

    json line = {
        {"frame", frame},
        {"t", frame / cfg.frame_rate},
        {"true", pose_json(bundle.true_pose)},
        {"est", pose_json(believed_post.pose)},
        {"mm", believed_post.multimodal},
        {"vc_true", bundle.true_view_center},
        {"vc_bel", vc_now},
        {"conf", json::array({conf.current, conf.reflected})},
        {"sm", json::array({smoothed.current, smoothed.reflected})},
        {"gate", decision.training_gate},
        {"fall", bundle.fall},
    };
    if (decision.command) {
      line["cmd"] = std::string(to_string(decision.command->kind));
      if (command_ignored) line["cmd_ignored"] = true;
    } else {
      line["cmd"] = nullptr;
    }
    if (verbose) {
      json parts = json::array();
      for (const OrientationParticle& p : filter) parts.push_back({p.azimuth, p.weight});
      line["particles"] = std::move(parts);
    }
    log += line.dump();
    log += '\n';

    if (frame == stop_frame - 1) {
      outcome.final_pos_error =
          std::hypot(believed_post.pose.x - bundle.true_pose.x,
                     believed_post.pose.y - bundle.true_pose.y);
      outcome.final_heading_error =
          std::abs(angle_diff(believed_post.pose.heading, bundle.true_pose.heading));
      outcome.correct_at_end = pose_distance(believed_post.pose, bundle.true_pose) <
                               pose_distance(believed_post.pose, reflect(bundle.true_pose));
    }
  }
  outcome.frames_run = frame;

  {
    json summary;
    summary["summary"] = {
        {"classification", std::string(to_string(outcome.classification))},
        {"first_signal",
         outcome.first_signal_kind
             ? json(std::string(to_string(*outcome.first_signal_kind)))
             : json(nullptr)},
        {"first_signal_t", outcome.first_signal_time_s},
        {"correct_after_signal", outcome.correct_after_signal},
        {"final_pos_error", outcome.final_pos_error},
        {"final_heading_error", outcome.final_heading_error},
        {"frames_run", outcome.frames_run},
        {"model_version", model.version()},
        {"model_dropped_updates", model.dropped_updates()},
    };
    log += summary.dump();
    log += '\n';
  }

  return {outcome, std::move(log), model.snapshot()};
}

TrialResult run_trial(const Config& cfg, std::uint64_t master_seed) {
  const ScenarioKind kind = cfg.scenarios.empty() ? ScenarioKind::HeadOnly : cfg.scenarios.front();
  return run_trial(cfg, kind, false, derive_seed(master_seed, 0, 0, kWorldSeedTag),
                   derive_seed(master_seed, 0, 0, kTrialSeedTag));
}

double ScenarioRow::mean_time_s() const {
  const int n = signaled();
  if (n == 0) return -1.0;
  return static_cast<double>(flip_frames_sum + purge_frames_sum) / (frame_rate * n);
}

double ScenarioRow::mean_time_flip_s() const {
  if (flip == 0) return -1.0;
  return static_cast<double>(flip_frames_sum) / (frame_rate * flip);
}

double ScenarioRow::mean_time_purge_s() const {
  if (purge == 0) return -1.0;
  return static_cast<double>(purge_frames_sum) / (frame_rate * purge);
}

std::string ExperimentReport::to_csv() const {
  std::string out =
      "scenario,trials,flip,purge,failed,correct_after,flip_frames_sum,purge_frames_sum,"
      "frame_rate,flip_pct,purge_pct,failed_pct,mean_time_s,mean_time_flip_s,"
      "mean_time_purge_s,correct_pct\n";
  char buf[512];
  for (const ScenarioRow& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%d,%d,%d,%d,%d,%ld,%ld,%.17g,%.1f,%.1f,%.1f,%.2f,%.2f,%.2f,%.1f\n",
                  r.scenario.c_str(), r.trials, r.flip, r.purge, r.failed, r.correct_after,
                  r.flip_frames_sum, r.purge_frames_sum, r.frame_rate, r.flip_pct(),
                  r.purge_pct(), r.failed_pct(), r.mean_time_s(), r.mean_time_flip_s(),
                  r.mean_time_purge_s(), r.correct_pct());
    out += buf;
  }
  return out;
}

ExperimentReport ExperimentReport::from_csv(std::string_view text) {
  ExperimentReport report;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty csv");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    ScenarioRow r;
    auto next = [&row, &field]() -> std::string& {
      if (!std::getline(row, field, ',')) throw ConfigError("short csv row");
      return field;
    };
    r.scenario = next();
    r.trials = std::stoi(next());
    r.flip = std::stoi(next());
    r.purge = std::stoi(next());
    r.failed = std::stoi(next());
    r.correct_after = std::stoi(next());
    r.flip_frames_sum = std::stol(next());
    r.purge_frames_sum = std::stol(next());
    r.frame_rate = std::stod(next());
    report.rows.push_back(std::move(r));
  }
  return report;
}

ExperimentReport run_experiment(const Config& cfg, const std::string& out_dir,
                                std::uint64_t master_seed, bool verbose, bool save_models) {
  cfg.validate();
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  ExperimentReport report;
  for (std::size_t kind_idx = 0; kind_idx < cfg.scenarios.size(); ++kind_idx) {
    const ScenarioKind kind = cfg.scenarios[kind_idx];
    const int trials = cfg.trials_for(kind);
    if (trials < 2 || trials % 2 != 0) {
      throw ConfigError("trial count per scenario must be even and >= 2");
    }
    const int half = trials / 2;

    std::vector<std::future<TrialResult>> futures(trials);
    const unsigned hw = std::thread::hardware_concurrency();
    const int jobs = cfg.jobs > 0 ? cfg.jobs : static_cast<int>(hw > 0 ? hw : 4);

    std::vector<TrialResult> results(trials);
    for (int base = 0; base < trials; base += jobs) {
      const int end = std::min(trials, base + jobs);
      for (int i = base; i < end; ++i) {
        // Paired seeds: trial i and i+half share streams and differ only in
        // the side switch.
        const int pair = i % half;
        const bool switch_side = i >= half;
        const std::uint64_t world_seed = derive_seed(master_seed, kind_idx, pair, kWorldSeedTag);
        const std::uint64_t trial_seed = derive_seed(master_seed, kind_idx, pair, kTrialSeedTag);
        futures[i] = std::async(std::launch::async, [&cfg, kind, switch_side, world_seed,
                                                     trial_seed, verbose] {
          return run_trial(cfg, kind, switch_side, world_seed, trial_seed, verbose);
        });
      }
      for (int i = base; i < end; ++i) results[i] = futures[i].get();
    }

    ScenarioRow row;
    row.scenario = std::string(to_string(kind));
    if (cfg.init == InitMode::CorrectPose) row.scenario += "-control";
    row.frame_rate = cfg.frame_rate;
    row.trials = trials;
    for (int i = 0; i < trials; ++i) {
      const TrialOutcome& o = results[i].outcome;
      const long signal_frames = static_cast<long>(std::lround(o.first_signal_time_s * cfg.frame_rate));
      switch (o.classification) {
        case TrialOutcome::Classification::Flip:
          ++row.flip;
          row.flip_frames_sum += signal_frames;
          break;
        case TrialOutcome::Classification::Purge:
          ++row.purge;
          row.purge_frames_sum += signal_frames;
          break;
        case TrialOutcome::Classification::Failed:
          ++row.failed;
          break;
      }
      if (o.classification != TrialOutcome::Classification::Failed && o.correct_after_signal) {
        ++row.correct_after;
      }
      if (!out_dir.empty()) {
        std::ostringstream name;
        name << "trial_" << to_string(kind) << "_" << i;
        std::ofstream f(std::filesystem::path(out_dir) / (name.str() + ".jsonl"),
                        std::ios::binary);
        f << results[i].log;
        if (save_models) {
          std::ofstream m(std::filesystem::path(out_dir) / (name.str() + ".bgm"),
                          std::ios::binary);
          m << results[i].model_snapshot;
        }
      }
    }
    report.rows.push_back(std::move(row));
  }

  if (!out_dir.empty()) {
    std::ofstream f(std::filesystem::path(out_dir) / "report.csv", std::ios::binary);
    f << report.to_csv();
  }
  return report;
}

ReplayCheck replay_log(const std::string& log_text) {
  ReplayCheck check;
  std::istringstream in(log_text);
  std::string line;

  int window = 15;
  ControllerConfig bc;
  bool have_meta = false;

  std::unique_ptr<ConfidenceHistory> history;
  std::unique_ptr<BehaviourController> controller;
  bool commands_ok = true;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (j.contains("meta")) {
      const json& meta = j["meta"];
      window = meta.value("confidence_window", 15);
      const json& b = meta["bc"];
      bc.flip_margin = b["flip_margin"];
      bc.purge_margin = b["purge_margin"];
      bc.hold_frames = b["hold_frames"];
      bc.cooldown_frames = b["cooldown_frames"];
      bc.train_margin = b["train_margin"];
      history = std::make_unique<ConfidenceHistory>(window);
      controller = std::make_unique<BehaviourController>(bc);
      have_meta = true;
      continue;
    }
    if (j.contains("summary") || !have_meta) continue;

    ++check.frames;
    const ConfidencePair conf{j["conf"][0], j["conf"][1]};
    history->push(conf);
    const ConfidencePair smoothed = history->smoothed();
    check.max_smoothed_deviation =
        std::max({check.max_smoothed_deviation,
                  std::abs(smoothed.current - double(j["sm"][0])),
                  std::abs(smoothed.reflected - double(j["sm"][1]))});

    const BehaviourController::Decision decision =
        controller->decide(smoothed, j["mm"], j["fall"], j["frame"]);
    const bool logged_cmd = !j["cmd"].is_null();
    if (logged_cmd != decision.command.has_value()) {
      commands_ok = false;
    } else if (decision.command &&
               std::string(j["cmd"]) != std::string(to_string(decision.command->kind))) {
      commands_ok = false;
    }
    if (logged_cmd) ++check.commands;
  }
  check.commands_match = commands_ok && have_meta;
  return check;
}

}  // namespace roomaware
