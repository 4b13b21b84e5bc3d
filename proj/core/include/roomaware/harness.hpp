#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roomaware/background_model.hpp"
#include "roomaware/config.hpp"

namespace roomaware {

struct TrialOutcome {
  enum class Classification { Flip, Purge, Failed };

  std::optional<CommandKind> first_signal_kind;
  double first_signal_time_s = -1.0;
  Classification classification = Classification::Failed;
  bool correct_after_signal = false;
  bool correct_at_end = false;  // dominant pose closer to truth than to its reflection
  double final_pos_error = 0.0;
  double final_heading_error = 0.0;
  long frames_run = 0;
};

std::string_view to_string(TrialOutcome::Classification c);

struct TrialResult {
  TrialOutcome outcome;
  std::string log;  // JSON lines, one object per frame plus meta and summary
  std::string model_snapshot;  // post-trial background model (.bgm format)
};

// One Table-style row per scenario. Derived figures are computed from the
// raw counts, so a parsed CSV reproduces them exactly.
struct ScenarioRow {
  std::string scenario;
  int trials = 0;
  int flip = 0;
  int purge = 0;
  int failed = 0;
  int correct_after = 0;        // signaled trials judged correct afterwards
  long flip_frames_sum = 0;     // summed time-to-signal of flip-first trials
  long purge_frames_sum = 0;
  double frame_rate = 10.0;

  int signaled() const { return flip + purge; }
  double flip_pct() const { return trials ? 100.0 * flip / trials : 0.0; }
  double purge_pct() const { return trials ? 100.0 * purge / trials : 0.0; }
  double failed_pct() const { return trials ? 100.0 * failed / trials : 0.0; }
  double correct_pct() const { return signaled() ? 100.0 * correct_after / signaled() : 0.0; }
  // Failed trials carry no time; they are excluded from the means.
  double mean_time_s() const;
  double mean_time_flip_s() const;
  double mean_time_purge_s() const;

  bool operator==(const ScenarioRow&) const = default;
};

struct ExperimentReport {
  std::vector<ScenarioRow> rows;

  std::string to_csv() const;
  static ExperimentReport from_csv(std::string_view text);
  bool operator==(const ExperimentReport&) const = default;
};

// Warmup training pass: the robot runs the scenario at its true pose with the
// training gate forced open, and the learned background model is returned.
BackgroundModel train_background(const Config& cfg, ScenarioKind kind, bool switch_side,
                                 double seconds, std::uint64_t world_seed,
                                 std::uint64_t warmup_seed);

// One full trial: warmup, wrong-side (or correct-side) initialization, then
// the per-frame pipeline until the duration cap or shortly after the first
// behaviour-controller signal.
TrialResult run_trial(const Config& cfg, ScenarioKind kind, bool switch_side,
                      std::uint64_t world_seed, std::uint64_t trial_seed, bool verbose = false);

// Convenience overload matching the CLI surface: scenario list and trial
// counts come from the config, seeds derive from `master_seed`.
TrialResult run_trial(const Config& cfg, std::uint64_t master_seed);

// Seeded trial batch per scenario, half the trials side-switched; writes
// report.csv and per-trial logs into out_dir (unless out_dir is empty).
// `save_models` additionally writes each trial's final .bgm snapshot.
ExperimentReport run_experiment(const Config& cfg, const std::string& out_dir,
                                std::uint64_t master_seed, bool verbose = false,
                                bool save_models = false);

// Re-derives smoothed confidences and controller decisions from a trial log
// and checks them against the recorded values.
struct ReplayCheck {
  long frames = 0;
  int commands = 0;
  double max_smoothed_deviation = 0.0;
  bool commands_match = false;
  bool ok() const { return commands_match && max_smoothed_deviation <= 1e-9; }
};

ReplayCheck replay_log(const std::string& log_text);

}  // namespace roomaware
