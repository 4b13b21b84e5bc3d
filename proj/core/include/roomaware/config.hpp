#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "roomaware/colour.hpp"
#include "roomaware/confidence.hpp"
#include "roomaware/controller.hpp"
#include "roomaware/orientation_filter.hpp"
#include "roomaware/selfloc.hpp"
#include "roomaware/sim.hpp"

namespace roomaware {

// Everything a trial needs, assembled from defaults plus a flat key=value
// file ('#' starts a comment). Unknown keys are rejected.
struct Config {
  BinningConfig binning;
  double sigma0 = 1e-3;

  WorldSpec world;  // cylinder, camera, field map, texture and noise settings

  int n_param = 20;
  OrientationFilterConfig filter;

  double confidence_fov = deg_to_rad(60.0);
  int confidence_window = 15;

  ControllerConfig bc;
  MclConfig mcl;

  double frame_rate = 10.0;
  double duration_s = 200.0;
  InitMode init = InitMode::ReflectedPose;
  std::vector<ScenarioKind> scenarios = {ScenarioKind::HeadOnly, ScenarioKind::PenaltyWalk};
  int trials_head_only = 20;
  int trials_penalty_walk = 10;

  double warmup_s = 60.0;
  double settle_s = 5.0;             // trial keeps running this long after the first signal
  double correctness_delay_s = 3.0;  // post-signal correctness is judged after this delay
  int jobs = 0;                      // 0: hardware concurrency

  static Config defaults() { return {}; }
  static Config from_file(const std::string& path);
  static Config from_string(std::string_view text);

  // One key=value assignment; throws ConfigError for unknown keys/bad values.
  void apply(std::string_view key, std::string_view value);

  // Cross-field validation; throws ConfigError. Called before any simulation.
  void validate() const;

  Scenario make_scenario(ScenarioKind kind, bool switch_side) const;
  int trials_for(ScenarioKind kind) const;
};

}  // namespace roomaware
