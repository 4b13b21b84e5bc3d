#pragma once

#include <optional>
#include <string_view>

#include "roomaware/confidence.hpp"

namespace roomaware {

enum class CommandKind { FlipPose, PurgeReflection, ResetOrientation };

std::string_view to_string(CommandKind kind);

struct BCCommand {
  CommandKind kind;
  long frame = 0;
};

struct ControllerConfig {
  double flip_margin = 0.25;
  double purge_margin = 0.25;
  int hold_frames = 10;
  int cooldown_frames = 30;
  double train_margin = 0.15;

  bool valid() const {
    return flip_margin > 0.0 && flip_margin < 1.0 && purge_margin > 0.0 && purge_margin < 1.0 &&
           train_margin > 0.0 && train_margin < 1.0 && hold_frames >= 1 &&
           cooldown_frames >= hold_frames;
  }
};

// Frame-by-frame policy over smoothed confidences:
//  - a fall triggers ResetOrientation immediately and latches training off,
//  - reflected winning by flip_margin for hold_frames triggers FlipPose,
//  - current winning by purge_margin for hold_frames while the
//    self-localization is multimodal triggers PurgeReflection,
//  - after any command a cooldown suppresses further commands and the
//    condition streaks restart from zero.
// The training gate is open iff current - reflected > train_margin, no
// cooldown is active and no fall latch is pending.
class BehaviourController {
 public:
  explicit BehaviourController(const ControllerConfig& cfg) : cfg_(cfg) {}

  struct Decision {
    std::optional<BCCommand> command;
    bool training_gate = false;
  };

  Decision decide(const ConfidencePair& smoothed, bool selfloc_multimodal, bool fall, long frame);

  void reset();
  const ControllerConfig& config() const { return cfg_; }
  bool fall_latch() const { return fall_latch_; }

 private:
  ControllerConfig cfg_;
  int flip_streak_ = 0;
  int purge_streak_ = 0;
  int cooldown_left_ = 0;
  bool fall_latch_ = false;
};

}  // namespace roomaware
