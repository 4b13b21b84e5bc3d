#include "roomaware/controller.hpp"

namespace roomaware {

std::string_view to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::FlipPose: return "flip_pose";
    case CommandKind::PurgeReflection: return "purge_reflection";
    case CommandKind::ResetOrientation: return "reset_orientation";
  }
  return "?";
}

BehaviourController::Decision BehaviourController::decide(const ConfidencePair& smoothed,
                                                          bool selfloc_multimodal, bool fall,
                                                          long frame) {
  Decision out;
  const double lead = smoothed.current - smoothed.reflected;
  const bool in_cooldown = cooldown_left_ > 0;

  if (fall) {
    // Forced by the internal sensors; bypasses hold and cooldown.
    out.command = BCCommand{CommandKind::ResetOrientation, frame};
    cooldown_left_ = cfg_.cooldown_frames;
    flip_streak_ = purge_streak_ = 0;
    fall_latch_ = true;
  } else if (in_cooldown) {
    --cooldown_left_;
    flip_streak_ = purge_streak_ = 0;
  } else {
    if (-lead > cfg_.flip_margin) {
      ++flip_streak_;
    } else {
      flip_streak_ = 0;
    }
    if (lead > cfg_.purge_margin && selfloc_multimodal) {
      ++purge_streak_;
    } else {
      purge_streak_ = 0;
    }

    if (flip_streak_ >= cfg_.hold_frames) {
      out.command = BCCommand{CommandKind::FlipPose, frame};
    } else if (purge_streak_ >= cfg_.hold_frames) {
      out.command = BCCommand{CommandKind::PurgeReflection, frame};
    }
    if (out.command) {
      cooldown_left_ = cfg_.cooldown_frames;
      flip_streak_ = purge_streak_ = 0;
      fall_latch_ = false;  // a reorientation command confirms the new belief
    }
  }

  const bool margin_ok = lead > cfg_.train_margin;
  // Confidences on the fall frame itself predate the reset; the latch only
  // releases on a later confirming frame.
  if (!fall && fall_latch_ && margin_ok) fall_latch_ = false;
  out.training_gate = margin_ok && !in_cooldown && !out.command && !fall_latch_;
  return out;
}

void BehaviourController::reset() {
  flip_streak_ = purge_streak_ = 0;
  cooldown_left_ = 0;
  fall_latch_ = false;
}

}  // namespace roomaware
