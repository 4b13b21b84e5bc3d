#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "roomaware/colour.hpp"
#include "roomaware/geometry.hpp"

namespace roomaware {

enum class GateReason { Fall, Penalty, LowConfidence, Manual };

struct GateEvent {
  long frame = 0;
  bool enabled = false;
  GateReason reason = GateReason::Manual;
};

// One colour-histogram model per wall tile, trained online with the
// moving-average rule
//   mu'     = (N*mu + x) / (N+1)
//   sigma2' = (N*sigma2 + (N/(N+1))*(mu - x)^2) / (N+1)
// with a fixed smoothing parameter N. A tile seen for the first time copies
// the perception. Updates are accepted only while the training gate is open;
// gated-off updates are dropped and counted, not an error.
class BackgroundModel {
 public:
  explicit BackgroundModel(const TileGrid& grid, int n_param = 20);

  // Snapshot understood by load(); `version` is bumped per accepted update.
  static constexpr std::string_view kMagic = "BGM1";

  void update_tile(TileId id, const ColourHistogram& perceived);

  // Idempotent; logs a gate event only when the state changes.
  void set_training_gate(bool enabled, GateReason reason, long frame);

  bool training_enabled() const { return training_enabled_; }
  std::int64_t version() const { return version_; }
  std::int64_t dropped_updates() const { return dropped_updates_; }
  int n_param() const { return n_param_; }
  const TileGrid& grid() const { return grid_; }
  const std::vector<GateEvent>& gate_log() const { return gate_log_; }

  const ColourHistogramModel& tile(TileId id) const { return tiles_[grid_.index_of(id)]; }
  int seen_count() const;

  // Text snapshot; load(snapshot()) reproduces the model bit-exactly.
  // The gate event log is runtime-only and not serialized.
  std::string snapshot() const;
  static BackgroundModel load(std::string_view bytes);

  bool operator==(const BackgroundModel& o) const;

 private:
  TileGrid grid_;
  std::vector<ColourHistogramModel> tiles_;
  int n_param_;
  bool training_enabled_ = true;
  std::int64_t version_ = 0;
  std::int64_t dropped_updates_ = 0;
  std::vector<GateEvent> gate_log_;
};

}  // namespace roomaware
