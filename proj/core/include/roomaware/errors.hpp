#pragma once

#include <stdexcept>
#include <string>

namespace roomaware {

// Building a histogram from zero pixels; the caller is expected to skip the tile.
struct EmptyTileSample : std::runtime_error {
  EmptyTileSample() : std::runtime_error("histogram requested for an empty pixel sample") {}
};

// Similarity queried against a tile that was never trained.
struct UnseenTile : std::runtime_error {
  UnseenTile() : std::runtime_error("similarity against an unseen model tile") {}
};

// Malformed or incompatible background-model snapshot.
struct ModelFormat : std::runtime_error {
  explicit ModelFormat(const std::string& what) : std::runtime_error("model format: " + what) {}
};

// Resampling requested while every particle weight is zero.
struct DegenerateWeights : std::runtime_error {
  DegenerateWeights() : std::runtime_error("all particle weights are zero") {}
};

// Purge would delete the entire particle set; the command must be ignored.
struct PurgeWouldEmpty : std::runtime_error {
  PurgeWouldEmpty() : std::runtime_error("purge would remove all particles") {}
};

// Invalid configuration value or file.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error("config: " + what) {}
};

}  // namespace roomaware
