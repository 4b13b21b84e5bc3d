#pragma once

#include <span>
#include <vector>

#include "roomaware/background_model.hpp"
#include "roomaware/colour.hpp"
#include "roomaware/geometry.hpp"
#include "roomaware/rng.hpp"

namespace roomaware {

// View-center hypothesis on the cylinder wall.
struct OrientationParticle {
  double azimuth = 0.0;  // wrapped to [-pi, pi)
  double weight = 1.0;
};

struct OrientationFilterConfig {
  int particle_count = 200;
  double motion_noise_std = 0.03;  // rad per frame
  double inject_fraction = 0.05;
  double weight_floor = 0.01;  // epsilon
  double cluster_window = 0.35;

  bool valid() const {
    return particle_count >= 10 && inject_fraction >= 0.0 && inject_fraction < 0.5 &&
           weight_floor > 0.0 && motion_noise_std >= 0.0 && cluster_window > 0.0;
  }
};

struct ClusterEstimate {
  double center = 0.0;  // circular mean
  double spread = 0.0;  // circular std, clamped to pi
  double mass = 0.0;    // weighted fraction within cluster_window of center
};

// One perceived wall tile, addressed in the believed frame.
struct PerceivedTile {
  TileId id;
  ColourHistogram histogram;
};

std::vector<OrientationParticle> init_uniform(const OrientationFilterConfig& cfg,
                                              RandomStream& rng);

// Shift every hypothesis by the believed view-center change plus white noise.
void predict(std::vector<OrientationParticle>& particles, double delta_view,
             const OrientationFilterConfig& cfg, RandomStream& rng);

// Re-address each perceived tile by the particle's offset from the believed
// view center and score it against the model. Per-particle multiplier is the
// geometric mean over matched seen tiles of (epsilon + similarity); epsilon
// alone when no seen tile matches. Empty perception leaves weights unchanged.
void weigh(std::vector<OrientationParticle>& particles, std::span<const PerceivedTile> perceived,
           double believed_view_center, const BackgroundModel& model,
           const OrientationFilterConfig& cfg, double sigma0);

// Systematic resampling of (1 - inject_fraction) of the set; the rest is
// injected around the best-weighted azimuth. Weights reset to uniform.
// Throws DegenerateWeights when the total weight is zero.
void resample_and_inject(std::vector<OrientationParticle>& particles,
                         const OrientationFilterConfig& cfg, RandomStream& rng);

ClusterEstimate cluster_center(std::span<const OrientationParticle> particles,
                               const OrientationFilterConfig& cfg);

}  // namespace roomaware
