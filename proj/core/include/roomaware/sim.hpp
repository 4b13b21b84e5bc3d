#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "roomaware/colour.hpp"
#include "roomaware/geometry.hpp"
#include "roomaware/rng.hpp"
#include "roomaware/selfloc.hpp"

namespace roomaware {

// A coloured rectangle on the wall, in azimuth/height extents.
struct TexturePatch {
  double azimuth_begin = 0.0;  // [0, 2*pi)
  double azimuth_end = 0.0;
  double z_begin = 0.0;
  double z_end = 0.0;
  PixelYCrCb colour;
};

enum class TextureMode {
  Asymmetric,  // patches drawn per seed; the realistic room
  Periodic,    // texture forced to satisfy texture(a) = texture(a + pi) exactly
};

struct WorldSpec {
  double field_length = 6.0;
  double field_width = 4.0;
  CylinderParams cylinder;
  CameraModel camera;
  FieldMap map = FieldMap::standard();

  TextureMode texture_mode = TextureMode::Asymmetric;
  int patch_count = 12;
  double texture_noise_std = 3.0;  // chroma noise frozen into the panorama
  double sample_noise_std = 4.0;   // chroma noise per rendered pixel sample
  int pixels_per_tile = 64;

  double obs_range_std = 0.10;
  double obs_bearing_std = 0.03;
  double obs_max_range = 8.0;
  double odo_xy_std = 0.004;       // per frame
  double odo_heading_std = 0.003;  // per frame
};

enum class ScenarioKind { HeadOnly, PenaltyWalk };
enum class InitMode { CorrectPose, ReflectedPose };

std::string_view to_string(ScenarioKind kind);

struct Scenario {
  ScenarioKind kind = ScenarioKind::HeadOnly;
  int duration_frames = 2000;
  InitMode init = InitMode::ReflectedPose;
  double frame_rate = 10.0;

  double head_amplitude = deg_to_rad(60.0);
  double head_rate = deg_to_rad(20.0);  // rad/s
  double walk_speed = 0.15;             // m/s
  double turn_rate = 1.0;               // rad/s cap
  double target_reach_tol = 0.25;       // believed distance that switches targets
  double body_spin_rate = 0.0;          // rad/s; spins in place instead of walking

  Pose2D head_only_start{-1.0, -1.8, kPi / 2.0};
  bool switch_side = false;  // start from the point-reflected true pose
  std::vector<double> fall_times_s;  // motion freezes 2 s, then the fall flag fires
};

// Deterministic wall panorama: patches over a base colour plus frozen
// per-texel chroma noise. In Periodic mode the second half is a copy of the
// first, so texture(a) == texture(a + pi) holds texel-exactly.
class PanoramaTexture {
 public:
  static PanoramaTexture synthesize(const WorldSpec& spec, std::uint64_t seed);

  PixelYCrCb sample(double azimuth, double z) const;
  int width() const { return width_; }
  int height() const { return height_; }

  // Binary PPM (P6) with chroma converted back to RGB for inspection.
  void write_ppm(std::ostream& out) const;

 private:
  int width_ = 0, height_ = 0;
  double z_min_ = 0.0, z_max_ = 1.0;
  std::vector<PixelYCrCb> texels_;
};

PanoramaTexture synthesize_background(const WorldSpec& spec, std::uint64_t seed);

// k pixels drawn uniformly over the tile's wall area; texture colour plus
// gaussian chroma noise, clamped to channel range.
std::vector<PixelYCrCb> render_tile_samples(const ViewPose& true_view, TileId tile,
                                            const PanoramaTexture& texture, const TileGrid& grid,
                                            double noise_std, int k, RandomStream& rng);

struct TileSampleSet {
  TileId id;
  std::vector<PixelYCrCb> pixels;
};

// Everything the world emits for one frame.
struct FrameBundle {
  Pose2D true_pose;
  Odometry odometry;  // noisy body-frame delta
  double head_yaw = 0.0;
  bool fall = false;
  double true_view_center = 0.0;
  std::vector<LandmarkObservation> observations;
  std::vector<TileSampleSet> tile_samples;  // physical (true-frame) tile ids
};

// Per-trial world state. A trial is a pure function of (spec, scenario,
// world_seed, trial_seed): the same inputs replay the same frames.
class World {
 public:
  World(const WorldSpec& spec, const Scenario& scenario, std::uint64_t world_seed,
        std::uint64_t trial_seed);

  // Advance truth by one frame and render its sensor bundle. The believed
  // pose closes the loop for scenarios that steer by self-localization.
  FrameBundle step(long frame, const Pose2D& believed_pose);

  Pose2D true_start_pose() const { return start_; }
  const Pose2D& true_pose() const { return true_pose_; }
  const PanoramaTexture& texture() const { return texture_; }
  const TileGrid& grid() const { return grid_; }
  const WorldSpec& spec() const { return spec_; }
  const Scenario& scenario() const { return scenario_; }

 private:
  double head_yaw_at(double t) const;
  Odometry walk_command(const Pose2D& believed, double dt);
  std::vector<LandmarkObservation> observe(const ViewPose& view, RandomStream& rng) const;

  WorldSpec spec_;
  Scenario scenario_;
  TileGrid grid_;
  PanoramaTexture texture_;
  std::uint64_t trial_seed_;
  Pose2D start_;
  Pose2D true_pose_;
  double prev_head_yaw_ = 0.0;
  int walk_target_ = 1;
  std::size_t next_fall_ = 0;
  long frozen_until_ = -1;
  long fall_flag_frame_ = -1;
};

}  // namespace roomaware
