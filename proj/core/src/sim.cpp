#include "roomaware/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace roomaware {

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::HeadOnly: return "head-only";
    case ScenarioKind::PenaltyWalk: return "penalty-walk";
  }
  return "?";
}

namespace {

constexpr std::uint64_t kOdometryStream = 1;
constexpr std::uint64_t kObservationStream = 2;
constexpr std::uint64_t kTileStream = 3;
constexpr std::uint64_t kFallStream = 4;

int clamp255(double v) { return static_cast<int>(std::clamp(std::lround(v), 0L, 255L)); }

PixelYCrCb add_chroma_noise(PixelYCrCb c, double std, RandomStream& rng) {
  if (std > 0.0) {
    c.cr = clamp255(c.cr + rng.gaussian(std));
    c.cb = clamp255(c.cb + rng.gaussian(std));
  }
  return c;
}

}  // namespace

PanoramaTexture PanoramaTexture::synthesize(const WorldSpec& spec, std::uint64_t seed) {
  PanoramaTexture tex;
  const CylinderParams& cyl = spec.cylinder;
  tex.width_ = cyl.cols * 20;
  if (tex.width_ % 2 != 0) ++tex.width_;  // periodic mode mirrors half the raster
  tex.height_ = cyl.rows * 32;
  tex.z_min_ = cyl.z_min;
  tex.z_max_ = cyl.z_max;

  RandomStream rng(derive_seed(seed, 0xBA5E));

  const PixelYCrCb base{120, clamp255(128 + rng.uniform(-12.0, 12.0)),
                        clamp255(128 + rng.uniform(-12.0, 12.0))};
  tex.texels_.assign(static_cast<std::size_t>(tex.width_) * tex.height_, base);

  const bool periodic = spec.texture_mode == TextureMode::Periodic;
  const double span = periodic ? kPi : kTwoPi;

  std::vector<TexturePatch> patches;
  for (int i = 0; i < spec.patch_count; ++i) {
    TexturePatch p;
    const double width = rng.uniform(0.25, 0.7);
    p.azimuth_begin = rng.uniform(0.0, span);
    p.azimuth_end = p.azimuth_begin + width;
    if (rng.uniform() < 0.6) {
      p.z_begin = cyl.z_min;
      p.z_end = cyl.z_max;
    } else {
      const double band = (cyl.z_max - cyl.z_min) / 2.0;
      p.z_begin = cyl.z_min + (rng.uniform() < 0.5 ? 0.0 : band);
      p.z_end = p.z_begin + band;
    }
    const double hue = rng.uniform(0.0, kTwoPi);
    const double mag = rng.uniform(50.0, 100.0);
    p.colour = {clamp255(rng.uniform(80.0, 200.0)), clamp255(128.0 + mag * std::cos(hue)),
                clamp255(128.0 + mag * std::sin(hue))};
    patches.push_back(p);
  }

  const int paint_width = periodic ? tex.width_ / 2 : tex.width_;
  const double az_per_texel = span / paint_width;
  for (const TexturePatch& p : patches) {
    const int x0 = static_cast<int>(std::floor(p.azimuth_begin / az_per_texel));
    const int x1 = static_cast<int>(std::ceil(p.azimuth_end / az_per_texel));
    const double dz = (tex.z_max_ - tex.z_min_) / tex.height_;
    int y0 = static_cast<int>(std::floor((p.z_begin - tex.z_min_) / dz));
    int y1 = static_cast<int>(std::ceil((p.z_end - tex.z_min_) / dz));
    y0 = std::clamp(y0, 0, tex.height_);
    y1 = std::clamp(y1, 0, tex.height_);
    for (int x = x0; x < x1; ++x) {
      const int col = ((x % paint_width) + paint_width) % paint_width;  // patches may wrap
      for (int y = y0; y < y1; ++y) {
        tex.texels_[static_cast<std::size_t>(y) * tex.width_ + col] = p.colour;
      }
    }
  }

  // Frozen texel noise; drawn for the painted half only, so periodic
  // textures stay periodic texel-for-texel.
  for (int y = 0; y < tex.height_; ++y) {
    for (int x = 0; x < paint_width; ++x) {
      PixelYCrCb& t = tex.texels_[static_cast<std::size_t>(y) * tex.width_ + x];
      t = add_chroma_noise(t, spec.texture_noise_std, rng);
    }
  }
  if (periodic) {
    for (int y = 0; y < tex.height_; ++y) {
      for (int x = 0; x < paint_width; ++x) {
        tex.texels_[static_cast<std::size_t>(y) * tex.width_ + paint_width + x] =
            tex.texels_[static_cast<std::size_t>(y) * tex.width_ + x];
      }
    }
  }
  return tex;
}

PixelYCrCb PanoramaTexture::sample(double azimuth, double z) const {
  const double a = wrap_two_pi(azimuth);
  int x = static_cast<int>(a / kTwoPi * width_);
  x = std::clamp(x, 0, width_ - 1);
  const double rel = (z - z_min_) / (z_max_ - z_min_);
  int y = static_cast<int>(rel * height_);
  y = std::clamp(y, 0, height_ - 1);
  return texels_[static_cast<std::size_t>(y) * width_ + x];
}

void PanoramaTexture::write_ppm(std::ostream& out) const {
  out << "P6\n" << width_ << ' ' << height_ << "\n255\n";
  for (int y = height_ - 1; y >= 0; --y) {  // top of the wall first
    for (int x = 0; x < width_; ++x) {
      const PixelYCrCb& c = texels_[static_cast<std::size_t>(y) * width_ + x];
      const double cr = c.cr - 128.0;
      const double cb = c.cb - 128.0;
      const unsigned char rgb[3] = {
          static_cast<unsigned char>(clamp255(c.y + 1.402 * cr)),
          static_cast<unsigned char>(clamp255(c.y - 0.344136 * cb - 0.714136 * cr)),
          static_cast<unsigned char>(clamp255(c.y + 1.772 * cb)),
      };
      out.write(reinterpret_cast<const char*>(rgb), 3);
    }
  }
}

PanoramaTexture synthesize_background(const WorldSpec& spec, std::uint64_t seed) {
  return PanoramaTexture::synthesize(spec, seed);
}

std::vector<PixelYCrCb> render_tile_samples([[maybe_unused]] const ViewPose& true_view,
                                            TileId tile, const PanoramaTexture& texture,
                                            const TileGrid& grid, double noise_std, int k,
                                            RandomStream& rng) {
  const auto [a_lo, a_hi] = grid.col_span(tile.col);
  const auto [z_lo, z_hi] = grid.row_span(tile.row);
  std::vector<PixelYCrCb> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    const double az = rng.uniform(a_lo, a_hi);
    const double z = rng.uniform(z_lo, z_hi);
    out.push_back(add_chroma_noise(texture.sample(az, z), noise_std, rng));
  }
  return out;
}

World::World(const WorldSpec& spec, const Scenario& scenario, std::uint64_t world_seed,
             std::uint64_t trial_seed)
    : spec_(spec),
      scenario_(scenario),
      grid_(spec.cylinder),
      texture_(PanoramaTexture::synthesize(spec, world_seed)),
      trial_seed_(trial_seed) {
  Pose2D start;
  if (scenario.kind == ScenarioKind::HeadOnly) {
    start = scenario.head_only_start;
  } else {
    const double mark_x = std::max(spec.field_length / 2.0 - 1.8, spec.field_length / 4.0);
    start = {-mark_x, 0.0, 0.0};
  }
  start_ = scenario.switch_side ? reflect(start) : start;
  true_pose_ = start_;
}

double World::head_yaw_at(double t) const {
  const double amp = scenario_.head_amplitude;
  if (amp <= 0.0 || scenario_.head_rate <= 0.0) return 0.0;
  const double u = std::fmod(scenario_.head_rate * t, 4.0 * amp);
  if (u <= amp) return u;
  if (u <= 3.0 * amp) return 2.0 * amp - u;
  return u - 4.0 * amp;
}

Odometry World::walk_command(const Pose2D& believed, double dt) {
  const double mark_x = std::max(spec_.field_length / 2.0 - 1.8, spec_.field_length / 4.0);
  const Vec2 targets[2] = {{-mark_x, 0.0}, {mark_x, 0.0}};
  Vec2 target = targets[walk_target_];
  const Vec2 believed_pos{believed.x, believed.y};
  if ((target - believed_pos).norm() < scenario_.target_reach_tol) {
    walk_target_ ^= 1;
    target = targets[walk_target_];
  }
  const Vec2 to_target = target - believed_pos;
  const double desired = std::atan2(to_target.y, to_target.x);
  const double err = angle_diff(desired, believed.heading);
  Odometry cmd;
  cmd.dheading = std::clamp(err, -scenario_.turn_rate * dt, scenario_.turn_rate * dt);
  if (std::abs(err) < 0.5) cmd.dx = scenario_.walk_speed * dt;
  return cmd;
}

std::vector<LandmarkObservation> World::observe(const ViewPose& view, RandomStream& rng) const {
  struct Raw {
    LandmarkClass cls;
    double bearing;
    double range;
  };
  std::vector<Raw> raw;
  const double cam_yaw = view.body_heading + view.head_yaw;
  for (const Landmark& l : spec_.map.landmarks) {
    const Vec2 rel = l.position - view.position;
    const double range = rel.norm();
    if (range <= 1e-6 || range > spec_.obs_max_range) continue;
    const double world_bearing = std::atan2(rel.y, rel.x);
    if (std::abs(angle_diff(world_bearing, cam_yaw)) > spec_.camera.horizontal_fov / 2.0) continue;
    raw.push_back({l.landmark_class, angle_diff(world_bearing, view.body_heading), range});
  }
  // Canonical order before drawing noise: reflected poses then consume the
  // stream identically, landmark for mirrored landmark.
  std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
    if (a.cls != b.cls) return a.cls < b.cls;
    if (a.bearing != b.bearing) return a.bearing < b.bearing;
    return a.range < b.range;
  });
  std::vector<LandmarkObservation> out;
  out.reserve(raw.size());
  for (const Raw& r : raw) {
    LandmarkObservation obs;
    obs.landmark_class = r.cls;
    obs.range = std::max(0.05, r.range + rng.gaussian(spec_.obs_range_std));
    obs.bearing = wrap_pi(r.bearing + rng.gaussian(spec_.obs_bearing_std));
    obs.range_std = spec_.obs_range_std;
    obs.bearing_std = spec_.obs_bearing_std;
    out.push_back(obs);
  }
  return out;
}

FrameBundle World::step(long frame, const Pose2D& believed_pose) {
  const double dt = 1.0 / scenario_.frame_rate;
  const double t = frame * dt;

  if (next_fall_ < scenario_.fall_times_s.size() && frozen_until_ < 0 &&
      t >= scenario_.fall_times_s[next_fall_]) {
    frozen_until_ = frame + static_cast<long>(std::lround(2.0 * scenario_.frame_rate));
    ++next_fall_;
  }

  FrameBundle bundle;
  bool frozen = frozen_until_ >= 0 && frame < frozen_until_;
  if (frozen_until_ >= 0 && frame >= frozen_until_) {
    // Back up: the fall flag fires once and the true heading is disturbed.
    // The body stands still for this one frame as well.
    bundle.fall = true;
    RandomStream fall_rng(derive_seed(trial_seed_, kFallStream, frame));
    true_pose_.heading = wrap_pi(true_pose_.heading + fall_rng.uniform(-kPi / 6.0, kPi / 6.0));
    frozen_until_ = -1;
    frozen = true;
  }

  Odometry command;
  double head_yaw = prev_head_yaw_;
  if (!frozen) {
    head_yaw = head_yaw_at(t);
    if (scenario_.body_spin_rate != 0.0) {
      command.dheading = scenario_.body_spin_rate * dt;
    } else if (scenario_.kind == ScenarioKind::PenaltyWalk) {
      command = walk_command(believed_pose, dt);
    }
  }

  // Truth integrates the command exactly; odometry reports it with noise.
  const double c = std::cos(true_pose_.heading);
  const double s = std::sin(true_pose_.heading);
  true_pose_.x += c * command.dx - s * command.dy;
  true_pose_.y += s * command.dx + c * command.dy;
  true_pose_.heading = wrap_pi(true_pose_.heading + command.dheading);

  bundle.odometry = command;
  const bool moved = command.dx != 0.0 || command.dy != 0.0 || command.dheading != 0.0;
  if (moved && (spec_.odo_xy_std > 0.0 || spec_.odo_heading_std > 0.0)) {
    RandomStream odo_rng(derive_seed(trial_seed_, kOdometryStream, frame));
    bundle.odometry.dx += odo_rng.gaussian(spec_.odo_xy_std);
    bundle.odometry.dy += odo_rng.gaussian(spec_.odo_xy_std);
    bundle.odometry.dheading += odo_rng.gaussian(spec_.odo_heading_std);
  }

  bundle.true_pose = true_pose_;
  bundle.head_yaw = head_yaw;
  prev_head_yaw_ = head_yaw;

  const ViewPose true_view{{true_pose_.x, true_pose_.y}, true_pose_.heading, head_yaw, 0.0};
  bundle.true_view_center = view_center_azimuth(true_view, spec_.cylinder);

  RandomStream obs_rng(derive_seed(trial_seed_, kObservationStream, frame));
  bundle.observations = observe(true_view, obs_rng);

  RandomStream tile_rng(derive_seed(trial_seed_, kTileStream, frame));
  for (const ProjectedTile& tile : visible_tiles(true_view, spec_.camera, grid_)) {
    TileSampleSet set;
    set.id = tile.id;
    set.pixels = render_tile_samples(true_view, tile.id, texture_, grid_, spec_.sample_noise_std,
                                     spec_.pixels_per_tile, tile_rng);
    bundle.tile_samples.push_back(std::move(set));
  }
  return bundle;
}

}  // namespace roomaware
