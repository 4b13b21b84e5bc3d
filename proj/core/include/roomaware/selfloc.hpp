#pragma once

#include <span>
#include <vector>

#include "roomaware/geometry.hpp"
#include "roomaware/rng.hpp"

namespace roomaware {

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // wrapped to [-pi, pi)
};

// The field's point reflection: the pose indistinguishable from `p` on a
// symmetric field with identical goals.
Pose2D reflect(const Pose2D& p);
Vec2 reflect(const Vec2& v);

struct SelfLocParticle {
  Pose2D pose;
  double weight = 1.0;
};

enum class LandmarkClass { GoalPost, LineJunction, CircleCenter };

struct LandmarkObservation {
  LandmarkClass landmark_class = LandmarkClass::GoalPost;
  double bearing = 0.0;  // robot body frame
  double range = 1.0;    // meters, > 0
  double range_std = 0.10;
  double bearing_std = 0.03;
};

struct Landmark {
  LandmarkClass landmark_class;
  Vec2 position;
};

// Landmark layout; must be invariant under the point reflection.
struct FieldMap {
  double length = 6.0;
  double width = 4.0;
  std::vector<Landmark> landmarks;

  // Goal posts, field corners, halfway-line ends and the center circle for a
  // length x width field with identical goals on both ends.
  static FieldMap standard(double length = 6.0, double width = 4.0);

  bool point_symmetric(double tol = 1e-9) const;
};

// Body-frame motion between two frames.
struct Odometry {
  double dx = 0.0;
  double dy = 0.0;
  double dheading = 0.0;
};

struct MclConfig {
  int particle_count = 100;
  double motion_xy_std = 0.02;
  double motion_heading_std = 0.01;
  double init_pos_std = 0.15;
  double init_heading_std = 0.05;
  double purge_radius = 1.0;
  double multimodal_threshold = 0.2;

  bool valid() const {
    return particle_count >= 2 && purge_radius > 0.0 && multimodal_threshold > 0.0 &&
           multimodal_threshold < 1.0;
  }
};

std::vector<SelfLocParticle> init_at(const Pose2D& pose, const MclConfig& cfg, RandomStream& rng);

// Sampled motion update, likelihood weighting against the nearest map
// landmark of the matching class, systematic resampling. Zero total
// likelihood falls back to a uniform reweight.
void mcl_step(std::vector<SelfLocParticle>& particles, const Odometry& odometry,
              std::span<const LandmarkObservation> observations, const FieldMap& map,
              const MclConfig& cfg, RandomStream& rng);

// BC command handlers.
void flip_pose(std::vector<SelfLocParticle>& particles);

// Deletes particles within `radius` of reflect(best) (unless they are also
// within `radius` of best) and refills from particles near best with a small
// jitter. Count preserved. Throws PurgeWouldEmpty if nothing would survive.
void purge_reflection(std::vector<SelfLocParticle>& particles, const Pose2D& best, double radius,
                      RandomStream& rng);

// Positions kept bit-identical; headings redrawn uniformly; weights uniform.
void reset_orientation(std::vector<SelfLocParticle>& particles, RandomStream& rng);

struct BestPose {
  Pose2D pose;
  bool multimodal = false;
};

// Weighted mean of the dominant cluster; multimodal when the reflected
// cluster holds more than `multimodal_threshold` of the total weight.
BestPose best_pose(std::span<const SelfLocParticle> particles,
                   double multimodal_threshold = 0.2);

}  // namespace roomaware
