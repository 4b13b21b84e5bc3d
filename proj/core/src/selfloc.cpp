#include "roomaware/selfloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roomaware/errors.hpp"

namespace roomaware {

namespace {

// Particle headings are kept on the 2^-51 lattice. pi is itself a multiple of
// 2^-51, so the +-pi translation below is exact and flip_pose is an exact
// involution. The quantization (4.4e-16 rad) is far below any noise source.
double quantize_heading(double h) {
  double q = std::nearbyint(h * 0x1.0p51) * 0x1.0p-51;
  if (q >= kPi) q -= 2.0 * kPi;  // rounding may land exactly on +pi
  return q;
}

double flip_heading(double h) { return h < 0.0 ? h + kPi : h - kPi; }

}  // namespace

Pose2D reflect(const Pose2D& p) { return {-p.x, -p.y, flip_heading(p.heading)}; }
Vec2 reflect(const Vec2& v) { return {-v.x, -v.y}; }

FieldMap FieldMap::standard(double length, double width) {
  FieldMap map;
  map.length = length;
  map.width = width;
  const double gx = length / 2.0;
  const double gy = 0.8;  // goal post half-span
  const double cx = length / 2.0;
  const double cy = width / 2.0;
  map.landmarks = {
      {LandmarkClass::GoalPost, {gx, gy}},      {LandmarkClass::GoalPost, {gx, -gy}},
      {LandmarkClass::GoalPost, {-gx, -gy}},    {LandmarkClass::GoalPost, {-gx, gy}},
      {LandmarkClass::LineJunction, {cx, cy}},  {LandmarkClass::LineJunction, {cx, -cy}},
      {LandmarkClass::LineJunction, {-cx, -cy}},{LandmarkClass::LineJunction, {-cx, cy}},
      {LandmarkClass::LineJunction, {0.0, cy}}, {LandmarkClass::LineJunction, {0.0, -cy}},
      {LandmarkClass::CircleCenter, {0.0, 0.0}},
  };
  return map;
}

bool FieldMap::point_symmetric(double tol) const {
  for (const Landmark& l : landmarks) {
    const Vec2 mirrored = reflect(l.position);
    bool found = false;
    for (const Landmark& m : landmarks) {
      if (m.landmark_class == l.landmark_class && (m.position - mirrored).norm() <= tol) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::vector<SelfLocParticle> init_at(const Pose2D& pose, const MclConfig& cfg, RandomStream& rng) {
  std::vector<SelfLocParticle> particles(cfg.particle_count);
  const double w = 1.0 / cfg.particle_count;
  for (SelfLocParticle& p : particles) {
    p.pose.x = pose.x + rng.gaussian(cfg.init_pos_std);
    p.pose.y = pose.y + rng.gaussian(cfg.init_pos_std);
    p.pose.heading = quantize_heading(wrap_pi(pose.heading + rng.gaussian(cfg.init_heading_std)));
    p.weight = w;
  }
  return particles;
}

namespace {

void apply_motion(Pose2D& pose, const Odometry& odom) {
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  pose.x += c * odom.dx - s * odom.dy;
  pose.y += s * odom.dx + c * odom.dy;
  pose.heading = quantize_heading(wrap_pi(pose.heading + odom.dheading));
}

double observation_likelihood(const Pose2D& pose, const LandmarkObservation& obs,
                              const FieldMap& map) {
  // Expected landmark position under this pose and observation.
  const double world_bearing = pose.heading + obs.bearing;
  const Vec2 expected{pose.x + obs.range * std::cos(world_bearing),
                      pose.y + obs.range * std::sin(world_bearing)};

  const Landmark* nearest = nullptr;
  double nearest_d2 = std::numeric_limits<double>::max();
  for (const Landmark& l : map.landmarks) {
    if (l.landmark_class != obs.landmark_class) continue;
    const Vec2 d = l.position - expected;
    const double d2 = d.dot(d);
    if (d2 < nearest_d2) {
      nearest_d2 = d2;
      nearest = &l;
    }
  }
  if (nearest == nullptr) return 1.0;  // unknown class carries no information

  const Vec2 rel = nearest->position - Vec2{pose.x, pose.y};
  const double pred_range = rel.norm();
  const double pred_bearing = wrap_pi(std::atan2(rel.y, rel.x) - pose.heading);
  const double dr = (obs.range - pred_range) / obs.range_std;
  const double db = angle_diff(obs.bearing, pred_bearing) / obs.bearing_std;
  const double l = std::exp(-0.5 * (dr * dr + db * db));
  return std::max(l, 1e-12);  // outlier floor
}

void systematic_resample(std::vector<SelfLocParticle>& particles, RandomStream& rng) {
  const int count = static_cast<int>(particles.size());
  double total = 0.0;
  for (const SelfLocParticle& p : particles) total += p.weight;
  if (!(total > 0.0) || !std::isfinite(total)) {
    const double w = 1.0 / count;
    for (SelfLocParticle& p : particles) p.weight = w;
    return;
  }
  std::vector<SelfLocParticle> next;
  next.reserve(count);
  const double step = total / count;
  double pointer = rng.uniform() * step;
  double cumulative = particles[0].weight;
  int idx = 0;
  const double w = 1.0 / count;
  for (int i = 0; i < count; ++i) {
    while (cumulative < pointer && idx + 1 < count) {
      ++idx;
      cumulative += particles[idx].weight;
    }
    next.push_back({particles[idx].pose, w});
    pointer += step;
  }
  particles = std::move(next);
}

}  // namespace

void mcl_step(std::vector<SelfLocParticle>& particles, const Odometry& odometry,
              std::span<const LandmarkObservation> observations, const FieldMap& map,
              const MclConfig& cfg, RandomStream& rng) {
  if (particles.empty()) return;

  const bool moved = odometry.dx != 0.0 || odometry.dy != 0.0 || odometry.dheading != 0.0;
  for (SelfLocParticle& p : particles) {
    Odometry noisy = odometry;
    if (moved) {
      noisy.dx += rng.gaussian(cfg.motion_xy_std);
      noisy.dy += rng.gaussian(cfg.motion_xy_std);
      noisy.dheading += rng.gaussian(cfg.motion_heading_std);
    }
    apply_motion(p.pose, noisy);
  }

  if (observations.empty()) return;

  double total = 0.0;
  for (SelfLocParticle& p : particles) {
    double likelihood = 1.0;
    for (const LandmarkObservation& obs : observations) {
      likelihood *= observation_likelihood(p.pose, obs, map);
    }
    p.weight *= likelihood;
    total += p.weight;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    const double w = 1.0 / particles.size();
    for (SelfLocParticle& p : particles) p.weight = w;  // kidnapped fallback
    return;
  }
  systematic_resample(particles, rng);
}

void flip_pose(std::vector<SelfLocParticle>& particles) {
  for (SelfLocParticle& p : particles) p.pose = reflect(p.pose);
}

void purge_reflection(std::vector<SelfLocParticle>& particles, const Pose2D& best, double radius,
                      RandomStream& rng) {
  if (particles.empty()) return;
  const Pose2D mirrored = reflect(best);
  const Vec2 best_pos{best.x, best.y};
  const Vec2 mirror_pos{mirrored.x, mirrored.y};

  std::vector<SelfLocParticle> kept;
  std::vector<SelfLocParticle> near_best;
  kept.reserve(particles.size());
  for (const SelfLocParticle& p : particles) {
    const Vec2 pos{p.pose.x, p.pose.y};
    const bool in_mirror = (pos - mirror_pos).norm() <= radius;
    const bool in_best = (pos - best_pos).norm() <= radius;
    if (in_mirror && !in_best) continue;  // purged
    kept.push_back(p);
    if (in_best) near_best.push_back(p);
  }
  if (kept.empty()) throw PurgeWouldEmpty();

  const int missing = static_cast<int>(particles.size() - kept.size());
  const std::vector<SelfLocParticle>& pool = near_best.empty() ? kept : near_best;
  for (int i = 0; i < missing; ++i) {
    SelfLocParticle p = pool[rng.uniform_int(static_cast<int>(pool.size()))];
    p.pose.x += rng.gaussian(0.05);
    p.pose.y += rng.gaussian(0.05);
    p.pose.heading = quantize_heading(wrap_pi(p.pose.heading + rng.gaussian(0.02)));
    kept.push_back(p);
  }
  particles = std::move(kept);
}

void reset_orientation(std::vector<SelfLocParticle>& particles, RandomStream& rng) {
  if (particles.empty()) return;
  const double w = 1.0 / particles.size();
  for (SelfLocParticle& p : particles) {
    p.pose.heading = quantize_heading(rng.uniform(-kPi, kPi));
    p.weight = w;
  }
}

namespace {

double pose_distance(const Pose2D& a, const Pose2D& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  // One radian of heading error counts like one meter of position error.
  return std::sqrt(dx * dx + dy * dy) + std::abs(angle_diff(a.heading, b.heading));
}

}  // namespace

BestPose best_pose(std::span<const SelfLocParticle> particles, double multimodal_threshold) {
  BestPose out;
  if (particles.empty()) return out;

  // Seed with the heaviest particle, then split the set between the seed pose
  // and its reflection; the field symmetry makes these the only two modes.
  const SelfLocParticle* seed = &particles[0];
  for (const SelfLocParticle& p : particles) {
    if (p.weight > seed->weight) seed = &p;
  }
  const Pose2D seed_pose = seed->pose;
  const Pose2D seed_mirror = reflect(seed_pose);

  double mass_a = 0.0, mass_b = 0.0;
  double ax = 0, ay = 0, asin = 0, acos = 0;
  double bx = 0, by = 0, bsin = 0, bcos = 0;
  for (const SelfLocParticle& p : particles) {
    if (pose_distance(p.pose, seed_pose) <= pose_distance(p.pose, seed_mirror)) {
      mass_a += p.weight;
      ax += p.weight * p.pose.x;
      ay += p.weight * p.pose.y;
      asin += p.weight * std::sin(p.pose.heading);
      acos += p.weight * std::cos(p.pose.heading);
    } else {
      mass_b += p.weight;
      bx += p.weight * p.pose.x;
      by += p.weight * p.pose.y;
      bsin += p.weight * std::sin(p.pose.heading);
      bcos += p.weight * std::cos(p.pose.heading);
    }
  }

  const bool a_wins = mass_a >= mass_b;
  const double mass = a_wins ? mass_a : mass_b;
  const double other = a_wins ? mass_b : mass_a;
  if (mass <= 0.0) return out;
  if (a_wins) {
    out.pose = {ax / mass_a, ay / mass_a, wrap_pi(std::atan2(asin, acos))};
  } else {
    out.pose = {bx / mass_b, by / mass_b, wrap_pi(std::atan2(bsin, bcos))};
  }
  out.multimodal = other / (mass + other) > multimodal_threshold;
  return out;
}

}  // namespace roomaware
