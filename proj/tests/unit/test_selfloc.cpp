#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "roomaware/errors.hpp"
#include "roomaware/rng.hpp"
#include "roomaware/selfloc.hpp"

using namespace roomaware;

namespace {

std::vector<SelfLocParticle> bimodal_set(const Pose2D& p, int per_side, RandomStream& rng) {
  MclConfig cfg;
  cfg.particle_count = per_side;
  auto a = init_at(p, cfg, rng);
  auto b = init_at(reflect(p), cfg, rng);
  a.insert(a.end(), b.begin(), b.end());
  for (auto& particle : a) particle.weight = 1.0 / a.size();
  return a;
}

}  // namespace

TEST_CASE("the field map is point-symmetric") {
  CHECK(FieldMap::standard().point_symmetric());
  CHECK(FieldMap::standard(9.0, 6.0).point_symmetric());
}

TEST_CASE("flip_pose examples") {
  std::vector<SelfLocParticle> particles = {{{1.0, 2.0, 0.0}, 0.7}};
  flip_pose(particles);
  CHECK(particles[0].pose.x == -1.0);
  CHECK(particles[0].pose.y == -2.0);
  CHECK(particles[0].pose.heading == -kPi);  // pi wrapped into [-pi, pi)
  CHECK(particles[0].weight == 0.7);

  particles = {{{0.0, 0.0, kPi / 2.0}, 1.0}};
  flip_pose(particles);
  CHECK(particles[0].pose.heading == doctest::Approx(-kPi / 2.0));
}

TEST_CASE("flip_pose is an exact involution preserving pairwise distances") {
  RandomStream rng(51);
  MclConfig cfg;
  cfg.particle_count = 300;
  auto particles = init_at({0.8, -1.1, 2.3}, cfg, rng);
  // Exercise motion so the headings pass through the motion-update path too.
  mcl_step(particles, {0.05, 0.01, 0.2}, {}, FieldMap::standard(), cfg, rng);
  const auto original = particles;

  flip_pose(particles);
  for (size_t i = 0; i < particles.size(); ++i) {
    for (size_t j = i + 1; j < particles.size(); ++j) {
      const double before = std::hypot(original[i].pose.x - original[j].pose.x,
                                       original[i].pose.y - original[j].pose.y);
      const double after = std::hypot(particles[i].pose.x - particles[j].pose.x,
                                      particles[i].pose.y - particles[j].pose.y);
      CHECK(before == after);
      if (j > i + 5) break;  // pairwise sample is enough
    }
  }

  flip_pose(particles);
  for (size_t i = 0; i < particles.size(); ++i) {
    CHECK(particles[i].pose.x == original[i].pose.x);
    CHECK(particles[i].pose.y == original[i].pose.y);
    CHECK(particles[i].pose.heading == original[i].pose.heading);  // bit-exact
    CHECK(particles[i].weight == original[i].weight);
  }
}

TEST_CASE("purge_reflection removes the mirrored cluster and preserves the count") {
  RandomStream rng(52);
  const Pose2D best{1.5, 0.8, 0.3};

  SUBCASE("bimodal set becomes unimodal") {
    auto particles = bimodal_set(best, 50, rng);
    purge_reflection(particles, best, 1.0, rng);
    CHECK(particles.size() == 100);
    for (const auto& p : particles) {
      const double d_mirror = std::hypot(p.pose.x + best.x, p.pose.y + best.y);
      const double d_best = std::hypot(p.pose.x - best.x, p.pose.y - best.y);
      CHECK((d_mirror > 1.0 || d_best <= 1.0));
    }
    const BestPose bp = best_pose(particles, 0.2);
    CHECK(!bp.multimodal);
    CHECK(bp.pose.x == doctest::Approx(best.x).epsilon(0.2));
  }

  SUBCASE("unimodal set is untouched") {
    MclConfig cfg;
    cfg.particle_count = 80;
    auto particles = init_at(best, cfg, rng);
    const auto before = particles;
    purge_reflection(particles, best, 1.0, rng);
    REQUIRE(particles.size() == before.size());
    for (size_t i = 0; i < particles.size(); ++i) {
      CHECK(particles[i].pose.x == before[i].pose.x);
      CHECK(particles[i].pose.heading == before[i].pose.heading);
    }
  }

  SUBCASE("purging everything is refused") {
    MclConfig cfg;
    cfg.particle_count = 40;
    auto particles = init_at(reflect(best), cfg, rng);
    CHECK_THROWS_AS(purge_reflection(particles, best, 1.0, rng), PurgeWouldEmpty);
    CHECK(particles.size() == 40);  // untouched on failure
  }

  SUBCASE("particles near best are never removed even when regions overlap") {
    MclConfig cfg;
    cfg.particle_count = 60;
    auto particles = init_at({0.05, 0.05, 0.0}, cfg, rng);  // best and mirror overlap
    const Pose2D near_origin{0.05, 0.05, 0.0};
    purge_reflection(particles, near_origin, 1.0, rng);
    CHECK(particles.size() == 60);
  }
}

TEST_CASE("reset_orientation keeps positions bit-identical and redraws headings uniformly") {
  RandomStream rng(53);
  MclConfig cfg;
  cfg.particle_count = 10000;
  auto particles = init_at({-1.0, 0.5, 1.0}, cfg, rng);
  const auto before = particles;
  reset_orientation(particles, rng);

  REQUIRE(particles.size() == before.size());
  for (size_t i = 0; i < particles.size(); ++i) {
    CHECK(particles[i].pose.x == before[i].pose.x);
    CHECK(particles[i].pose.y == before[i].pose.y);
    CHECK(particles[i].weight == 1.0 / cfg.particle_count);
  }

  // Chi-square over 12 heading sectors; 11 dof, p > 0.01 means stat < 24.725.
  int counts[12] = {};
  for (const auto& p : particles) {
    int s = static_cast<int>((p.pose.heading + kPi) / (kTwoPi / 12.0));
    s = std::clamp(s, 0, 11);
    ++counts[s];
  }
  const double expected = cfg.particle_count / 12.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 24.725);

  std::vector<SelfLocParticle> empty;
  reset_orientation(empty, rng);
  CHECK(empty.empty());
}

TEST_CASE("best_pose clusters against the reflection") {
  RandomStream rng(54);
  const Pose2D p{1.2, -0.7, 0.9};

  SUBCASE("unimodal") {
    MclConfig cfg;
    cfg.particle_count = 100;
    auto particles = init_at(p, cfg, rng);
    const BestPose bp = best_pose(particles, 0.2);
    CHECK(!bp.multimodal);
    CHECK(bp.pose.x == doctest::Approx(p.x).epsilon(0.15));
    CHECK(bp.pose.y == doctest::Approx(p.y).epsilon(0.15));
    CHECK(std::abs(angle_diff(bp.pose.heading, p.heading)) < 0.1);
  }
  SUBCASE("50/50 bimodal is multimodal") {
    auto particles = bimodal_set(p, 50, rng);
    CHECK(best_pose(particles, 0.2).multimodal);
  }
  SUBCASE("90/10 split is unimodal at the 20% threshold") {
    MclConfig cfg;
    cfg.particle_count = 90;
    auto particles = init_at(p, cfg, rng);
    cfg.particle_count = 10;
    auto minority = init_at(reflect(p), cfg, rng);
    particles.insert(particles.end(), minority.begin(), minority.end());
    for (auto& particle : particles) particle.weight = 0.01;
    const BestPose bp = best_pose(particles, 0.2);
    CHECK(!bp.multimodal);
    CHECK(bp.pose.x == doctest::Approx(p.x).epsilon(0.15));
  }
}

TEST_CASE("mcl_step with no motion and no observations is the identity") {
  RandomStream rng(55);
  MclConfig cfg;
  auto particles = init_at({0.5, 0.5, 0.5}, cfg, rng);
  const auto before = particles;
  mcl_step(particles, {0.0, 0.0, 0.0}, {}, FieldMap::standard(), cfg, rng);
  for (size_t i = 0; i < particles.size(); ++i) {
    CHECK(particles[i].pose.x == before[i].pose.x);
    CHECK(particles[i].pose.y == before[i].pose.y);
    CHECK(particles[i].pose.heading == before[i].pose.heading);
  }
}

namespace {

// Noise-free observations of the k nearest landmarks from a pose.
std::vector<LandmarkObservation> exact_observations(const Pose2D& pose, const FieldMap& map,
                                                    size_t k = 3) {
  struct Scored {
    double range;
    LandmarkObservation obs;
  };
  std::vector<Scored> scored;
  for (const Landmark& l : map.landmarks) {
    const double dx = l.position.x - pose.x;
    const double dy = l.position.y - pose.y;
    const double range = std::hypot(dx, dy);
    if (range < 1e-6) continue;
    LandmarkObservation obs;
    obs.landmark_class = l.landmark_class;
    obs.range = range;
    obs.bearing = wrap_pi(std::atan2(dy, dx) - pose.heading);
    scored.push_back({range, obs});
  }
  std::sort(scored.begin(), scored.end(),
            [](const Scored& a, const Scored& b) { return a.range < b.range; });
  std::vector<LandmarkObservation> out;
  for (size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(scored[i].obs);
  return out;
}

}  // namespace

TEST_CASE("symmetric exact observations keep both reflected modes alive") {
  RandomStream rng(56);
  const FieldMap map = FieldMap::standard();
  Pose2D truth{-1.0, -0.8, 0.4};
  auto particles = bimodal_set(truth, 100, rng);

  // One update with exact observations: the map symmetry makes both modes
  // equally likely, and systematic resampling preserves their mass shares.
  auto observations = exact_observations(truth, map);
  for (auto& o : observations) {
    o.range_std = 0.3;  // mild likelihoods keep the weight spread tame
    o.bearing_std = 0.15;
  }
  mcl_step(particles, {0.0, 0.0, 0.0}, observations, map, MclConfig{}, rng);
  int near_truth = 0, near_mirror = 0;
  const Pose2D mirror = reflect(truth);
  for (const auto& p : particles) {
    const double dt = std::hypot(p.pose.x - truth.x, p.pose.y - truth.y);
    const double dm = std::hypot(p.pose.x - mirror.x, p.pose.y - mirror.y);
    if (dt < dm) ++near_truth;
    else ++near_mirror;
  }
  const int total = static_cast<int>(particles.size());
  CHECK(near_truth > total / 5);
  CHECK(near_mirror > total / 5);
  CHECK(best_pose(particles, 0.2).multimodal);
}

TEST_CASE("a scripted walk tracks ground truth under 0.3 m RMSE") {
  RandomStream rng(57);
  RandomStream obs_rng(58);
  const FieldMap map = FieldMap::standard();
  MclConfig cfg;

  Pose2D truth{-1.2, 0.0, 0.0};
  auto particles = init_at(truth, cfg, rng);

  double sq_err_sum = 0.0;
  const int steps = 500;
  for (int step = 0; step < steps; ++step) {
    // Figure-eight-ish drive command.
    const Odometry odom{0.02, 0.0, 0.015 * std::sin(step / 40.0)};
    const double c = std::cos(truth.heading), s = std::sin(truth.heading);
    truth.x += c * odom.dx - s * odom.dy;
    truth.y += s * odom.dx + c * odom.dy;
    truth.heading = wrap_pi(truth.heading + odom.dheading);

    auto observations = exact_observations(truth, map);
    for (auto& o : observations) {
      o.range = std::max(0.05, o.range + obs_rng.gaussian(o.range_std));
      o.bearing = wrap_pi(o.bearing + obs_rng.gaussian(o.bearing_std));
    }
    mcl_step(particles, odom, observations, map, cfg, rng);

    const BestPose bp = best_pose(particles, cfg.multimodal_threshold);
    const double dx = bp.pose.x - truth.x;
    const double dy = bp.pose.y - truth.y;
    sq_err_sum += dx * dx + dy * dy;
  }
  const double rmse = std::sqrt(sq_err_sum / steps);
  CHECK(rmse < 0.3);
}

TEST_CASE("map symmetry commutes with the filter update") {
  const FieldMap map = FieldMap::standard();
  MclConfig cfg;
  cfg.particle_count = 120;

  RandomStream init_rng(59);
  auto run_a = init_at({0.7, -0.4, 1.1}, cfg, init_rng);
  auto run_b = run_a;
  flip_pose(run_b);

  const Odometry odom{0.03, -0.01, 0.05};
  const Pose2D probe{0.7, -0.4, 1.1};
  const auto obs = exact_observations(probe, map);

  // Body-frame odometry and the observation set are reflection-invariant;
  // seed-paired noise keeps the two runs aligned.
  RandomStream rng_a(60), rng_b(60);
  mcl_step(run_a, odom, obs, map, cfg, rng_a);
  mcl_step(run_b, odom, obs, map, cfg, rng_b);

  flip_pose(run_a);
  for (size_t i = 0; i < run_a.size(); ++i) {
    CHECK(run_a[i].pose.x == doctest::Approx(run_b[i].pose.x).epsilon(1e-9));
    CHECK(run_a[i].pose.y == doctest::Approx(run_b[i].pose.y).epsilon(1e-9));
    CHECK(std::abs(angle_diff(run_a[i].pose.heading, run_b[i].pose.heading)) < 1e-9);
  }
}
