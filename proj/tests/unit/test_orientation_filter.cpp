#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "roomaware/errors.hpp"
#include "roomaware/orientation_filter.hpp"
#include "roomaware/rng.hpp"

using namespace roomaware;

namespace {

TileGrid grid36() {
  CylinderParams p;
  p.rows = 1;
  p.cols = 36;
  return make_tile_grid(p);
}

// Distinct two-bin signature per column; period pins down the symmetry.
ColourHistogram signature(int col, int period) {
  const int c = col % period;
  ColourHistogram h;
  h.bins[c % 8] = 0.5;
  h.bins[8 + (c / 8) % 8] += 0.5;
  return h;
}

BackgroundModel trained_model(const TileGrid& grid, int period) {
  BackgroundModel model(grid, 20);
  for (int col = 0; col < grid.cols(); ++col) {
    model.update_tile({0, col}, signature(col, period));
  }
  return model;
}

std::vector<PerceivedTile> perfect_perception(const TileGrid& grid, double view_center,
                                              int period, int tiles_each_side = 2) {
  std::vector<PerceivedTile> out;
  const int center_col = grid.col_at(view_center);
  for (int d = -tiles_each_side; d <= tiles_each_side; ++d) {
    const int col = grid.wrap_col(center_col + d);
    out.push_back({{0, col}, signature(col, period)});
  }
  return out;
}

double circular_std(const std::vector<double>& angles) {
  double s = 0, c = 0;
  for (double a : angles) {
    s += std::sin(a);
    c += std::cos(a);
  }
  const double r = std::hypot(s, c) / angles.size();
  return std::sqrt(-2.0 * std::log(std::max(r, 1e-300)));
}

}  // namespace

TEST_CASE("predict shifts hypotheses and adds the configured noise") {
  OrientationFilterConfig cfg;
  RandomStream rng(1);
  auto particles = init_uniform(cfg, rng);
  REQUIRE(particles.size() == static_cast<size_t>(cfg.particle_count));

  SUBCASE("identity when delta and noise are zero") {
    auto before = particles;
    OrientationFilterConfig quiet = cfg;
    quiet.motion_noise_std = 0.0;
    predict(particles, 0.0, quiet, rng);
    for (size_t i = 0; i < before.size(); ++i) CHECK(particles[i].azimuth == before[i].azimuth);
  }
  SUBCASE("pure rotation") {
    auto before = particles;
    OrientationFilterConfig quiet = cfg;
    quiet.motion_noise_std = 0.0;
    predict(particles, kPi / 6.0, quiet, rng);
    for (size_t i = 0; i < before.size(); ++i) {
      CHECK(angle_diff(particles[i].azimuth, before[i].azimuth) ==
            doctest::Approx(kPi / 6.0).epsilon(1e-12));
    }
  }
  SUBCASE("noise magnitude is calibrated") {
    OrientationFilterConfig noisy = cfg;
    noisy.particle_count = 10000;
    noisy.motion_noise_std = 0.05;
    auto cloud = init_uniform(noisy, rng);
    auto before = cloud;
    predict(cloud, 0.0, noisy, rng);
    std::vector<double> displacement(cloud.size());
    for (size_t i = 0; i < cloud.size(); ++i) {
      displacement[i] = angle_diff(cloud[i].azimuth, before[i].azimuth);
    }
    CHECK(circular_std(displacement) == doctest::Approx(0.05).epsilon(0.10));
  }
}

TEST_CASE("particle count is preserved across the filter cycle") {
  OrientationFilterConfig cfg;
  RandomStream rng(2);
  auto particles = init_uniform(cfg, rng);
  const TileGrid grid = grid36();
  const BackgroundModel model = trained_model(grid, 36);
  const auto perceived = perfect_perception(grid, 0.1, 36);

  for (int cycle = 0; cycle < 5; ++cycle) {
    predict(particles, 0.01, cfg, rng);
    CHECK(particles.size() == static_cast<size_t>(cfg.particle_count));
    weigh(particles, perceived, 0.1, model, cfg, 1e-3);
    CHECK(particles.size() == static_cast<size_t>(cfg.particle_count));
    resample_and_inject(particles, cfg, rng);
    CHECK(particles.size() == static_cast<size_t>(cfg.particle_count));
  }
}

TEST_CASE("weigh scores the true offset best over a dense hypothesis grid") {
  const TileGrid grid = grid36();
  const BackgroundModel model = trained_model(grid, 36);
  const double believed = grid.tile_center_azimuth(3);
  const auto perceived = perfect_perception(grid, believed, 36);
  OrientationFilterConfig cfg;

  // One particle per degree.
  std::vector<OrientationParticle> particles;
  for (int deg = -180; deg < 180; ++deg) {
    particles.push_back({wrap_pi(believed + deg_to_rad(deg)), 1.0});
  }
  weigh(particles, perceived, believed, model, cfg, 1e-3);

  double best = -1.0;
  for (const auto& p : particles) best = std::max(best, p.weight);
  const double zero_offset_weight = particles[180].weight;  // deg == 0
  CHECK(zero_offset_weight == doctest::Approx(best));
  CHECK(zero_offset_weight == doctest::Approx(1.0 + cfg.weight_floor));

  // Hypotheses more than one sector away miss every signature.
  for (const auto& p : particles) {
    const double off = std::abs(angle_diff(p.azimuth, believed));
    if (off > grid.sector_width()) CHECK(p.weight < 0.8 * zero_offset_weight);
  }
}

TEST_CASE("weigh under a pi-periodic model is exactly antipodal-symmetric") {
  const TileGrid grid = grid36();
  const BackgroundModel model = trained_model(grid, 18);  // period pi
  RandomStream rng(5);
  OrientationFilterConfig cfg;
  cfg.particle_count = 200;

  const double believed = rng.uniform(-kPi, kPi);
  const auto perceived = perfect_perception(grid, believed, 18);

  std::vector<OrientationParticle> particles;
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(-kPi, kPi);
    particles.push_back({a, 1.0});
    particles.push_back({wrap_pi(a + kPi), 1.0});
  }
  weigh(particles, perceived, believed, model, cfg, 1e-3);
  for (size_t i = 0; i < particles.size(); i += 2) {
    CHECK(particles[i].weight == particles[i + 1].weight);
  }
}

TEST_CASE("weigh edge cases") {
  const TileGrid grid = grid36();
  OrientationFilterConfig cfg;
  RandomStream rng(6);
  auto particles = init_uniform(cfg, rng);

  SUBCASE("empty perception leaves weights untouched") {
    auto before = particles;
    const BackgroundModel model = trained_model(grid, 36);
    weigh(particles, {}, 0.0, model, cfg, 1e-3);
    for (size_t i = 0; i < before.size(); ++i) CHECK(particles[i].weight == before[i].weight);
  }
  SUBCASE("fully unseen model floors every weight") {
    const BackgroundModel empty_model(grid, 20);
    const auto perceived = perfect_perception(grid, 0.0, 36);
    weigh(particles, perceived, 0.0, empty_model, cfg, 1e-3);
    for (const auto& p : particles) {
      CHECK(p.weight == doctest::Approx((1.0 / cfg.particle_count) * cfg.weight_floor));
    }
  }
  SUBCASE("weights stay positive and finite") {
    const BackgroundModel model = trained_model(grid, 36);
    const auto perceived = perfect_perception(grid, 1.0, 36);
    for (int k = 0; k < 3; ++k) weigh(particles, perceived, 1.0, model, cfg, 1e-3);
    for (const auto& p : particles) {
      CHECK(p.weight > 0.0);
      CHECK(std::isfinite(p.weight));
    }
  }
}

TEST_CASE("weigh is equivariant under whole-sector rotations") {
  const TileGrid grid = grid36();
  RandomStream rng(7);
  OrientationFilterConfig cfg;
  const int shift_cols = 7;
  const double shift = shift_cols * grid.sector_width();

  // Rotated model: tile c trained with the signature of c - shift.
  BackgroundModel base = trained_model(grid, 36);
  BackgroundModel rotated(grid, 20);
  for (int col = 0; col < grid.cols(); ++col) {
    rotated.update_tile({0, col}, signature(grid.wrap_col(col - shift_cols), 36));
  }

  const double believed = 0.4;
  const auto perceived = perfect_perception(grid, believed, 36);
  std::vector<PerceivedTile> perceived_rot;
  for (const PerceivedTile& t : perceived) {
    perceived_rot.push_back({{0, grid.wrap_col(t.id.col + shift_cols)}, t.histogram});
  }

  std::vector<OrientationParticle> particles, particles_rot;
  for (int i = 0; i < 300; ++i) {
    const double a = rng.uniform(-kPi, kPi);
    particles.push_back({a, 1.0});
    particles_rot.push_back({wrap_pi(a + shift), 1.0});
  }
  weigh(particles, perceived, believed, base, cfg, 1e-3);
  weigh(particles_rot, perceived_rot, wrap_pi(believed + shift), rotated, cfg, 1e-3);
  for (size_t i = 0; i < particles.size(); ++i) {
    CHECK(particles[i].weight == doctest::Approx(particles_rot[i].weight).epsilon(1e-12));
  }
}

TEST_CASE("systematic resampling with uniform weights is a permutation") {
  OrientationFilterConfig cfg;
  cfg.inject_fraction = 0.0;
  RandomStream rng(8);
  auto particles = init_uniform(cfg, rng);
  std::multiset<double> before;
  for (const auto& p : particles) before.insert(p.azimuth);
  resample_and_inject(particles, cfg, rng);
  std::multiset<double> after;
  for (const auto& p : particles) after.insert(p.azimuth);
  CHECK(before == after);
  for (const auto& p : particles) CHECK(p.weight == 1.0 / cfg.particle_count);
}

TEST_CASE("a single dominant weight collapses the set onto its azimuth") {
  OrientationFilterConfig cfg;
  cfg.inject_fraction = 0.0;
  RandomStream rng(9);
  auto particles = init_uniform(cfg, rng);
  for (auto& p : particles) p.weight = 0.0;
  particles[37].weight = 1.0;
  const double target = particles[37].azimuth;
  resample_and_inject(particles, cfg, rng);
  for (const auto& p : particles) CHECK(p.azimuth == target);
}

TEST_CASE("injection places the configured count near the best match") {
  OrientationFilterConfig cfg;
  cfg.particle_count = 100;
  cfg.inject_fraction = 0.1;
  cfg.motion_noise_std = 0.01;
  RandomStream rng(10);
  auto particles = init_uniform(cfg, rng);
  for (auto& p : particles) p.weight = 0.001;
  particles[50].azimuth = 1.0;
  particles[50].weight = 5.0;

  resample_and_inject(particles, cfg, rng);
  // 90 copies of the best particle via resampling dominance would also sit at
  // 1.0; count how many are within a few noise sigmas instead.
  int near_best = 0;
  for (const auto& p : particles) {
    if (std::abs(angle_diff(p.azimuth, 1.0)) < 5.0 * cfg.motion_noise_std) ++near_best;
  }
  CHECK(near_best >= 10);  // at least the injected ones
  CHECK(particles.size() == 100);
}

TEST_CASE("all-zero weights raise DegenerateWeights") {
  OrientationFilterConfig cfg;
  RandomStream rng(11);
  auto particles = init_uniform(cfg, rng);
  for (auto& p : particles) p.weight = 0.0;
  CHECK_THROWS_AS(resample_and_inject(particles, cfg, rng), DegenerateWeights);
}

TEST_CASE("cluster center summarizes the particle distribution") {
  OrientationFilterConfig cfg;
  SUBCASE("point mass") {
    std::vector<OrientationParticle> particles(50, {1.2, 1.0});
    const ClusterEstimate est = cluster_center(particles, cfg);
    CHECK(est.center == doctest::Approx(1.2));
    CHECK(est.spread == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(est.mass == doctest::Approx(1.0));
  }
  SUBCASE("antipodal tie takes the smaller wrapped angle and maximal spread") {
    std::vector<OrientationParticle> particles;
    for (int i = 0; i < 40; ++i) {
      particles.push_back({0.7, 1.0});
      particles.push_back({wrap_pi(0.7 + kPi), 1.0});
    }
    const ClusterEstimate est = cluster_center(particles, cfg);
    CHECK(est.center == doctest::Approx(wrap_pi(0.7 + kPi)));  // -2.44 < 0.7
    CHECK(est.spread == doctest::Approx(kPi));
    CHECK(est.mass <= 0.5 + 1e-12);
  }
  SUBCASE("wrapped gaussian cloud recovers its mean") {
    RandomStream rng(12);
    const double mean = 2.9;  // near the wrap boundary on purpose
    std::vector<OrientationParticle> particles;
    for (int i = 0; i < 1000; ++i) {
      particles.push_back({wrap_pi(mean + rng.gaussian(0.1)), 1.0});
    }
    const ClusterEstimate est = cluster_center(particles, cfg);
    CHECK(std::abs(angle_diff(est.center, mean)) < 0.02);
    CHECK(est.spread == doctest::Approx(0.1).epsilon(0.15));
  }
}

TEST_CASE("fifty cycles lock onto a fixed true view center") {
  const TileGrid grid = grid36();
  const BackgroundModel model = trained_model(grid, 36);
  OrientationFilterConfig cfg;
  RandomStream rng(13);

  const double truth = grid.tile_center_azimuth(20);
  auto particles = init_uniform(cfg, rng);
  const auto perceived = perfect_perception(grid, truth, 36);
  for (int cycle = 0; cycle < 50; ++cycle) {
    predict(particles, 0.0, cfg, rng);
    weigh(particles, perceived, truth, model, cfg, 1e-3);
    resample_and_inject(particles, cfg, rng);
  }
  const ClusterEstimate est = cluster_center(particles, cfg);
  CHECK(std::abs(angle_diff(est.center, truth)) < 2.0 * grid.sector_width());
  CHECK(est.mass > 0.8);
}
