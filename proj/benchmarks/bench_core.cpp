#include <benchmark/benchmark.h>

#include <vector>

#include "roomaware/background_model.hpp"
#include "roomaware/colour.hpp"
#include "roomaware/orientation_filter.hpp"
#include "roomaware/rng.hpp"
#include "roomaware/selfloc.hpp"
#include "roomaware/sim.hpp"

using namespace roomaware;

namespace {

std::vector<PixelYCrCb> sample_pixels(int n) {
  RandomStream rng(1);
  std::vector<PixelYCrCb> pixels;
  pixels.reserve(n);
  for (int i = 0; i < n; ++i) {
    pixels.push_back({rng.uniform_int(256), rng.uniform_int(256), rng.uniform_int(256)});
  }
  return pixels;
}

ColourHistogram random_histogram(RandomStream& rng) {
  ColourHistogram h;
  double sum = 0;
  for (double& b : h.bins) {
    b = rng.uniform();
    sum += b;
  }
  for (double& b : h.bins) b /= sum;
  return h;
}

}  // namespace

static void BM_BuildHistogram(benchmark::State& state) {
  const auto pixels = sample_pixels(static_cast<int>(state.range(0)));
  const BinningConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_histogram(pixels, cfg));
  }
}
BENCHMARK(BM_BuildHistogram)->Arg(64)->Arg(256);

static void BM_Similarity(benchmark::State& state) {
  RandomStream rng(2);
  const ColourHistogram p = random_histogram(rng);
  ColourHistogramModel m;
  m.seen = true;
  m.mean = random_histogram(rng).bins;
  for (double& v : m.variance) v = rng.uniform() * 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(similarity(p, m, 1e-3));
  }
}
BENCHMARK(BM_Similarity);

static void BM_FilterCycle(benchmark::State& state) {
  CylinderParams params;
  const TileGrid grid(params);
  RandomStream rng(3);
  BackgroundModel model(grid, 20);
  for (int row = 0; row < grid.rows(); ++row) {
    for (int col = 0; col < grid.cols(); ++col) {
      model.update_tile({row, col}, random_histogram(rng));
    }
  }
  std::vector<PerceivedTile> perceived;
  for (int d = 0; d < 10; ++d) {
    perceived.push_back({{d % 2, d}, random_histogram(rng)});
  }
  OrientationFilterConfig cfg;
  cfg.particle_count = static_cast<int>(state.range(0));
  auto particles = init_uniform(cfg, rng);
  for (auto _ : state) {
    predict(particles, 0.01, cfg, rng);
    weigh(particles, perceived, 0.3, model, cfg, 1e-3);
    resample_and_inject(particles, cfg, rng);
  }
}
BENCHMARK(BM_FilterCycle)->Arg(200)->Arg(1000);

static void BM_MclStep(benchmark::State& state) {
  RandomStream rng(4);
  const FieldMap map = FieldMap::standard();
  MclConfig cfg;
  cfg.particle_count = static_cast<int>(state.range(0));
  auto particles = init_at({-1.0, 0.5, 0.3}, cfg, rng);
  std::vector<LandmarkObservation> obs = {
      {LandmarkClass::GoalPost, 0.2, 3.5, 0.1, 0.03},
      {LandmarkClass::LineJunction, -0.4, 2.0, 0.1, 0.03},
      {LandmarkClass::CircleCenter, 0.05, 1.2, 0.1, 0.03},
  };
  for (auto _ : state) {
    mcl_step(particles, {0.015, 0.0, 0.01}, obs, map, cfg, rng);
  }
}
BENCHMARK(BM_MclStep)->Arg(100)->Arg(500);

static void BM_WorldStep(benchmark::State& state) {
  WorldSpec spec;
  Scenario scenario;
  scenario.kind = ScenarioKind::PenaltyWalk;
  scenario.duration_frames = 1 << 30;
  World world(spec, scenario, 5, 6);
  Pose2D believed = world.true_start_pose();
  long frame = 0;
  for (auto _ : state) {
    const FrameBundle bundle = world.step(frame++, believed);
    believed = bundle.true_pose;
    benchmark::DoNotOptimize(bundle.tile_samples.size());
  }
}
BENCHMARK(BM_WorldStep);

BENCHMARK_MAIN();
