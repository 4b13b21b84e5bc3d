#include "roomaware/orientation_filter.hpp"

#include <algorithm>
#include <cmath>

#include "roomaware/errors.hpp"

namespace roomaware {

std::vector<OrientationParticle> init_uniform(const OrientationFilterConfig& cfg,
                                              RandomStream& rng) {
  std::vector<OrientationParticle> particles(cfg.particle_count);
  const double w = 1.0 / cfg.particle_count;
  for (OrientationParticle& p : particles) {
    p.azimuth = rng.uniform(-kPi, kPi);
    p.weight = w;
  }
  return particles;
}

void predict(std::vector<OrientationParticle>& particles, double delta_view,
             const OrientationFilterConfig& cfg, RandomStream& rng) {
  for (OrientationParticle& p : particles) {
    const double noise = cfg.motion_noise_std > 0.0 ? rng.gaussian(cfg.motion_noise_std) : 0.0;
    p.azimuth = wrap_pi(p.azimuth + delta_view + noise);
  }
}

void weigh(std::vector<OrientationParticle>& particles, std::span<const PerceivedTile> perceived,
           double believed_view_center, const BackgroundModel& model,
           const OrientationFilterConfig& cfg, double sigma0) {
  if (perceived.empty()) return;
  const TileGrid& grid = model.grid();
  const double eps = cfg.weight_floor;

  for (OrientationParticle& p : particles) {
    const double offset = angle_diff(p.azimuth, believed_view_center);
    double log_sum = 0.0;
    int matched = 0;
    for (const PerceivedTile& tile : perceived) {
      const double model_azimuth = grid.tile_center_azimuth(tile.id.col) + offset;
      const TileId model_id{tile.id.row, grid.col_at(model_azimuth)};
      const ColourHistogramModel& m = model.tile(model_id);
      if (!m.seen) continue;
      log_sum += std::log(eps + similarity(tile.histogram, m, sigma0));
      ++matched;
    }
    const double multiplier = matched > 0 ? std::exp(log_sum / matched) : eps;
    p.weight *= multiplier;
  }
}

void resample_and_inject(std::vector<OrientationParticle>& particles,
                         const OrientationFilterConfig& cfg, RandomStream& rng) {
  const int count = static_cast<int>(particles.size());
  double total = 0.0;
  for (const OrientationParticle& p : particles) total += p.weight;
  if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateWeights();

  // Best-match azimuth; ties resolved toward the lowest wrapped azimuth.
  double best_weight = -1.0;
  double best_azimuth = 0.0;
  for (const OrientationParticle& p : particles) {
    if (p.weight > best_weight ||
        (p.weight == best_weight && p.azimuth < best_azimuth)) {
      best_weight = p.weight;
      best_azimuth = p.azimuth;
    }
  }

  const int inject = static_cast<int>(std::llround(cfg.inject_fraction * count));
  const int kept = count - inject;

  std::vector<OrientationParticle> next;
  next.reserve(count);
  if (kept > 0) {
    const double step = total / kept;
    double pointer = rng.uniform() * step;
    double cumulative = particles[0].weight;
    int idx = 0;
    for (int i = 0; i < kept; ++i) {
      while (cumulative < pointer && idx + 1 < count) {
        ++idx;
        cumulative += particles[idx].weight;
      }
      next.push_back({particles[idx].azimuth, 1.0});
      pointer += step;
    }
  }
  for (int i = 0; i < inject; ++i) {
    const double noise = cfg.motion_noise_std > 0.0 ? rng.gaussian(cfg.motion_noise_std) : 0.0;
    next.push_back({wrap_pi(best_azimuth + noise), 1.0});
  }

  const double w = 1.0 / count;
  for (OrientationParticle& p : next) p.weight = w;
  particles = std::move(next);
}

ClusterEstimate cluster_center(std::span<const OrientationParticle> particles,
                               const OrientationFilterConfig& cfg) {
  double sum_sin = 0.0, sum_cos = 0.0, sum_w = 0.0;
  for (const OrientationParticle& p : particles) {
    sum_sin += p.weight * std::sin(p.azimuth);
    sum_cos += p.weight * std::cos(p.azimuth);
    sum_w += p.weight;
  }
  ClusterEstimate est;
  if (sum_w <= 0.0) return est;

  const double resultant = std::hypot(sum_sin, sum_cos) / sum_w;
  if (resultant < 1e-9) {
    // No net direction (e.g. antipodal tie): settle on the lowest wrapped azimuth.
    double lowest = kPi;
    for (const OrientationParticle& p : particles) lowest = std::min(lowest, p.azimuth);
    est.center = lowest;
    est.spread = kPi;
  } else {
    est.center = wrap_pi(std::atan2(sum_sin, sum_cos));
    est.spread = std::min(std::sqrt(-2.0 * std::log(std::min(resultant, 1.0))), kPi);
  }

  double in_window = 0.0;
  for (const OrientationParticle& p : particles) {
    if (std::abs(angle_diff(p.azimuth, est.center)) <= cfg.cluster_window) in_window += p.weight;
  }
  est.mass = in_window / sum_w;
  return est;
}

}  // namespace roomaware
