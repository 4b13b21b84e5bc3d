#include "roomaware/confidence.hpp"

#include <cmath>
#include <stdexcept>

#include "roomaware/angles.hpp"

namespace roomaware {

ConfidencePair pose_confidences(std::span<const OrientationParticle> particles,
                                double believed_view_center, double fov) {
  if (!(fov > 0.0 && fov < kPi)) throw std::invalid_argument("confidence fov must be in (0, pi)");
  const double half = fov / 2.0;
  const double antipode = believed_view_center + kPi;
  double current = 0.0, reflected = 0.0, total = 0.0;
  for (const OrientationParticle& p : particles) {
    total += p.weight;
    if (std::abs(angle_diff(p.azimuth, believed_view_center)) <= half) current += p.weight;
    if (std::abs(angle_diff(p.azimuth, antipode)) <= half) reflected += p.weight;
  }
  if (total <= 0.0) return {};
  return {current / total, reflected / total};
}

ConfidenceHistory::ConfidenceHistory(int window) : window_(window) {
  if (window < 1) throw std::invalid_argument("confidence window must be >= 1");
  samples_.reserve(window);
}

void ConfidenceHistory::push(ConfidencePair sample) {
  if (static_cast<int>(samples_.size()) < window_) {
    samples_.push_back(sample);
  } else {
    samples_[head_] = sample;
    head_ = (head_ + 1) % window_;
  }
  ConfidencePair mean;
  for (const ConfidencePair& s : samples_) {
    mean.current += s.current;
    mean.reflected += s.reflected;
  }
  mean.current /= samples_.size();
  mean.reflected /= samples_.size();
  smoothed_ = mean;
}

void ConfidenceHistory::clear() {
  samples_.clear();
  head_ = 0;
  smoothed_ = {};
}

}  // namespace roomaware
