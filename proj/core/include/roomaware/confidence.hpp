#pragma once

#include <span>
#include <vector>

#include "roomaware/orientation_filter.hpp"

namespace roomaware {

// Weighted particle fractions inside a virtual field of view around the
// believed view center (current) and its antipode (reflected).
struct ConfidencePair {
  double current = 0.0;
  double reflected = 0.0;
};

ConfidencePair pose_confidences(std::span<const OrientationParticle> particles,
                                double believed_view_center, double fov);

// Fixed-length window of confidence pairs; the smoothed value is the
// component-wise arithmetic mean of the window contents.
class ConfidenceHistory {
 public:
  explicit ConfidenceHistory(int window);

  void push(ConfidencePair sample);
  ConfidencePair smoothed() const { return smoothed_; }
  int window() const { return window_; }
  int size() const { return static_cast<int>(samples_.size()); }
  void clear();

 private:
  int window_;
  int head_ = 0;
  std::vector<ConfidencePair> samples_;
  ConfidencePair smoothed_;
};

}  // namespace roomaware
