#include "roomaware/colour.hpp"

#include <algorithm>
#include <cmath>

#include "roomaware/errors.hpp"

namespace roomaware {

namespace {

int clamp_channel(double v) {
  return static_cast<int>(std::clamp(std::lround(v), 0L, 255L));
}

// Eight intervals over d in [-128, 127]:
// [-128,-c3) [-c3,-c2) [-c2,-c1) [-c1,0) [0,c1) [c1,c2) [c2,c3) [c3,128]
int channel_slot(int channel, const BinningConfig& cfg) {
  const int d = channel - 128;
  if (d < -cfg.c3) return 0;
  if (d < -cfg.c2) return 1;
  if (d < -cfg.c1) return 2;
  if (d < 0) return 3;
  if (d < cfg.c1) return 4;
  if (d < cfg.c2) return 5;
  if (d < cfg.c3) return 6;
  return 7;
}

}  // namespace

PixelYCrCb rgb_to_ycrcb(const PixelRGB& p) {
  const double y = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
  const double cr = 128.0 + 0.5 * p.r - 0.418688 * p.g - 0.081312 * p.b;
  const double cb = 128.0 - 0.168736 * p.r - 0.331264 * p.g + 0.5 * p.b;
  return {clamp_channel(y), clamp_channel(cr), clamp_channel(cb)};
}

std::pair<int, int> bin_index(const PixelYCrCb& p, const BinningConfig& cfg) {
  const int cr_slot = channel_slot(p.cr, cfg);
  const int cb_slot = BinningConfig::kBinsPerChannel + channel_slot(p.cb, cfg);
  return {cr_slot, cb_slot};
}

ColourHistogram build_histogram(std::span<const PixelYCrCb> samples, const BinningConfig& cfg) {
  if (samples.empty()) throw EmptyTileSample();
  ColourHistogram h;
  for (const PixelYCrCb& p : samples) {
    const auto [cr_slot, cb_slot] = bin_index(p, cfg);
    h.bins[cr_slot] += 1.0;
    h.bins[cb_slot] += 1.0;
  }
  const double denom = 2.0 * static_cast<double>(samples.size());
  for (double& b : h.bins) b /= denom;
  return h;
}

double similarity(const ColourHistogram& perceived, const ColourHistogramModel& model,
                  double sigma0) {
  if (!model.seen) throw UnseenTile();
  double num = 0.0;
  double den = 0.0;
  for (int b = 0; b < BinningConfig::kBinCount; ++b) {
    const double w = 1.0 / (model.variance[b] + sigma0);
    num += w * std::min(perceived.bins[b], model.mean[b]);
    den += w * 0.5 * (perceived.bins[b] + model.mean[b]);
  }
  if (den <= 0.0) return 0.0;
  return num / den;
}

}  // namespace roomaware
