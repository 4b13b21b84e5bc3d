#pragma once

#include <array>
#include <span>
#include <utility>

namespace roomaware {

struct PixelRGB {
  int r = 0, g = 0, b = 0;
};

// Luma plus centered chroma; neutral chroma sits at 128.
struct PixelYCrCb {
  int y = 0, cr = 128, cb = 128;
};

// Chroma bin layout: per channel, the centered value d = channel - 128 falls
// into one of eight intervals cut by the sign and the thresholds c1 < c2 < c3.
struct BinningConfig {
  int c1 = 16;
  int c2 = 32;
  int c3 = 64;

  static constexpr int kBinsPerChannel = 8;
  static constexpr int kBinCount = 16;  // Cr bins 0..7, Cb bins 8..15

  bool valid() const { return 0 < c1 && c1 < c2 && c2 < c3 && c3 <= 128; }
};

// Normalized descriptor; bins sum to 1.
struct ColourHistogram {
  std::array<double, BinningConfig::kBinCount> bins{};
};

// Per-tile model: moving-average mean and per-bin variance.
struct ColourHistogramModel {
  std::array<double, BinningConfig::kBinCount> mean{};
  std::array<double, BinningConfig::kBinCount> variance{};
  bool seen = false;
  int update_weight = 20;  // the smoothing parameter N the tile was trained with
};

// Full-range BT.601, rounded to nearest and clamped to [0, 255].
PixelYCrCb rgb_to_ycrcb(const PixelRGB& p);

// (cr slot in 0..7, cb slot in 8..15). Total over all valid pixels.
std::pair<int, int> bin_index(const PixelYCrCb& p, const BinningConfig& cfg);

// Each pixel contributes one Cr and one Cb count; normalized by 2*|samples|.
// Throws EmptyTileSample when samples is empty.
ColourHistogram build_histogram(std::span<const PixelYCrCb> samples, const BinningConfig& cfg);

// Variance-weighted histogram intersection in [0, 1]. Bins with unstable model
// variance are down-weighted by w_b = 1 / (variance_b + sigma0).
// Throws UnseenTile when the model tile was never trained.
double similarity(const ColourHistogram& perceived, const ColourHistogramModel& model,
                  double sigma0);

}  // namespace roomaware
