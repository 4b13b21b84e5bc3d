#include "roomaware/background_model.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "roomaware/errors.hpp"

namespace roomaware {

BackgroundModel::BackgroundModel(const TileGrid& grid, int n_param)
    : grid_(grid), tiles_(grid.tile_count()), n_param_(n_param) {
  if (n_param < 1) throw std::invalid_argument("n_param must be >= 1");
  for (ColourHistogramModel& t : tiles_) t.update_weight = n_param;
}

void BackgroundModel::update_tile(TileId id, const ColourHistogram& perceived) {
  if (!training_enabled_) {
    ++dropped_updates_;
    return;
  }
  ColourHistogramModel& t = tiles_[grid_.index_of(id)];
  if (!t.seen) {
    t.mean = perceived.bins;
    t.variance.fill(0.0);
    t.seen = true;
  } else {
    const double n = static_cast<double>(n_param_);
    for (int b = 0; b < BinningConfig::kBinCount; ++b) {
      const double x = perceived.bins[b];
      const double mu = t.mean[b];
      const double diff = mu - x;
      t.mean[b] = (n * mu + x) / (n + 1.0);
      t.variance[b] = (n * t.variance[b] + (n / (n + 1.0)) * diff * diff) / (n + 1.0);
    }
  }
  ++version_;
}

void BackgroundModel::set_training_gate(bool enabled, GateReason reason, long frame) {
  if (enabled == training_enabled_) return;
  training_enabled_ = enabled;
  gate_log_.push_back({frame, enabled, reason});
}

int BackgroundModel::seen_count() const {
  int n = 0;
  for (const ColourHistogramModel& t : tiles_) n += t.seen ? 1 : 0;
  return n;
}

namespace {

// %.17g round-trips binary64 exactly through decimal.
void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::string BackgroundModel::snapshot() const {
  std::string out;
  out.reserve(tiles_.size() * 700);
  out += kMagic;
  out += '\n';
  char header[256];
  std::snprintf(header, sizeof(header),
                "n_param %d\nrows %d\ncols %d\nversion %" PRId64 "\ngate %d\ndropped %" PRId64
                "\n",
                n_param_, grid_.rows(), grid_.cols(), version_, training_enabled_ ? 1 : 0,
                dropped_updates_);
  out += header;
  for (int row = 0; row < grid_.rows(); ++row) {
    for (int col = 0; col < grid_.cols(); ++col) {
      const ColourHistogramModel& t = tiles_[row * grid_.cols() + col];
      char lead[64];
      std::snprintf(lead, sizeof(lead), "tile %d %d %d", row, col, t.seen ? 1 : 0);
      out += lead;
      for (double m : t.mean) {
        out += ' ';
        append_double(out, m);
      }
      for (double v : t.variance) {
        out += ' ';
        append_double(out, v);
      }
      out += '\n';
    }
  }
  return out;
}

BackgroundModel BackgroundModel::load(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  std::string magic;
  if (!(in >> magic) || magic != kMagic) throw ModelFormat("bad magic");

  auto read_field = [&in](const char* name) -> long long {
    std::string key;
    long long value = 0;
    if (!(in >> key >> value) || key != name) throw ModelFormat(std::string("expected ") + name);
    return value;
  };
  const int n_param = static_cast<int>(read_field("n_param"));
  const int rows = static_cast<int>(read_field("rows"));
  const int cols = static_cast<int>(read_field("cols"));
  const std::int64_t version = read_field("version");
  const bool gate = read_field("gate") != 0;
  const std::int64_t dropped = read_field("dropped");

  if (n_param < 1 || rows < 1 || cols < 3) throw ModelFormat("bad header values");

  CylinderParams params;
  params.rows = rows;
  params.cols = cols;
  BackgroundModel model{TileGrid(params), n_param};
  model.training_enabled_ = gate;
  model.version_ = version;
  model.dropped_updates_ = dropped;

  for (int i = 0; i < rows * cols; ++i) {
    std::string tag;
    int row = 0, col = 0, seen = 0;
    if (!(in >> tag >> row >> col >> seen) || tag != "tile") throw ModelFormat("truncated tiles");
    if (row < 0 || row >= rows || col < 0 || col >= cols) throw ModelFormat("tile out of range");
    ColourHistogramModel& t = model.tiles_[row * cols + col];
    t.seen = seen != 0;
    t.update_weight = n_param;
    for (double& m : t.mean) {
      if (!(in >> m)) throw ModelFormat("truncated mean");
    }
    for (double& v : t.variance) {
      if (!(in >> v)) throw ModelFormat("truncated variance");
    }
  }
  return model;
}

bool BackgroundModel::operator==(const BackgroundModel& o) const {
  // Identity is the trained content plus counters; only the grid shape matters
  // here (the cylinder metrics live with the geometry, not the model).
  if (grid_.rows() != o.grid_.rows() || grid_.cols() != o.grid_.cols() ||
      n_param_ != o.n_param_ || version_ != o.version_ ||
      training_enabled_ != o.training_enabled_ || dropped_updates_ != o.dropped_updates_) {
    return false;
  }
  for (size_t i = 0; i < tiles_.size(); ++i) {
    if (tiles_[i].seen != o.tiles_[i].seen || tiles_[i].mean != o.tiles_[i].mean ||
        tiles_[i].variance != o.tiles_[i].variance) {
      return false;
    }
  }
  return true;
}

}  // namespace roomaware
