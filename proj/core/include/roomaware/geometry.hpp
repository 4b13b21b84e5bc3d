#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "roomaware/angles.hpp"

namespace roomaware {

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const;
};

struct CylinderParams {
  Vec2 center{0.0, 0.0};
  double radius = 4.5;
  double z_min = 0.4;
  double z_max = 1.6;
  int rows = 2;
  int cols = 36;

  bool valid() const {
    return radius > 0.0 && z_max > z_min && rows >= 1 && cols >= 3;
  }
};

struct TileId {
  int row = 0;
  int col = 0;
  bool operator==(const TileId&) const = default;
};

struct CameraModel {
  double horizontal_fov = deg_to_rad(60.0);
  int image_width = 640;
  int image_height = 480;
  double mount_height = 0.45;
  double grazing_limit = deg_to_rad(75.0);  // max incidence angle against the tile normal
};

// Robot viewing pose; the optical axis heading is body_heading + head_yaw.
struct ViewPose {
  Vec2 position{0.0, 0.0};
  double body_heading = 0.0;
  double head_yaw = 0.0;
  double head_pitch = 0.0;  // positive looks up
};

// Cylindrical wall cut into `cols` equal azimuth sectors and `rows` height
// bands. Column c spans azimuth [c, c+1) * 2*pi/cols around the cylinder
// center, measured in the field frame.
class TileGrid {
 public:
  TileGrid() : TileGrid(CylinderParams{}) {}
  explicit TileGrid(const CylinderParams& params);

  const CylinderParams& params() const { return params_; }
  int rows() const { return params_.rows; }
  int cols() const { return params_.cols; }
  int tile_count() const { return params_.rows * params_.cols; }
  int index_of(TileId id) const { return id.row * params_.cols + id.col; }

  double sector_width() const { return kTwoPi / params_.cols; }
  double tile_center_azimuth(int col) const { return (col + 0.5) * sector_width(); }
  int col_at(double azimuth) const;
  int wrap_col(int col) const;

  // [begin, end) azimuth span of a column, in [0, 2*pi).
  std::pair<double, double> col_span(int col) const;
  // [low, high) height band of a row.
  std::pair<double, double> row_span(int row) const;

  bool operator==(const TileGrid& o) const {
    return params_.rows == o.params_.rows && params_.cols == o.params_.cols &&
           params_.radius == o.params_.radius && params_.z_min == o.params_.z_min &&
           params_.z_max == o.params_.z_max && params_.center.x == o.params_.center.x &&
           params_.center.y == o.params_.center.y;
  }

 private:
  CylinderParams params_;
};

TileGrid make_tile_grid(const CylinderParams& params);

// Azimuth (field frame, about the cylinder center) of the point where the
// optical axis meets the cylinder. The pose must lie inside the cylinder.
double view_center_azimuth(const ViewPose& v, const CylinderParams& params);

// Vertical occluder disc (another robot) on the ground plane.
struct Disc {
  Vec2 center;
  double radius = 0.15;
};

struct ProjectedTile {
  TileId id;
  std::array<Vec2, 4> quad;  // image-space corners, pixels
};

// Tiles whose projected quad lies fully inside the image, excluding tiles
// whose center ray crosses an occluder disc and tiles seen at more than the
// grazing incidence limit. Ordered by row, then by azimuth offset from the
// view center (a rotation-equivariant order).
std::vector<ProjectedTile> visible_tiles(const ViewPose& v, const CameraModel& cam,
                                         const TileGrid& grid,
                                         std::span<const Disc> occluders = {});

}  // namespace roomaware
