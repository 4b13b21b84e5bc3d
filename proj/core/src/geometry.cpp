#include "roomaware/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace roomaware {

double Vec2::norm() const { return std::hypot(x, y); }

TileGrid::TileGrid(const CylinderParams& params) : params_(params) {
  if (!params.valid()) throw std::invalid_argument("invalid cylinder parameters");
}

TileGrid make_tile_grid(const CylinderParams& params) { return TileGrid(params); }

int TileGrid::col_at(double azimuth) const {
  const double a = wrap_two_pi(azimuth);
  int col = static_cast<int>(a / sector_width());
  return std::min(col, params_.cols - 1);  // a == 2*pi after rounding
}

int TileGrid::wrap_col(int col) const {
  int c = col % params_.cols;
  if (c < 0) c += params_.cols;
  return c;
}

std::pair<double, double> TileGrid::col_span(int col) const {
  return {col * sector_width(), (col + 1) * sector_width()};
}

std::pair<double, double> TileGrid::row_span(int row) const {
  const double band = (params_.z_max - params_.z_min) / params_.rows;
  return {params_.z_min + row * band, params_.z_min + (row + 1) * band};
}

double view_center_azimuth(const ViewPose& v, const CylinderParams& params) {
  const double heading = v.body_heading + v.head_yaw;
  const Vec2 u{std::cos(heading), std::sin(heading)};
  const Vec2 rel = v.position - params.center;
  // |rel + t*u| = radius, take the forward root.
  const double b = rel.dot(u);
  const double c = rel.dot(rel) - params.radius * params.radius;
  const double disc = b * b - c;
  if (disc < 0.0) throw std::invalid_argument("view pose outside the cylinder");
  const double t = -b + std::sqrt(disc);
  const Vec2 hit = rel + u * t;
  return wrap_pi(std::atan2(hit.y, hit.x));
}

namespace {

struct Vec3 {
  double x = 0, y = 0, z = 0;
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

struct CameraFrame {
  Vec3 origin;
  Vec3 forward, right, down;
  double focal;  // pixels
  double cx, cy;
};

CameraFrame camera_frame(const ViewPose& v, const CameraModel& cam) {
  const double yaw = v.body_heading + v.head_yaw;
  const double pitch = v.head_pitch;
  const double cyaw = std::cos(yaw), syaw = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  CameraFrame f;
  f.origin = {v.position.x, v.position.y, cam.mount_height};
  f.forward = {cp * cyaw, cp * syaw, sp};
  f.right = {syaw, -cyaw, 0.0};
  // down = forward x right (right-handed; v grows downward in the image)
  f.down = {f.forward.y * f.right.z - f.forward.z * f.right.y,
            f.forward.z * f.right.x - f.forward.x * f.right.z,
            f.forward.x * f.right.y - f.forward.y * f.right.x};
  f.focal = (cam.image_width / 2.0) / std::tan(cam.horizontal_fov / 2.0);
  f.cx = cam.image_width / 2.0;
  f.cy = cam.image_height / 2.0;
  return f;
}

bool project(const CameraFrame& f, const CameraModel& cam, const Vec3& p, Vec2& out) {
  const Vec3 rel = p - f.origin;
  const double zc = rel.dot(f.forward);
  if (zc <= 1e-9) return false;
  const double u = f.cx + f.focal * (rel.dot(f.right) / zc);
  const double v = f.cy + f.focal * (rel.dot(f.down) / zc);
  if (u < 0.0 || u > cam.image_width || v < 0.0 || v > cam.image_height) return false;
  out = {u, v};
  return true;
}

// Does the 2D segment from a to b cross the disc?
bool segment_hits_disc(const Vec2& a, const Vec2& b, const Disc& d) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 <= 0.0) return false;
  double t = (d.center - a).dot(ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 closest = a + ab * t;
  return (closest - d.center).norm() <= d.radius;
}

}  // namespace

std::vector<ProjectedTile> visible_tiles(const ViewPose& v, const CameraModel& cam,
                                         const TileGrid& grid, std::span<const Disc> occluders) {
  const CylinderParams& cyl = grid.params();
  const CameraFrame frame = camera_frame(v, cam);
  const double view_center = view_center_azimuth(v, cyl);

  struct Entry {
    ProjectedTile tile;
    double rel_azimuth;
  };
  std::vector<Entry> found;

  for (int row = 0; row < grid.rows(); ++row) {
    const auto [z_lo, z_hi] = grid.row_span(row);
    for (int col = 0; col < grid.cols(); ++col) {
      const auto [a_lo, a_hi] = grid.col_span(col);
      const Vec2 lo_dir{std::cos(a_lo), std::sin(a_lo)};
      const Vec2 hi_dir{std::cos(a_hi), std::sin(a_hi)};
      const Vec2 lo_pt = cyl.center + lo_dir * cyl.radius;
      const Vec2 hi_pt = cyl.center + hi_dir * cyl.radius;

      const std::array<Vec3, 4> corners = {Vec3{lo_pt.x, lo_pt.y, z_lo},
                                           Vec3{hi_pt.x, hi_pt.y, z_lo},
                                           Vec3{hi_pt.x, hi_pt.y, z_hi},
                                           Vec3{lo_pt.x, lo_pt.y, z_hi}};
      ProjectedTile pt;
      pt.id = {row, col};
      bool inside = true;
      for (int k = 0; k < 4 && inside; ++k) {
        inside = project(frame, cam, corners[k], pt.quad[k]);
      }
      if (!inside) continue;

      // Grazing check against the inward wall normal at the tile center.
      const double a_mid = 0.5 * (a_lo + a_hi);
      const double z_mid = 0.5 * (z_lo + z_hi);
      const Vec2 c2 = cyl.center + Vec2{std::cos(a_mid), std::sin(a_mid)} * cyl.radius;
      const Vec3 center3{c2.x, c2.y, z_mid};
      const Vec3 to_cam = frame.origin - center3;
      const double dist = to_cam.norm();
      if (dist <= 1e-9) continue;
      const Vec3 normal{-std::cos(a_mid), -std::sin(a_mid), 0.0};
      const double cos_inc = to_cam.dot(normal) / dist;
      const double incidence = std::acos(std::clamp(cos_inc, -1.0, 1.0));
      if (incidence > cam.grazing_limit) continue;

      bool occluded = false;
      for (const Disc& d : occluders) {
        if (segment_hits_disc(v.position, c2, d)) {
          occluded = true;
          break;
        }
      }
      if (occluded) continue;

      found.push_back({pt, angle_diff(a_mid, view_center)});
    }
  }

  std::sort(found.begin(), found.end(), [](const Entry& a, const Entry& b) {
    if (a.tile.id.row != b.tile.id.row) return a.tile.id.row < b.tile.id.row;
    return a.rel_azimuth < b.rel_azimuth;
  });

  std::vector<ProjectedTile> out;
  out.reserve(found.size());
  for (Entry& e : found) out.push_back(e.tile);
  return out;
}

}  // namespace roomaware
