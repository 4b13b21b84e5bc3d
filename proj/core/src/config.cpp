#include "roomaware/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "roomaware/errors.hpp"

namespace roomaware {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view key, std::string_view value) {
  try {
    size_t pos = 0;
    const double v = std::stod(std::string(value), &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + std::string(key) + ": '" + std::string(value) + "'");
  }
}

int parse_int(std::string_view key, std::string_view value) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("bad integer for " + std::string(key) + ": '" + std::string(value) + "'");
  }
  return v;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str());
}

Config Config::from_string(std::string_view text) {
  Config cfg;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    cfg.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

void Config::apply(std::string_view key, std::string_view value) {
  auto d = [&] { return parse_double(key, value); };
  auto i = [&] { return parse_int(key, value); };

  if (key == "colour.c1") binning.c1 = i();
  else if (key == "colour.c2") binning.c2 = i();
  else if (key == "colour.c3") binning.c3 = i();
  else if (key == "colour.sigma0") sigma0 = d();
  else if (key == "wall.radius") world.cylinder.radius = d();
  else if (key == "wall.rows") world.cylinder.rows = i();
  else if (key == "wall.cols") world.cylinder.cols = i();
  else if (key == "wall.z_min") world.cylinder.z_min = d();
  else if (key == "wall.z_max") world.cylinder.z_max = d();
  else if (key == "camera.hfov_deg") world.camera.horizontal_fov = deg_to_rad(d());
  else if (key == "camera.width") world.camera.image_width = i();
  else if (key == "camera.height") world.camera.image_height = i();
  else if (key == "camera.grazing_deg") world.camera.grazing_limit = deg_to_rad(d());
  else if (key == "camera.mount_height") world.camera.mount_height = d();
  else if (key == "model.n_param") n_param = i();
  else if (key == "filter.count") filter.particle_count = i();
  else if (key == "filter.noise_std") filter.motion_noise_std = d();
  else if (key == "filter.inject_fraction") filter.inject_fraction = d();
  else if (key == "filter.epsilon") filter.weight_floor = d();
  else if (key == "filter.cluster_window") filter.cluster_window = d();
  else if (key == "confidence.fov_deg") confidence_fov = deg_to_rad(d());
  else if (key == "confidence.window") confidence_window = i();
  else if (key == "bc.flip_margin") bc.flip_margin = d();
  else if (key == "bc.purge_margin") bc.purge_margin = d();
  else if (key == "bc.hold_frames") bc.hold_frames = i();
  else if (key == "bc.cooldown_frames") bc.cooldown_frames = i();
  else if (key == "bc.train_margin") bc.train_margin = d();
  else if (key == "mcl.count") mcl.particle_count = i();
  else if (key == "mcl.motion_xy_std") mcl.motion_xy_std = d();
  else if (key == "mcl.motion_heading_std") mcl.motion_heading_std = d();
  else if (key == "mcl.init_pos_std") mcl.init_pos_std = d();
  else if (key == "mcl.init_heading_std") mcl.init_heading_std = d();
  else if (key == "mcl.purge_radius") mcl.purge_radius = d();
  else if (key == "mcl.multimodal_threshold") mcl.multimodal_threshold = d();
  else if (key == "field.length" || key == "field.width") {
    if (key == "field.length") world.field_length = d();
    else world.field_width = d();
    world.map = FieldMap::standard(world.field_length, world.field_width);
  } else if (key == "texture.mode") {
    if (value == "asymmetric") world.texture_mode = TextureMode::Asymmetric;
    else if (value == "periodic") world.texture_mode = TextureMode::Periodic;
    else throw ConfigError("texture.mode must be asymmetric or periodic");
  }
  else if (key == "texture.patches") world.patch_count = i();
  else if (key == "texture.noise_std") world.texture_noise_std = d();
  else if (key == "sim.sample_noise_std") world.sample_noise_std = d();
  else if (key == "sim.pixels_per_tile") world.pixels_per_tile = i();
  else if (key == "sim.obs_range_std") world.obs_range_std = d();
  else if (key == "sim.obs_bearing_std") world.obs_bearing_std = d();
  else if (key == "sim.obs_max_range") world.obs_max_range = d();
  else if (key == "sim.odo_xy_std") world.odo_xy_std = d();
  else if (key == "sim.odo_heading_std") world.odo_heading_std = d();
  else if (key == "scenario.frame_rate") frame_rate = d();
  else if (key == "scenario.duration_s") duration_s = d();
  else if (key == "scenario.init") {
    if (value == "correct") init = InitMode::CorrectPose;
    else if (value == "reflected") init = InitMode::ReflectedPose;
    else throw ConfigError("scenario.init must be correct or reflected");
  } else if (key == "scenario.list") {
    scenarios.clear();
    size_t start = 0;
    const std::string list(value);
    while (start <= list.size()) {
      size_t comma = list.find(',', start);
      if (comma == std::string::npos) comma = list.size();
      const std::string_view item = trim(std::string_view(list).substr(start, comma - start));
      if (item == "head-only") scenarios.push_back(ScenarioKind::HeadOnly);
      else if (item == "penalty-walk") scenarios.push_back(ScenarioKind::PenaltyWalk);
      else if (!item.empty()) throw ConfigError("unknown scenario '" + std::string(item) + "'");
      start = comma + 1;
    }
  }
  else if (key == "trials.head_only") trials_head_only = i();
  else if (key == "trials.penalty_walk") trials_penalty_walk = i();
  else if (key == "harness.warmup_s") warmup_s = d();
  else if (key == "harness.settle_s") settle_s = d();
  else if (key == "harness.correctness_delay_s") correctness_delay_s = d();
  else if (key == "harness.jobs") jobs = i();
  else throw ConfigError("unknown key '" + std::string(key) + "'");
}

void Config::validate() const {
  if (!binning.valid()) throw ConfigError("colour thresholds must satisfy 0 < c1 < c2 < c3 <= 128");
  if (!(sigma0 > 0.0)) throw ConfigError("colour.sigma0 must be > 0");
  if (!world.cylinder.valid()) throw ConfigError("wall parameters invalid");
  if (!(world.camera.horizontal_fov > 0.0 && world.camera.horizontal_fov < kPi)) {
    throw ConfigError("camera.hfov_deg must be in (0, 180)");
  }
  if (world.camera.image_width <= 0 || world.camera.image_height <= 0) {
    throw ConfigError("camera image dimensions must be positive");
  }
  if (n_param < 1) throw ConfigError("model.n_param must be >= 1");
  if (!filter.valid()) throw ConfigError("filter parameters invalid");
  if (!(confidence_fov > 0.0 && confidence_fov < kPi)) {
    throw ConfigError("confidence.fov_deg must be in (0, 180)");
  }
  if (confidence_window < 1) throw ConfigError("confidence.window must be >= 1");
  if (!bc.valid()) throw ConfigError("bc parameters invalid");
  if (!mcl.valid()) throw ConfigError("mcl parameters invalid");
  if (!world.map.point_symmetric()) throw ConfigError("field map must be point-symmetric");
  if (!(frame_rate > 0.0)) throw ConfigError("scenario.frame_rate must be > 0");
  if (!(duration_s > 0.0)) throw ConfigError("scenario.duration_s must be > 0");
  if (warmup_s < 0.0 || settle_s < 0.0 || correctness_delay_s < 0.0) {
    throw ConfigError("harness durations must be >= 0");
  }
  if (world.pixels_per_tile < 1) throw ConfigError("sim.pixels_per_tile must be >= 1");
  if (world.patch_count < 0) throw ConfigError("texture.patches must be >= 0");
}

Scenario Config::make_scenario(ScenarioKind kind, bool switch_side) const {
  Scenario s;
  s.kind = kind;
  s.duration_frames = static_cast<int>(std::lround(duration_s * frame_rate));
  s.init = init;
  s.frame_rate = frame_rate;
  s.switch_side = switch_side;
  return s;
}

int Config::trials_for(ScenarioKind kind) const {
  return kind == ScenarioKind::HeadOnly ? trials_head_only : trials_penalty_walk;
}

}  // namespace roomaware
