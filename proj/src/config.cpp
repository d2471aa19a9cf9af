#include "lvr/config.hpp"

#include "lvr/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

namespace lvr {
namespace {

using json = nlohmann::ordered_json;

// Reads the keys of one JSON object, remembering which were consumed so the
// leftovers can be reported.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) fail(ErrorCode::Config, "'" + name_ + "' must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    bool ok = true;
    if constexpr (std::is_same_v<T, bool>) {
      ok = it->is_boolean();
    } else if constexpr (std::is_unsigned_v<T>) {
      ok = it->is_number_unsigned();
    } else if constexpr (std::is_integral_v<T>) {
      ok = it->is_number_integer();
    } else {
      ok = it->is_number();
    }
    if (!ok) fail(ErrorCode::Config, "bad value for '" + name_ + "." + key + "'");
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::Config, "bad value for '" + name_ + "." + key + "'");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail(ErrorCode::Config, "unknown key '" + name_ + "." + k + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

// Each component is described once; the same visitor drives dump and parse.
template <class V>
void visit(V& v, OccupancyParams& p) {
  v("voxel_size", p.voxel_size);
  v("log_odds_hit", p.log_odds_hit);
  v("log_odds_miss", p.log_odds_miss);
  v("log_odds_min", p.log_odds_min);
  v("log_odds_max", p.log_odds_max);
  v("occupied_threshold", p.occupied_threshold);
  v("max_ray_range", p.max_ray_range);
}

template <class V>
void visit(V& v, SubmapPolicy& p) {
  v("min_intersection_fraction", p.min_intersection_fraction);
  v("max_projections_per_partial", p.max_projections_per_partial);
  v("partials_per_submap", p.partials_per_submap);
  v("compare_previous_partial", p.compare_previous_partial);
  v("require_both", p.require_both);
}

template <class V>
void visit(V& v, RegistrationConfig& p) {
  v("d_thr", p.d_thr);
  v("tau", p.tau);
  v("power_iters_max", p.power_iters_max);
  v("power_tol", p.power_tol);
  v("min_correspondences", p.min_correspondences);
}

template <class V>
void visit(V& v, RansacConfig& p) {
  v("iterations", p.iterations);
  v("inlier_eps", p.inlier_eps);
  v("seed", p.seed);
}

template <class V>
void visit(V& v, TupleConfig& p) {
  v("alpha_pos_pr", p.alpha_pos_pr);
  v("alpha_pos_reg", p.alpha_pos_reg);
  v("alpha_neg", p.alpha_neg);
  v("inlier_distance", p.inlier_distance);
  v("symmetric_ratio", p.symmetric_ratio);
}

template <class V>
void visit(V& v, LossConfig& p) {
  v("margin", p.margin);
  v("descriptor_loss_negate_distances", p.descriptor_loss_negate_distances);
}

template <class V>
void visit(V& v, SyntheticWorldConfig& p) {
  v("seed", p.seed);
  v("extent", p.extent);
  v("n_landmark_surfaces", p.n_landmark_surfaces);
  v("trajectory_length", p.trajectory_length);
  v("frame_spacing", p.frame_spacing);
  v("depth_noise_sigma", p.depth_noise_sigma);
  v("scan_range", p.scan_range);
  v("scan_points", p.scan_points);
  v("scan_spacing", p.scan_spacing);
  v("reverse_revisits", p.reverse_revisits);
  v("image_width", p.image_width);
  v("image_height", p.image_height);
  v("horizontal_fov_deg", p.horizontal_fov_deg);
  v("depth_max_range", p.depth_max_range);
  v("camera_height", p.camera_height);
  v("lidar_height", p.lidar_height);
  v("lidar_beams", p.lidar_beams);
  v("road_half_width", p.road_half_width);
  v("road_amplitude", p.road_amplitude);
  v("road_wavelength", p.road_wavelength);
}

template <class V>
void visit(V& v, OracleNoise& p) {
  v("global", p.global);
  v("local", p.local);
  v("outlier_fraction", p.outlier_fraction);
}

template <class V>
void visit(V& v, OracleConfig& p) {
  v("global_voxel", p.global_voxel);
  v("keypoint_voxel", p.keypoint_voxel);
  v("max_keypoints", p.max_keypoints);
  v("min_world_z", p.min_world_z);
  v("crop_radius", p.crop_radius);
  v("farthest_point_sampling", p.farthest_point_sampling);
  v("saliency_min", p.saliency_min);
  v("saliency_max", p.saliency_max);
}

struct Dumper {
  json& j;
  template <class T>
  void operator()(const char* key, const T& value) {
    j[key] = value;
  }
};

struct Parser {
  Section& s;
  template <class T>
  void operator()(const char* key, T& value) {
    s.get(key, value);
  }
};

template <class T>
json dump_section(T value) {
  json j = json::object();
  Dumper d{j};
  visit(d, value);
  return j;
}

template <class T>
void parse_section(Section& parent, const char* key, T& out) {
  const json* j = parent.child(key);
  if (j == nullptr) return;
  Section s(*j, key);
  Parser p{s};
  visit(p, out);
  s.finish();
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Config, std::string("malformed JSON: ") + e.what());
  }
}

void check_version(Section& root, bool required) {
  int version = -1;
  root.get("version", version);
  if (version == -1 && !required) return;
  if (version != kConfigVersion) {
    fail(ErrorCode::Config, "unsupported config version " + std::to_string(version));
  }
}

template <class F>
void revalidate(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    fail(ErrorCode::Config, e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  occupancy.validate();
  submap.validate();
  registration.validate();
  tuples.validate();
  loss.validate();
  world.validate();
  if (ransac.iterations == 0 || !(ransac.inlier_eps > 0.0)) {
    fail(ErrorCode::InvalidArgument, "invalid RANSAC configuration");
  }
  if (oracle_noise.global < 0.0 || oracle_noise.local < 0.0 || oracle_noise.outlier_fraction < 0.0 ||
      oracle_noise.outlier_fraction > 1.0) {
    fail(ErrorCode::InvalidArgument, "invalid oracle noise");
  }
  if (!(oracle.global_voxel > 0.0) || !(oracle.keypoint_voxel > 0.0) || oracle.max_keypoints == 0 ||
      !(oracle.crop_radius > 0.0) || !(oracle.saliency_min > 0.0) || oracle.saliency_max < oracle.saliency_min) {
    fail(ErrorCode::InvalidArgument, "invalid oracle configuration");
  }
}

std::string dump_config(const PipelineConfig& cfg) {
  json j;
  j["version"] = kConfigVersion;
  j["provider_seed"] = cfg.provider_seed;
  j["occupancy"] = dump_section(cfg.occupancy);
  j["submap"] = dump_section(cfg.submap);
  j["registration"] = dump_section(cfg.registration);
  j["ransac"] = dump_section(cfg.ransac);
  j["tuples"] = dump_section(cfg.tuples);
  j["loss"] = dump_section(cfg.loss);
  j["world"] = dump_section(cfg.world);
  j["oracle_noise"] = dump_section(cfg.oracle_noise);
  j["oracle"] = dump_section(cfg.oracle);
  return j.dump(2) + "\n";
}

PipelineConfig parse_config(const std::string& text) {
  const json j = parse_text(text);
  Section root(j, "config");
  check_version(root, true);
  PipelineConfig cfg;
  root.get("provider_seed", cfg.provider_seed);
  parse_section(root, "occupancy", cfg.occupancy);
  parse_section(root, "submap", cfg.submap);
  parse_section(root, "registration", cfg.registration);
  parse_section(root, "ransac", cfg.ransac);
  parse_section(root, "tuples", cfg.tuples);
  parse_section(root, "loss", cfg.loss);
  parse_section(root, "world", cfg.world);
  parse_section(root, "oracle_noise", cfg.oracle_noise);
  parse_section(root, "oracle", cfg.oracle);
  root.finish();
  revalidate([&] { cfg.validate(); });
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) fail(ErrorCode::Io, "cannot open config: " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

SyntheticWorldConfig parse_world_config(const std::string& text) {
  const json j = parse_text(text);
  Section root(j, "world");
  check_version(root, false);
  SyntheticWorldConfig cfg;
  Parser p{root};
  visit(p, cfg);
  root.finish();
  revalidate([&] { cfg.validate(); });
  return cfg;
}

std::string dump_world_config(const SyntheticWorldConfig& cfg) {
  json j;
  j["version"] = kConfigVersion;
  j.update(dump_section(cfg));
  return j.dump(2) + "\n";
}

bool operator==(const PipelineConfig& a, const PipelineConfig& b) { return dump_config(a) == dump_config(b); }

}  // namespace lvr
