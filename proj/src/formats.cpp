#include "lvr/formats.hpp"

#include "lvr/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace lvr::formats {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const char* what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    fail(ErrorCode::Format, std::string("truncated stream while reading ") + what);
  }
  return v;
}

void put_magic(std::ostream& os, const char (&magic)[5]) { os.write(magic, 4); }

void expect_magic(std::istream& is, const char (&magic)[5]) {
  char buf[4];
  if (!is.read(buf, 4) || std::memcmp(buf, magic, 4) != 0) {
    fail(ErrorCode::Format, std::string("missing ") + magic + " header");
  }
}

void expect_version(std::istream& is, std::uint32_t want, const char* fmt) {
  const auto v = get<std::uint32_t>(is, "version");
  if (v != want) {
    fail(ErrorCode::Format, std::string("unsupported ") + fmt + " version " + std::to_string(v));
  }
}

void put_pose(std::ostream& os, const RigidTransform& t) {
  const Eigen::Quaterniond q = t.quaternion();
  for (double v : {t.translation.x(), t.translation.y(), t.translation.z(), q.x(), q.y(), q.z(), q.w()}) {
    put<double>(os, v);
  }
}

RigidTransform get_pose(std::istream& is) {
  double v[7];
  for (double& x : v) x = get<double>(is, "pose");
  return RigidTransform::from_tum({v[0], v[1], v[2]}, v[3], v[4], v[5], v[6]);
}

template <class Writer>
void write_file(const std::filesystem::path& p, Writer&& w, bool binary = true) {
  std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
  if (!os) fail(ErrorCode::Io, "cannot open for writing: " + p.string());
  w(os);
  if (!os) fail(ErrorCode::Io, "write failed: " + p.string());
}

std::ifstream open_read(const std::filesystem::path& p, bool binary = true) {
  std::ifstream is(p, binary ? std::ios::binary : std::ios::in);
  if (!is) fail(ErrorCode::Io, "cannot open for reading: " + p.string());
  return is;
}

}  // namespace

void write_depth_image(std::ostream& os, const DepthImage& img) {
  if (img.depth.size() != std::size_t{img.height} * img.width) {
    fail(ErrorCode::DimensionMismatch, "depth buffer does not match H×W");
  }
  put_magic(os, "DPTH");
  put<std::uint32_t>(os, kDepthVersion);
  put<std::uint32_t>(os, img.height);
  put<std::uint32_t>(os, img.width);
  put<double>(os, img.timestamp);
  put_pose(os, img.pose);
  for (double d : img.depth) put<float>(os, std::isfinite(d) && d > 0.0 ? static_cast<float>(d) : 0.0f);
}

DepthImage read_depth_image(std::istream& is) {
  expect_magic(is, "DPTH");
  expect_version(is, kDepthVersion, "DPTH");
  DepthImage img;
  img.height = get<std::uint32_t>(is, "height");
  img.width = get<std::uint32_t>(is, "width");
  img.timestamp = get<double>(is, "timestamp");
  img.pose = get_pose(is);
  img.depth.resize(std::size_t{img.height} * img.width);
  for (double& d : img.depth) d = get<float>(is, "depth");
  return img;
}

void write_grid(std::ostream& os, const VoxelGrid& grid) {
  put_magic(os, "OCCG");
  put<std::uint32_t>(os, kGridVersion);
  put<float>(os, static_cast<float>(grid.params().voxel_size));
  for (const auto& [v, l] : grid.sorted_cells()) {
    put<std::int32_t>(os, v.x);
    put<std::int32_t>(os, v.y);
    put<std::int32_t>(os, v.z);
    put<float>(os, static_cast<float>(l));
  }
}

VoxelGrid read_grid(std::istream& is, OccupancyParams params) {
  expect_magic(is, "OCCG");
  expect_version(is, kGridVersion, "OCCG");
  params.voxel_size = get<float>(is, "voxel_size");
  VoxelGrid grid(params);
  while (is.peek() != std::char_traits<char>::eof()) {
    VoxelIndex v;
    v.x = get<std::int32_t>(is, "voxel x");
    v.y = get<std::int32_t>(is, "voxel y");
    v.z = get<std::int32_t>(is, "voxel z");
    const float l = get<float>(is, "log-odds");
    if (grid.log_odds(v)) fail(ErrorCode::Format, "duplicate voxel record in OCCG stream");
    grid.update(v, l);
  }
  return grid;
}

void write_features(std::ostream& os, const Description& d) {
  const KeypointSet& k = d.keypoints;
  put_magic(os, "FEAT");
  put<std::uint32_t>(os, kFeatureVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(k.size()));
  for (Eigen::Index i = 0; i < kGlobalDim; ++i) put<float>(os, static_cast<float>(d.global.values()[i]));
  for (std::size_t i = 0; i < k.size(); ++i) {
    for (int a = 0; a < 3; ++a) put<float>(os, static_cast<float>(k.coords()[i][a]));
    for (Eigen::Index j = 0; j < kLocalDim; ++j) {
      put<float>(os, static_cast<float>(k.features()(static_cast<Eigen::Index>(i), j)));
    }
    put<float>(os, static_cast<float>(k.saliency()[i]));
  }
}

Description read_features(std::istream& is) {
  expect_magic(is, "FEAT");
  expect_version(is, kFeatureVersion, "FEAT");
  const auto n = get<std::uint32_t>(is, "keypoint count");
  Eigen::VectorXd g(kGlobalDim);
  for (Eigen::Index i = 0; i < kGlobalDim; ++i) g[i] = get<float>(is, "global descriptor");
  std::vector<Vec3> coords(n);
  FeatureMatrix feats(static_cast<Eigen::Index>(n), kLocalDim);
  std::vector<double> sal(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) coords[i][a] = get<float>(is, "keypoint coordinate");
    for (Eigen::Index j = 0; j < kLocalDim; ++j) feats(i, j) = get<float>(is, "keypoint feature");
    sal[i] = get<float>(is, "saliency");
  }
  return {GlobalDescriptor(std::move(g)), KeypointSet(std::move(coords), std::move(feats), std::move(sal))};
}

void write_ply(std::ostream& os, const PointCloud& cloud, PlyEncoding enc) {
  os << "ply\nformat " << (enc == PlyEncoding::Ascii ? "ascii" : "binary_little_endian")
     << " 1.0\nelement vertex " << cloud.size()
     << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  if (enc == PlyEncoding::Ascii) {
    char buf[128];
    for (const Vec3& p : cloud) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
      os << buf;
    }
  } else {
    for (const Vec3& p : cloud) {
      put<double>(os, p.x());
      put<double>(os, p.y());
      put<double>(os, p.z());
    }
  }
}

PointCloud read_ply(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "ply") fail(ErrorCode::Format, "missing ply magic");
  bool ascii = false;
  std::size_t count = 0;
  bool in_vertex = false;
  struct Prop {
    std::string type;
    std::string name;
  };
  std::vector<Prop> props;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw == "format") {
      std::string f;
      ss >> f;
      if (f == "ascii") ascii = true;
      else if (f != "binary_little_endian") fail(ErrorCode::Format, "unsupported ply format " + f);
    } else if (kw == "element") {
      std::string name;
      ss >> name;
      in_vertex = name == "vertex";
      if (in_vertex) ss >> count;
      else fail(ErrorCode::Format, "only vertex elements are supported");
    } else if (kw == "property" && in_vertex) {
      Prop p;
      ss >> p.type >> p.name;
      if (p.type != "float" && p.type != "double" && p.type != "float32" && p.type != "float64") {
        fail(ErrorCode::Format, "unsupported ply property type " + p.type);
      }
      props.push_back(p);
    } else if (kw == "end_header") {
      break;
    }
  }
  int ix = -1, iy = -1, iz = -1;
  for (int i = 0; i < static_cast<int>(props.size()); ++i) {
    if (props[i].name == "x") ix = i;
    if (props[i].name == "y") iy = i;
    if (props[i].name == "z") iz = i;
  }
  if (ix < 0 || iy < 0 || iz < 0) fail(ErrorCode::Format, "ply lacks x/y/z properties");
  PointCloud out(count);
  std::vector<double> row(props.size());
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < props.size(); ++j) {
      if (ascii) {
        if (!(is >> row[j])) fail(ErrorCode::Format, "truncated ascii ply");
      } else if (props[j].type == "double" || props[j].type == "float64") {
        row[j] = get<double>(is, "ply vertex");
      } else {
        row[j] = get<float>(is, "ply vertex");
      }
    }
    out[i] = {row[ix], row[iy], row[iz]};
  }
  return out;
}

void write_positions_csv(std::ostream& os, const std::vector<PositionRecord>& rows) {
  os << "id,x,y,z\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%llu,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(r.id), r.position.x(), r.position.y(),
                  r.position.z());
    os << buf;
  }
}

std::vector<PositionRecord> read_positions_csv(std::istream& is) {
  std::vector<PositionRecord> out;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "id,x,y,z") continue;
    }
    std::istringstream ss(line);
    PositionRecord r;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ss >> r.id >> c1 >> r.position.x() >> c2 >> r.position.y() >> c3 >> r.position.z()) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      fail(ErrorCode::Format, "malformed positions row: '" + line + "'");
    }
    out.push_back(r);
  }
  return out;
}

void save_depth_image(const std::filesystem::path& p, const DepthImage& img) {
  write_file(p, [&](std::ostream& os) { write_depth_image(os, img); });
}
DepthImage load_depth_image(const std::filesystem::path& p) {
  auto is = open_read(p);
  return read_depth_image(is);
}
void save_grid(const std::filesystem::path& p, const VoxelGrid& grid) {
  write_file(p, [&](std::ostream& os) { write_grid(os, grid); });
}
VoxelGrid load_grid(const std::filesystem::path& p, OccupancyParams params) {
  auto is = open_read(p);
  return read_grid(is, params);
}
void save_features(const std::filesystem::path& p, const Description& d) {
  write_file(p, [&](std::ostream& os) { write_features(os, d); });
}
Description load_features(const std::filesystem::path& p) {
  auto is = open_read(p);
  return read_features(is);
}
void save_ply(const std::filesystem::path& p, const PointCloud& cloud, PlyEncoding enc) {
  write_file(p, [&](std::ostream& os) { write_ply(os, cloud, enc); });
}
PointCloud load_ply(const std::filesystem::path& p) {
  auto is = open_read(p);
  return read_ply(is);
}
void save_trajectory(const std::filesystem::path& p, const Trajectory& t) {
  write_file(p, [&](std::ostream& os) { write_tum(os, t); }, false);
}
Trajectory load_trajectory(const std::filesystem::path& p) {
  auto is = open_read(p, false);
  return read_tum(is);
}
void save_pose(const std::filesystem::path& p, double timestamp, const RigidTransform& pose) {
  write_file(p, [&](std::ostream& os) { os << format_tum_line(timestamp, pose) << '\n'; }, false);
}
StampedPose load_pose(const std::filesystem::path& p) {
  auto is = open_read(p, false);
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos && line[0] != '#') return parse_tum_line(line);
  }
  fail(ErrorCode::Format, "empty pose file: " + p.string());
}

}  // namespace lvr::formats
