#pragma once

// On-disk formats. All binary formats are little-endian.
//
//   DPTH  "DPTH" u32 version u32 H u32 W f64 timestamp 7×f64 pose(tx ty tz qx qy qz qw)
//         H·W f32 depths (row-major, meters, 0 = invalid)
//   OCCG  "OCCG" u32 version f32 voxel_size, then records (i32 x, i32 y, i32 z, f32 log_odds)
//   FEAT  "FEAT" u32 version u32 N 256×f32 global, then N × (3×f32 coord, 128×f32 feature,
//         f32 saliency)
//   PLY   ascii or binary_little_endian vertex clouds with x, y, z
//   CSV   positions sidecar `id,x,y,z`

#include "lvr/depth_submap.hpp"
#include "lvr/features.hpp"
#include "lvr/geometry.hpp"
#include "lvr/occupancy.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace lvr::formats {

inline constexpr std::uint32_t kDepthVersion = 1;
inline constexpr std::uint32_t kGridVersion = 1;
inline constexpr std::uint32_t kFeatureVersion = 1;

void write_depth_image(std::ostream& os, const DepthImage& img);
DepthImage read_depth_image(std::istream& is);

/// Cells are written in lexicographic index order.
void write_grid(std::ostream& os, const VoxelGrid& grid);
/// `params.voxel_size` is replaced by the stored value.
VoxelGrid read_grid(std::istream& is, OccupancyParams params = {});

void write_features(std::ostream& os, const Description& d);
Description read_features(std::istream& is);

enum class PlyEncoding { Ascii, BinaryLittleEndian };
void write_ply(std::ostream& os, const PointCloud& cloud, PlyEncoding enc = PlyEncoding::BinaryLittleEndian);
PointCloud read_ply(std::istream& is);

struct PositionRecord {
  std::uint64_t id = 0;
  Vec3 position = Vec3::Zero();
};
void write_positions_csv(std::ostream& os, const std::vector<PositionRecord>& rows);
std::vector<PositionRecord> read_positions_csv(std::istream& is);

// File-path conveniences; throw Error(Io) when a file cannot be opened.
void save_depth_image(const std::filesystem::path& p, const DepthImage& img);
DepthImage load_depth_image(const std::filesystem::path& p);
void save_grid(const std::filesystem::path& p, const VoxelGrid& grid);
VoxelGrid load_grid(const std::filesystem::path& p, OccupancyParams params = {});
void save_features(const std::filesystem::path& p, const Description& d);
Description load_features(const std::filesystem::path& p);
void save_ply(const std::filesystem::path& p, const PointCloud& cloud,
              PlyEncoding enc = PlyEncoding::BinaryLittleEndian);
PointCloud load_ply(const std::filesystem::path& p);
void save_trajectory(const std::filesystem::path& p, const Trajectory& t);
Trajectory load_trajectory(const std::filesystem::path& p);
/// Single-pose sidecar (one TUM line).
void save_pose(const std::filesystem::path& p, double timestamp, const RigidTransform& pose);
StampedPose load_pose(const std::filesystem::path& p);

}  // namespace lvr::formats
