#pragma once

#include "lvr/geometry.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <tuple>

namespace lvr {

/// Integer voxel coordinate, floor(coordinate / voxel_size) componentwise.
struct VoxelIndex {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;

  friend bool operator==(const VoxelIndex&, const VoxelIndex&) = default;
  friend auto operator<=>(const VoxelIndex& a, const VoxelIndex& b) {
    return std::tie(a.x, a.y, a.z) <=> std::tie(b.x, b.y, b.z);
  }
};

inline VoxelIndex voxel_of(const Vec3& p, double voxel_size) {
  return {static_cast<std::int32_t>(std::floor(p.x() / voxel_size)),
          static_cast<std::int32_t>(std::floor(p.y() / voxel_size)),
          static_cast<std::int32_t>(std::floor(p.z() / voxel_size))};
}

inline Vec3 voxel_center(const VoxelIndex& v, double voxel_size) {
  return {(v.x + 0.5) * voxel_size, (v.y + 0.5) * voxel_size, (v.z + 0.5) * voxel_size};
}

/// splitmix64 finalizer; used for voxel hashing and seed derivation.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  return mix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

inline std::uint64_t hash_voxel(const VoxelIndex& v, std::uint64_t salt = 0) {
  std::uint64_t h = mix64(salt);
  h = hash_combine(h, static_cast<std::uint32_t>(v.x));
  h = hash_combine(h, static_cast<std::uint32_t>(v.y));
  h = hash_combine(h, static_cast<std::uint32_t>(v.z));
  return h;
}

struct VoxelIndexHash {
  std::size_t operator()(const VoxelIndex& v) const noexcept {
    return static_cast<std::size_t>(hash_voxel(v));
  }
};

}  // namespace lvr
