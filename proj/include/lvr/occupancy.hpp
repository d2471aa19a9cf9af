#pragma once

#include "lvr/geometry.hpp"
#include "lvr/voxel.hpp"

#include <absl/container/flat_hash_map.h>

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace lvr {

struct OccupancyParams {
  double voxel_size = 0.2;
  double log_odds_hit = 0.85;
  double log_odds_miss = -0.4;
  double log_odds_min = -2.0;
  double log_odds_max = 3.5;
  double occupied_threshold = 0.6;
  double max_ray_range = 60.0;

  /// Throws Error(InvalidArgument) when an invariant is violated.
  void validate() const;
};

/// Sparse log-odds occupancy grid with Bayesian (additive log-odds) updates.
///
/// Single writer: integrate() must not run concurrently with anything else on
/// the same grid. Const members are safe to call concurrently.
class VoxelGrid {
 public:
  explicit VoxelGrid(OccupancyParams params = {});

  const OccupancyParams& params() const { return params_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  /// Integrates one depth projection (world frame) seen from `sensor_origin`.
  /// Each point adds log_odds_hit to its voxel; every voxel the ray crosses
  /// before it adds log_odds_miss. Points beyond max_ray_range are skipped.
  void integrate(std::span<const Vec3> projection, const Vec3& sensor_origin);

  /// Adds `delta` to one voxel with clamping.
  void update(const VoxelIndex& v, double delta);

  /// Stored log-odds, if the voxel has been observed.
  std::optional<double> log_odds(const VoxelIndex& v) const;
  double probability(const VoxelIndex& v) const;
  double probability(const Vec3& point) const;
  bool is_occupied(const VoxelIndex& v) const;

  VoxelIndex index_of(const Vec3& p) const { return voxel_of(p, params_.voxel_size); }

  /// Centers of voxels with probability > occupied_threshold, lexicographic by index.
  PointCloud extract_occupied() const;

  /// All stored cells sorted by index.
  std::vector<std::pair<VoxelIndex, double>> sorted_cells() const;

  /// Unordered indices of cells whose log-odds exceed `value`.
  std::vector<VoxelIndex> cells_above(double value) const;
  /// Adds every cell of `other` (same voxel size) into this grid, clamped.
  void merge(const VoxelGrid& other);

 private:
  OccupancyParams params_;
  absl::flat_hash_map<VoxelIndex, double, VoxelIndexHash> cells_;
};

double logistic(double log_odds);

}  // namespace lvr
