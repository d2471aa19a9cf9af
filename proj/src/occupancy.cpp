#include "lvr/occupancy.hpp"

#include "lvr/errors.hpp"
#include "lvr/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace lvr {

void OccupancyParams::validate() const {
  if (!(voxel_size > 0.0)) fail(ErrorCode::InvalidArgument, "voxel_size must be > 0");
  if (!(log_odds_min < 0.0 && 0.0 < log_odds_max)) {
    fail(ErrorCode::InvalidArgument, "require log_odds_min < 0 < log_odds_max");
  }
  if (!(log_odds_hit > 0.0 && log_odds_miss < 0.0)) {
    fail(ErrorCode::InvalidArgument, "require log_odds_hit > 0 > log_odds_miss");
  }
  if (!(occupied_threshold > 0.0 && occupied_threshold < 1.0)) {
    fail(ErrorCode::InvalidArgument, "occupied_threshold must lie in (0, 1)");
  }
  if (!(max_ray_range > 0.0)) fail(ErrorCode::InvalidArgument, "max_ray_range must be > 0");
}

double logistic(double log_odds) { return 1.0 / (1.0 + std::exp(-log_odds)); }

VoxelGrid::VoxelGrid(OccupancyParams params) : params_(params) { params_.validate(); }

void VoxelGrid::update(const VoxelIndex& v, double delta) {
  auto [it, inserted] = cells_.try_emplace(v, 0.0);
  it->second = std::clamp(it->second + delta, params_.log_odds_min, params_.log_odds_max);
}

void VoxelGrid::integrate(std::span<const Vec3> projection, const Vec3& sensor_origin) {
  if (projection.empty()) return;
  // Ray traversal is parallel; updates are applied serially in point order so
  // the result does not depend on the thread count.
  const auto rays = kernels::traverse_rays(sensor_origin, projection, params_.voxel_size,
                                           params_.max_ray_range);
  for (std::size_t i = 0; i < projection.size(); ++i) {
    if (rays.skipped[i]) continue;
    for (const VoxelIndex& v : rays.free_voxels[i]) update(v, params_.log_odds_miss);
    update(index_of(projection[i]), params_.log_odds_hit);
  }
}

std::optional<double> VoxelGrid::log_odds(const VoxelIndex& v) const {
  const auto it = cells_.find(v);
  if (it == cells_.end()) return std::nullopt;
  return it->second;
}

double VoxelGrid::probability(const VoxelIndex& v) const {
  const auto l = log_odds(v);
  return l ? logistic(*l) : 0.5;
}

double VoxelGrid::probability(const Vec3& point) const { return probability(index_of(point)); }

bool VoxelGrid::is_occupied(const VoxelIndex& v) const {
  return probability(v) > params_.occupied_threshold;
}

std::vector<std::pair<VoxelIndex, double>> VoxelGrid::sorted_cells() const {
  std::vector<std::pair<VoxelIndex, double>> out(cells_.begin(), cells_.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

PointCloud VoxelGrid::extract_occupied() const {
  PointCloud out;
  for (const auto& [v, l] : sorted_cells()) {
    if (logistic(l) > params_.occupied_threshold) out.push_back(voxel_center(v, params_.voxel_size));
  }
  return out;
}

std::vector<VoxelIndex> VoxelGrid::cells_above(double value) const {
  std::vector<VoxelIndex> out;
  for (const auto& [v, l] : cells_) {
    if (l > value) out.push_back(v);
  }
  return out;
}

void VoxelGrid::merge(const VoxelGrid& other) {
  if (other.params_.voxel_size != params_.voxel_size) {
    fail(ErrorCode::InvalidArgument, "cannot merge grids with different voxel sizes");
  }
  // Each cell is touched once, so the visiting order does not matter.
  for (const auto& [v, l] : other.cells_) update(v, l);
}

}  // namespace lvr
