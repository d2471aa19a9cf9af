#pragma once

// Data-parallel inner loops. Every OpenMP kernel has a `_serial` twin that is
// kept as the reference implementation; both produce bit-identical output
// because each output element is computed independently in the same order.

#include "lvr/geometry.hpp"
#include "lvr/voxel.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace lvr {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace kernels {

/// Pairwise length-consistency scores m_ij = [1 − d_ij² / d_thr²]₊ with
/// d_ij = | ‖src_i − src_j‖ − ‖dst_i − dst_j‖ |. Diagonal is 1.
Eigen::MatrixXd consistency_matrix(std::span<const Vec3> src, std::span<const Vec3> dst,
                                   double d_thr);
Eigen::MatrixXd consistency_matrix_serial(std::span<const Vec3> src, std::span<const Vec3> dst,
                                          double d_thr);

/// Euclidean distances between every row of `a` and every row of `b`.
Eigen::MatrixXd feature_distances(const FeatureMatrix& a, const FeatureMatrix& b);
Eigen::MatrixXd feature_distances_serial(const FeatureMatrix& a, const FeatureMatrix& b);

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Exhaustive Euclidean nearest neighbour in `cloud` for each query point.
/// Ties resolve to the lowest index. `cloud` must be non-empty.
std::vector<Neighbor> nearest_neighbors(std::span<const Vec3> queries, std::span<const Vec3> cloud);
std::vector<Neighbor> nearest_neighbors_serial(std::span<const Vec3> queries,
                                               std::span<const Vec3> cloud);

/// Voxels crossed by the segment origin → endpoint, endpoint voxel excluded
/// (Amanatides–Woo traversal), in traversal order.
std::vector<VoxelIndex> traverse_ray(const Vec3& origin, const Vec3& endpoint, double voxel_size);

/// traverse_ray for each endpoint; endpoints farther than max_range from the
/// origin yield an empty traversal and are flagged in `skipped`.
struct RayBatch {
  std::vector<std::vector<VoxelIndex>> free_voxels;
  std::vector<char> skipped;
};
RayBatch traverse_rays(const Vec3& origin, std::span<const Vec3> endpoints, double voxel_size,
                       double max_range);
RayBatch traverse_rays_serial(const Vec3& origin, std::span<const Vec3> endpoints,
                              double voxel_size, double max_range);

}  // namespace kernels
}  // namespace lvr
