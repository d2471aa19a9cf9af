#include "lvr/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace lvr::kernels {
namespace {

inline double consistency_entry(std::span<const Vec3> src, std::span<const Vec3> dst,
                                std::size_t i, std::size_t j, double inv_thr2) {
  const double d = std::abs((src[i] - src[j]).norm() - (dst[i] - dst[j]).norm());
  const double m = 1.0 - d * d * inv_thr2;
  return m > 0.0 ? m : 0.0;
}

inline Neighbor nearest(const Vec3& q, std::span<const Vec3> cloud) {
  Neighbor best{0, std::numeric_limits<double>::infinity()};
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    const double sq = (q - cloud[j]).squaredNorm();
    if (sq < best_sq) {
      best_sq = sq;
      best.index = j;
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

}  // namespace

Eigen::MatrixXd consistency_matrix(std::span<const Vec3> src, std::span<const Vec3> dst,
                                   double d_thr) {
  const auto n = static_cast<std::int64_t>(src.size());
  const double inv_thr2 = 1.0 / (d_thr * d_thr);
  Eigen::MatrixXd m(n, n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
    for (std::int64_t j = i + 1; j < n; ++j) {
      const double v = consistency_entry(src, dst, i, j, inv_thr2);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

Eigen::MatrixXd consistency_matrix_serial(std::span<const Vec3> src, std::span<const Vec3> dst,
                                          double d_thr) {
  const auto n = static_cast<Eigen::Index>(src.size());
  const double inv_thr2 = 1.0 / (d_thr * d_thr);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = consistency_entry(src, dst, i, j, inv_thr2);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

Eigen::MatrixXd feature_distances(const FeatureMatrix& a, const FeatureMatrix& b) {
  const auto n = static_cast<std::int64_t>(a.rows());
  Eigen::MatrixXd d(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) d(i, j) = (a.row(i) - b.row(j)).norm();
  }
  return d;
}

Eigen::MatrixXd feature_distances_serial(const FeatureMatrix& a, const FeatureMatrix& b) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) d(i, j) = (a.row(i) - b.row(j)).norm();
  }
  return d;
}

std::vector<Neighbor> nearest_neighbors(std::span<const Vec3> queries,
                                        std::span<const Vec3> cloud) {
  std::vector<Neighbor> out(queries.size());
  const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = nearest(queries[i], cloud);
  return out;
}

std::vector<Neighbor> nearest_neighbors_serial(std::span<const Vec3> queries,
                                               std::span<const Vec3> cloud) {
  std::vector<Neighbor> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) out[i] = nearest(queries[i], cloud);
  return out;
}

std::vector<VoxelIndex> traverse_ray(const Vec3& origin, const Vec3& endpoint,
                                     double voxel_size) {
  std::vector<VoxelIndex> out;
  const VoxelIndex start = voxel_of(origin, voxel_size);
  const VoxelIndex end = voxel_of(endpoint, voxel_size);
  if (start == end) return out;

  const Vec3 dir = endpoint - origin;
  std::int32_t cur[3] = {start.x, start.y, start.z};
  const std::int32_t last[3] = {end.x, end.y, end.z};
  int step[3];
  double t_max[3];
  double t_delta[3];
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 0.0) {
      step[a] = 1;
      t_max[a] = ((cur[a] + 1) * voxel_size - origin[a]) / dir[a];
      t_delta[a] = voxel_size / dir[a];
    } else if (dir[a] < 0.0) {
      step[a] = -1;
      t_max[a] = (cur[a] * voxel_size - origin[a]) / dir[a];
      t_delta[a] = -voxel_size / dir[a];
    } else {
      step[a] = 0;
      t_max[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
    }
  }

  // Each step moves one axis one voxel toward the endpoint, so the walk takes
  // exactly the Manhattan distance between the two voxels.
  const std::int64_t steps = std::abs(std::int64_t{last[0]} - cur[0]) +
                             std::abs(std::int64_t{last[1]} - cur[1]) +
                             std::abs(std::int64_t{last[2]} - cur[2]);
  out.reserve(static_cast<std::size_t>(steps));
  for (std::int64_t s = 0; s < steps; ++s) {
    out.push_back({cur[0], cur[1], cur[2]});
    int axis = -1;
    for (int a = 0; a < 3; ++a) {
      if (cur[a] == last[a]) continue;
      if (axis < 0 || t_max[a] < t_max[axis]) axis = a;
    }
    // Floating-point rounding can leave an axis pointing away from the end
    // voxel; step toward the end regardless.
    const int dir_step = last[axis] > cur[axis] ? 1 : -1;
    cur[axis] += dir_step;
    t_max[axis] += t_delta[axis];
  }
  return out;
}

namespace {

inline void traverse_one(const Vec3& origin, const Vec3& p, double voxel_size, double max_range,
                         std::vector<VoxelIndex>& free, char& skipped) {
  if (!p.allFinite() || (p - origin).norm() > max_range) {
    skipped = 1;
    return;
  }
  skipped = 0;
  free = traverse_ray(origin, p, voxel_size);
}

}  // namespace

RayBatch traverse_rays(const Vec3& origin, std::span<const Vec3> endpoints, double voxel_size,
                       double max_range) {
  RayBatch batch;
  batch.free_voxels.resize(endpoints.size());
  batch.skipped.resize(endpoints.size(), 0);
  const auto n = static_cast<std::int64_t>(endpoints.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    traverse_one(origin, endpoints[i], voxel_size, max_range, batch.free_voxels[i],
                 batch.skipped[i]);
  }
  return batch;
}

RayBatch traverse_rays_serial(const Vec3& origin, std::span<const Vec3> endpoints,
                              double voxel_size, double max_range) {
  RayBatch batch;
  batch.free_voxels.resize(endpoints.size());
  batch.skipped.resize(endpoints.size(), 0);
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    traverse_one(origin, endpoints[i], voxel_size, max_range, batch.free_voxels[i],
                 batch.skipped[i]);
  }
  return batch;
}

}  // namespace lvr::kernels
