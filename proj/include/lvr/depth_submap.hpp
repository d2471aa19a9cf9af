#pragma once

#include "lvr/geometry.hpp"
#include "lvr/occupancy.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace lvr {

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;

  void validate() const;
};

/// Row-major H×W metric depth with its camera-to-world pose. Depth 0 or a
/// non-finite value marks an invalid pixel.
struct DepthImage {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<double> depth;
  RigidTransform pose;
  double timestamp = 0.0;

  double at(std::uint32_t v, std::uint32_t u) const { return depth[std::size_t{v} * width + u]; }
};

/// Back-projects valid pixels to camera-frame points (x right, y down, z forward).
/// Throws DimensionMismatch if the image size differs from the intrinsics.
PointCloud project_depth(const DepthImage& img, const CameraIntrinsics& k);

/// Fraction of `incoming` points (world frame) landing in occupied voxels of `partial`.
double volumetric_intersection(std::span<const Vec3> incoming, const VoxelGrid& partial);

struct SubmapPolicy {
  double min_intersection_fraction = 0.20;
  std::size_t max_projections_per_partial = 10;
  std::size_t partials_per_submap = 7;
  /// Measure the incoming overlap against the previously finalized partial
  /// (true) or against the partial being accumulated (false).
  bool compare_previous_partial = true;
  /// Integrate only while both the overlap and frame-count conditions hold,
  /// instead of either one.
  bool require_both = false;

  void validate() const;
};

struct Submap {
  std::uint64_t id = 0;
  PointCloud cloud;            ///< submap reference frame
  RigidTransform reference_pose;  ///< submap frame → world
  std::vector<std::size_t> source_frame_ids;
};

/// Streaming partial-submap / submap builder. Push frames in order; each push
/// may emit submaps. Single-threaded; separate builders are independent.
class SubmapBuilder {
 public:
  SubmapBuilder(CameraIntrinsics intrinsics, SubmapPolicy policy, OccupancyParams occupancy);

  std::vector<Submap> push(const DepthImage& frame);
  /// Finalizes the open partial; emits a last submap if it completes a window.
  std::vector<Submap> finish();

  std::size_t finalized_partials() const { return finalized_count_; }
  std::size_t frames_seen() const { return next_frame_id_; }
  /// Grid of the partial currently being accumulated.
  const VoxelGrid& current_grid() const { return current_.grid; }

 private:
  struct Partial {
    VoxelGrid grid;
    std::vector<std::size_t> frame_ids;
    RigidTransform first_pose;
  };

  std::vector<Submap> finalize_current();
  Submap merge_window() const;

  CameraIntrinsics intrinsics_;
  SubmapPolicy policy_;
  OccupancyParams occupancy_;
  Partial current_;
  std::deque<Partial> window_;
  std::size_t finalized_count_ = 0;
  std::size_t next_frame_id_ = 0;
  std::uint64_t next_submap_id_ = 0;
};

/// Runs a whole stream through a SubmapBuilder.
std::vector<Submap> accumulate(std::span<const DepthImage> frames, const CameraIntrinsics& k,
                               const SubmapPolicy& policy, const OccupancyParams& occ);

}  // namespace lvr
