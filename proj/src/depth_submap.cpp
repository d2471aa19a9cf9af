#include "lvr/depth_submap.hpp"

#include "lvr/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lvr {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) fail(ErrorCode::InvalidArgument, "focal lengths must be > 0");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    fail(ErrorCode::InvalidArgument, "principal point must lie inside the image");
  }
}

PointCloud project_depth(const DepthImage& img, const CameraIntrinsics& k) {
  if (img.width != k.width || img.height != k.height ||
      img.depth.size() != std::size_t{img.width} * img.height) {
    fail(ErrorCode::DimensionMismatch, "depth image size does not match intrinsics");
  }
  PointCloud out;
  for (std::uint32_t v = 0; v < img.height; ++v) {
    for (std::uint32_t u = 0; u < img.width; ++u) {
      const double d = img.at(v, u);
      if (!std::isfinite(d) || d <= 0.0) continue;
      out.emplace_back(d * (u - k.cx) / k.fx, d * (v - k.cy) / k.fy, d);
    }
  }
  return out;
}

double volumetric_intersection(std::span<const Vec3> incoming, const VoxelGrid& partial) {
  if (incoming.empty()) fail(ErrorCode::EmptyInput, "volumetric_intersection: empty projection");
  std::size_t inside = 0;
  for (const Vec3& p : incoming) {
    if (partial.is_occupied(partial.index_of(p))) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(incoming.size());
}

void SubmapPolicy::validate() const {
  if (!(min_intersection_fraction > 0.0 && min_intersection_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument, "min_intersection_fraction must lie in (0, 1)");
  }
  if (max_projections_per_partial < 1 || partials_per_submap < 1) {
    fail(ErrorCode::InvalidArgument, "submap policy counts must be >= 1");
  }
}

SubmapBuilder::SubmapBuilder(CameraIntrinsics intrinsics, SubmapPolicy policy,
                             OccupancyParams occupancy)
    : intrinsics_(intrinsics),
      policy_(policy),
      occupancy_(occupancy),
      current_{VoxelGrid(occupancy), {}, {}} {
  intrinsics_.validate();
  policy_.validate();
}

std::vector<Submap> SubmapBuilder::push(const DepthImage& frame) {
  const PointCloud world = transform_points(frame.pose, project_depth(frame, intrinsics_));
  const std::size_t frame_id = next_frame_id_++;
  std::vector<Submap> emitted;

  if (!current_.frame_ids.empty()) {
    const VoxelGrid* reference = nullptr;
    if (!policy_.compare_previous_partial) {
      reference = &current_.grid;
    } else if (!window_.empty()) {
      reference = &window_.back().grid;
    }
    const bool short_partial = current_.frame_ids.size() < policy_.max_projections_per_partial;
    bool keep = short_partial;
    // Without a finalized partial to compare against, only the frame count decides.
    if (reference != nullptr) {
      const double overlap = world.empty() ? 0.0 : volumetric_intersection(world, *reference);
      const bool overlaps = overlap > policy_.min_intersection_fraction;
      keep = policy_.require_both ? (overlaps && short_partial) : (overlaps || short_partial);
    }
    if (!keep) emitted = finalize_current();
  }

  if (current_.frame_ids.empty()) current_.first_pose = frame.pose;
  current_.grid.integrate(world, frame.pose.translation);
  current_.frame_ids.push_back(frame_id);
  return emitted;
}

std::vector<Submap> SubmapBuilder::finish() {
  if (current_.frame_ids.empty()) return {};
  return finalize_current();
}

std::vector<Submap> SubmapBuilder::finalize_current() {
  window_.push_back(std::move(current_));
  current_ = Partial{VoxelGrid(occupancy_), {}, {}};
  ++finalized_count_;
  // With compare_previous_partial the newest finalized partial must survive
  // even when the window length is 1.
  while (window_.size() > policy_.partials_per_submap) window_.pop_front();
  std::vector<Submap> out;
  if (window_.size() == policy_.partials_per_submap) {
    Submap s = merge_window();
    if (!s.cloud.empty()) {
      s.id = next_submap_id_++;
      out.push_back(std::move(s));
    }
  }
  return out;
}

Submap SubmapBuilder::merge_window() const {
  // A cell that is never positive cannot end up occupied, so only cells that
  // are positive in some partial are merged. Merging them in window order
  // reproduces the clamping of a full merge exactly.
  std::vector<VoxelIndex> cells;
  for (const Partial& p : window_) {
    const auto c = p.grid.cells_above(0.0);
    cells.insert(cells.end(), c.begin(), c.end());
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  VoxelGrid merged(occupancy_);
  Submap s;
  for (const Partial& p : window_) {
    for (const VoxelIndex& v : cells) {
      if (const auto l = p.grid.log_odds(v)) merged.update(v, *l);
    }
    s.source_frame_ids.insert(s.source_frame_ids.end(), p.frame_ids.begin(), p.frame_ids.end());
  }
  s.reference_pose = window_[window_.size() / 2].first_pose;
  s.cloud = transform_points(inverse(s.reference_pose), merged.extract_occupied());
  return s;
}

std::vector<Submap> accumulate(std::span<const DepthImage> frames, const CameraIntrinsics& k,
                               const SubmapPolicy& policy, const OccupancyParams& occ) {
  SubmapBuilder builder(k, policy, occ);
  std::vector<Submap> out;
  for (const auto& f : frames) {
    auto s = builder.push(f);
    out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  auto s = builder.finish();
  out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  return out;
}

}  // namespace lvr
