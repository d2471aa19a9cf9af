#include "lvr/correspond.hpp"

#include "lvr/errors.hpp"
#include "lvr/kernels.hpp"
#include "lvr/parallel.hpp"

#include <cstdint>

namespace lvr {

void TupleConfig::validate() const {
  if (!(0.0 <= alpha_neg && alpha_neg < alpha_pos_reg && alpha_pos_reg <= alpha_pos_pr &&
        alpha_pos_pr <= 1.0)) {
    fail(ErrorCode::InvalidArgument,
         "require 0 <= alpha_neg < alpha_pos_reg <= alpha_pos_pr <= 1");
  }
  if (!(inlier_distance > 0.0)) fail(ErrorCode::InvalidArgument, "inlier_distance must be > 0");
}

double inlier_ratio(const KeypointSet& a, const KeypointSet& p, const RigidTransform& gt,
                    double eps) {
  if (a.empty() || p.empty()) fail(ErrorCode::EmptyInput, "inlier_ratio: empty keypoint set");
  const PointCloud moved = transform_points(gt, a.coords());
  std::size_t inliers = 0;
  for (const auto& nn : kernels::nearest_neighbors_serial(moved, p.coords())) {
    if (nn.distance <= eps) ++inliers;
  }
  return static_cast<double>(inliers) / static_cast<double>(a.size());
}

namespace {

TrainingTuple tuple_for(const TupleEntry& anchor, std::span<const TupleEntry> candidates,
                        const TupleConfig& cfg, bool skip_self) {
  TrainingTuple t;
  t.anchor = anchor.id;
  for (const auto& c : candidates) {
    if (skip_self && c.id == anchor.id) continue;
    const RigidTransform gt = compose(inverse(c.pose), anchor.pose);
    double ratio = inlier_ratio(anchor.keypoints, c.keypoints, gt, cfg.inlier_distance);
    if (cfg.symmetric_ratio) {
      ratio = 0.5 * (ratio + inlier_ratio(c.keypoints, anchor.keypoints, inverse(gt),
                                          cfg.inlier_distance));
    }
    if (ratio >= cfg.alpha_pos_pr) t.positives_pr.insert(c.id);
    if (ratio >= cfg.alpha_pos_reg) t.positives_reg.insert(c.id);
    if (ratio <= cfg.alpha_neg) t.negatives.insert(c.id);
  }
  return t;
}

std::vector<TrainingTuple> build_all(std::span<const TupleEntry> anchors,
                                     std::span<const TupleEntry> candidates,
                                     const TupleConfig& cfg, bool skip_self) {
  cfg.validate();
  std::vector<TrainingTuple> out(anchors.size());
  parallel_for(anchors.size(),
               [&](std::size_t i) { out[i] = tuple_for(anchors[i], candidates, cfg, skip_self); });
  return out;
}

}  // namespace

std::vector<TrainingTuple> build_tuples(std::span<const TupleEntry> anchors,
                                        std::span<const TupleEntry> candidates,
                                        const TupleConfig& cfg) {
  return build_all(anchors, candidates, cfg, false);
}

std::vector<TrainingTuple> build_tuples(std::span<const TupleEntry> entries,
                                        const TupleConfig& cfg) {
  return build_all(entries, entries, cfg, true);
}

}  // namespace lvr
