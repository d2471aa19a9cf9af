#pragma once

#include "lvr/features.hpp"
#include "lvr/geometry.hpp"

#include <cstdint>
#include <set>
#include <span>
#include <vector>

namespace lvr {

struct TupleConfig {
  double alpha_pos_pr = 0.3;
  double alpha_pos_reg = 0.1;
  double alpha_neg = 0.01;
  double inlier_distance = 0.5;
  /// Average the ratio measured from both sides instead of the anchor side only.
  bool symmetric_ratio = false;

  void validate() const;
};

/// Share of `a` keypoints that, after mapping by `gt` (a-frame → p-frame),
/// have a `p` keypoint within `eps`.
double inlier_ratio(const KeypointSet& a, const KeypointSet& p, const RigidTransform& gt,
                    double eps);

struct TupleEntry {
  std::uint64_t id = 0;
  KeypointSet keypoints;
  RigidTransform pose;  ///< keypoint frame → world
};

struct TrainingTuple {
  std::uint64_t anchor = 0;
  std::set<std::uint64_t> positives_pr;
  std::set<std::uint64_t> positives_reg;
  std::set<std::uint64_t> negatives;
};

/// One tuple per anchor against every candidate. Ratios ≥ alpha_pos_pr are
/// place-recognition positives, ≥ alpha_pos_reg registration positives,
/// ≤ alpha_neg negatives; anything in between is ignored. Output is ordered
/// like `anchors`.
std::vector<TrainingTuple> build_tuples(std::span<const TupleEntry> anchors,
                                        std::span<const TupleEntry> candidates,
                                        const TupleConfig& cfg);

/// Single-database form: each entry is an anchor against all other entries.
std::vector<TrainingTuple> build_tuples(std::span<const TupleEntry> entries, const TupleConfig& cfg);

}  // namespace lvr
