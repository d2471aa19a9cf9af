#pragma once

// Synthetic correspondence problems with a known transform.

#include "lvr/features.hpp"
#include "lvr/geometry.hpp"

#include <cstdint>
#include <vector>

namespace lvr {

struct SyntheticCorrespondenceConfig {
  std::size_t n = 256;
  double inlier_ratio = 0.3;
  double noise_sigma = 0.05;   ///< per-axis Gaussian noise on inlier targets (m)
  double extent = 20.0;        ///< source points are uniform in a cube of this edge (m)
  double max_translation = 10.0;
  std::uint64_t seed = 0;
  void validate() const;
};

struct SyntheticProblem {
  CorrespondenceSet correspondences;
  RigidTransform gt;           ///< maps sources onto targets
  std::vector<bool> is_inlier;
};

/// round(n · inlier_ratio) inliers at random positions; outlier targets are
/// uniform in the transformed source cube. The rotation is uniform on SO(3).
SyntheticProblem make_correspondence_problem(const SyntheticCorrespondenceConfig& cfg);

/// Uniform random rotation from a seed.
Mat3 random_rotation(std::uint64_t seed);

}  // namespace lvr
