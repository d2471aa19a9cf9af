#pragma once

#include "lvr/geometry.hpp"
#include "lvr/kernels.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace lvr {

inline constexpr Eigen::Index kGlobalDim = 256;
inline constexpr Eigen::Index kLocalDim = 128;

/// L2-normalized 256-d place descriptor.
class GlobalDescriptor {
 public:
  GlobalDescriptor();
  /// Validates dimension and unit norm (within 1e-6).
  explicit GlobalDescriptor(Eigen::VectorXd values);
  /// Normalizes `values` first; throws DegenerateGeometry for a zero vector.
  static GlobalDescriptor normalized(Eigen::VectorXd values);

  const Eigen::VectorXd& values() const { return values_; }
  double distance(const GlobalDescriptor& other) const { return (values_ - other.values_).norm(); }
  double cosine(const GlobalDescriptor& other) const { return values_.dot(other.values_); }

 private:
  Eigen::VectorXd values_;
};

/// Sparse keypoints: local-frame coordinates, unit-norm 128-d features and
/// strictly positive saliencies. Invariants are checked on construction.
class KeypointSet {
 public:
  KeypointSet() : features_(0, kLocalDim) {}
  KeypointSet(std::vector<Vec3> coords, FeatureMatrix features, std::vector<double> saliency);

  std::size_t size() const { return coords_.size(); }
  bool empty() const { return coords_.empty(); }
  const std::vector<Vec3>& coords() const { return coords_; }
  const FeatureMatrix& features() const { return features_; }
  const std::vector<double>& saliency() const { return saliency_; }

  /// Same keypoints with coordinates mapped by `t`.
  KeypointSet transformed(const RigidTransform& t) const;

 private:
  std::vector<Vec3> coords_;
  FeatureMatrix features_;
  std::vector<double> saliency_;
};

struct Description {
  GlobalDescriptor global;
  KeypointSet keypoints;
};

struct OracleNoise {
  double global = 0.0;            ///< stddev added per descriptor component
  double local = 0.0;             ///< stddev added per keypoint feature component
  double outlier_fraction = 0.0;  ///< share of keypoint features replaced by random vectors
};

struct OracleConfig {
  double global_voxel = 1.0;
  double keypoint_voxel = 0.5;
  std::size_t max_keypoints = 128;
  /// Keypoint candidates are occupied keypoint voxels at or above this world
  /// height and within crop_radius of the cloud origin.
  double min_world_z = 0.5;
  double crop_radius = 30.0;
  /// Candidates are reduced to max_keypoints by keeping the lowest voxel
  /// hashes, which picks the same voxels in any cloud that observes them.
  /// Farthest-point sampling is the alternative.
  bool farthest_point_sampling = false;
  double saliency_min = 0.5;
  double saliency_max = 1.5;
};

/// Deterministic stand-in for the learned encoders. Features are hashes of
/// world-frame voxels, so the same physical place produces matching features
/// in clouds from either modality.
Description oracle_describe(std::span<const Vec3> cloud, const RigidTransform& world_pose,
                            std::uint64_t seed, const OracleNoise& noise,
                            const OracleConfig& config = {});

/// Cloud → (global descriptor, keypoints).
class FeatureProvider {
 public:
  virtual ~FeatureProvider() = default;
  /// `world_pose` maps the cloud frame to the world; `id` identifies the cloud.
  virtual Description describe(std::span<const Vec3> cloud, const RigidTransform& world_pose,
                               std::uint64_t id) const = 0;
};

class OracleProvider final : public FeatureProvider {
 public:
  OracleProvider(std::uint64_t seed, OracleNoise noise, OracleConfig config = {})
      : seed_(seed), noise_(noise), config_(config) {}

  Description describe(std::span<const Vec3> cloud, const RigidTransform& world_pose,
                       std::uint64_t id) const override;

  std::uint64_t seed() const { return seed_; }
  const OracleNoise& noise() const { return noise_; }
  const OracleConfig& config() const { return config_; }

 private:
  std::uint64_t seed_;
  OracleNoise noise_;
  OracleConfig config_;
};

/// A matched keypoint pair. `source` lives in the query frame, `target` in the
/// candidate frame.
struct Correspondence {
  Vec3 source = Vec3::Zero();
  Vec3 target = Vec3::Zero();
  double feature_distance = 0.0;
  std::size_t source_index = 0;
  std::size_t target_index = 0;
};

using CorrespondenceSet = std::vector<Correspondence>;

/// Throws InvalidArgument if an index repeats on either side or a coordinate is not finite.
void validate_correspondences(const CorrespondenceSet& c);

/// Mutual nearest neighbours in feature space, sorted by ascending feature
/// distance (ties by source index).
CorrespondenceSet match_features(const KeypointSet& a, const KeypointSet& b);
CorrespondenceSet match_features_serial(const KeypointSet& a, const KeypointSet& b);

/// Random unit vector of dimension `dim`.
Eigen::VectorXd random_unit_vector(Eigen::Index dim, std::uint64_t seed);

}  // namespace lvr
