#include "lvr/features.hpp"

#include "lvr/errors.hpp"
#include "lvr/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace lvr {
namespace {

constexpr std::uint64_t kGlobalSalt = 0x676c6f62616cULL;    // "global"
constexpr std::uint64_t kSignSalt = 0x7369676eULL;          // "sign"
constexpr std::uint64_t kSelectSalt = 0x73656c656374ULL;    // "select"
constexpr std::uint64_t kFeatureSalt = 0x66656174ULL;       // "feat"

std::vector<VoxelIndex> unique_voxels(std::span<const Vec3> pts, double size) {
  std::vector<VoxelIndex> v;
  v.reserve(pts.size());
  for (const Vec3& p : pts) v.push_back(voxel_of(p, size));
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void fill_gaussian(Eigen::Ref<Eigen::VectorXd> v, std::mt19937_64& rng, double sigma) {
  std::normal_distribution<double> n(0.0, sigma);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = n(rng);
}

// Indices into `candidates` chosen by farthest-point sampling, starting from `first`.
std::vector<std::size_t> farthest_point_sample(const std::vector<Vec3>& candidates,
                                               std::size_t first, std::size_t count) {
  std::vector<std::size_t> chosen;
  if (candidates.empty() || count == 0) return chosen;
  std::vector<double> dist(candidates.size(), std::numeric_limits<double>::infinity());
  std::size_t next = first;
  while (chosen.size() < std::min(count, candidates.size())) {
    chosen.push_back(next);
    const Vec3& c = candidates[next];
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      dist[i] = std::min(dist[i], (candidates[i] - c).squaredNorm());
      if (dist[i] > best_d) {
        best_d = dist[i];
        best = i;
      }
    }
    next = best;
  }
  return chosen;
}

}  // namespace

GlobalDescriptor::GlobalDescriptor() : values_(Eigen::VectorXd::Zero(kGlobalDim)) {
  values_[0] = 1.0;
}

GlobalDescriptor::GlobalDescriptor(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() != kGlobalDim) {
    fail(ErrorCode::DimensionMismatch, "global descriptor must have 256 entries");
  }
  if (!values_.allFinite() || std::abs(values_.norm() - 1.0) > 1e-6) {
    fail(ErrorCode::InvalidArgument, "global descriptor must be unit norm");
  }
}

GlobalDescriptor GlobalDescriptor::normalized(Eigen::VectorXd values) {
  const double n = values.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    fail(ErrorCode::DegenerateGeometry, "cannot normalize a zero descriptor");
  }
  return GlobalDescriptor(values / n);
}

KeypointSet::KeypointSet(std::vector<Vec3> coords, FeatureMatrix features,
                         std::vector<double> saliency)
    : coords_(std::move(coords)), features_(std::move(features)), saliency_(std::move(saliency)) {
  const auto n = static_cast<Eigen::Index>(coords_.size());
  if (features_.rows() != n || static_cast<Eigen::Index>(saliency_.size()) != n) {
    fail(ErrorCode::DimensionMismatch, "keypoint coords, features and saliency differ in length");
  }
  if (features_.cols() != kLocalDim) {
    fail(ErrorCode::DimensionMismatch, "keypoint features must be 128-dimensional");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!coords_[i].allFinite()) fail(ErrorCode::InvalidArgument, "non-finite keypoint");
    if (!(saliency_[i] > 0.0)) fail(ErrorCode::NonPositiveSaliency, "saliency must be > 0");
    if (std::abs(features_.row(i).norm() - 1.0) > 1e-6) {
      fail(ErrorCode::InvalidArgument, "keypoint feature rows must be unit norm");
    }
  }
}

KeypointSet KeypointSet::transformed(const RigidTransform& t) const {
  return KeypointSet(transform_points(t, coords_), features_, saliency_);
}

Eigen::VectorXd random_unit_vector(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(dim);
  do {
    fill_gaussian(v, rng, 1.0);
  } while (!(v.norm() > 0.0));
  return v / v.norm();
}

Description oracle_describe(std::span<const Vec3> cloud, const RigidTransform& world_pose,
                            std::uint64_t seed, const OracleNoise& noise,
                            const OracleConfig& config) {
  if (cloud.empty()) fail(ErrorCode::EmptyInput, "oracle_describe: empty cloud");
  const PointCloud world = transform_points(world_pose, cloud);
  std::mt19937_64 rng(mix64(seed));

  // Signed hashed histogram of the occupied 1 m world voxels.
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(kGlobalDim);
  for (const VoxelIndex& v : unique_voxels(world, config.global_voxel)) {
    const std::uint64_t h = hash_voxel(v, kGlobalSalt);
    const double sign = (hash_voxel(v, kSignSalt) & 1U) ? 1.0 : -1.0;
    hist[static_cast<Eigen::Index>(h % kGlobalDim)] += sign;
  }
  if (!(hist.norm() > 0.0)) hist[0] = 1.0;
  hist /= hist.norm();
  if (noise.global > 0.0) {
    Eigen::VectorXd n(kGlobalDim);
    fill_gaussian(n, rng, noise.global);
    hist += n;
  }
  GlobalDescriptor global = GlobalDescriptor::normalized(std::move(hist));

  // Keypoint candidates: above-ground world voxels near the cloud origin.
  std::vector<VoxelIndex> cand_vox;
  {
    std::vector<Vec3> kept;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (world[i].z() >= config.min_world_z && cloud[i].norm() <= config.crop_radius) kept.push_back(world[i]);
    }
    // Clouds without such points fall back to every voxel.
    cand_vox = unique_voxels(kept.empty() ? std::span<const Vec3>(world) : std::span<const Vec3>(kept),
                             config.keypoint_voxel);
  }
  std::vector<std::pair<std::uint64_t, std::size_t>> ranked(cand_vox.size());
  for (std::size_t i = 0; i < cand_vox.size(); ++i) ranked[i] = {hash_voxel(cand_vox[i], kSelectSalt), i};
  std::sort(ranked.begin(), ranked.end());

  std::vector<std::size_t> chosen;
  if (config.farthest_point_sampling) {
    std::vector<Vec3> pts;
    pts.reserve(cand_vox.size());
    for (const VoxelIndex& v : cand_vox) pts.push_back(voxel_center(v, config.keypoint_voxel));
    chosen = farthest_point_sample(pts, ranked.front().second, config.max_keypoints);
  } else {
    for (std::size_t i = 0; i < std::min(config.max_keypoints, ranked.size()); ++i) {
      chosen.push_back(ranked[i].second);
    }
  }
  std::sort(chosen.begin(), chosen.end());

  const auto n = static_cast<Eigen::Index>(chosen.size());
  const RigidTransform to_local = inverse(world_pose);
  std::vector<Vec3> coords;
  coords.reserve(chosen.size());
  FeatureMatrix feats(n, kLocalDim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t c = chosen[static_cast<std::size_t>(i)];
    coords.push_back(to_local * voxel_center(cand_vox[c], config.keypoint_voxel));
    feats.row(i) = random_unit_vector(kLocalDim, hash_voxel(cand_vox[c], kFeatureSalt)).transpose();
  }

  if (noise.local > 0.0) {
    Eigen::VectorXd e(kLocalDim);
    for (Eigen::Index i = 0; i < n; ++i) {
      fill_gaussian(e, rng, noise.local);
      feats.row(i) += e.transpose();
      feats.row(i).normalize();
    }
  }
  if (noise.outlier_fraction > 0.0 && n > 0) {
    const auto count = static_cast<std::size_t>(
        std::llround(std::clamp(noise.outlier_fraction, 0.0, 1.0) * static_cast<double>(n)));
    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < count; ++k) {
      feats.row(static_cast<Eigen::Index>(order[k])) =
          random_unit_vector(kLocalDim, rng()).transpose();
    }
  }

  std::uniform_real_distribution<double> sal(config.saliency_min, config.saliency_max);
  std::vector<double> saliency(chosen.size());
  for (double& s : saliency) s = sal(rng);

  return {std::move(global), KeypointSet(std::move(coords), std::move(feats), std::move(saliency))};
}

Description OracleProvider::describe(std::span<const Vec3> cloud, const RigidTransform& world_pose,
                                     std::uint64_t id) const {
  return oracle_describe(cloud, world_pose, hash_combine(seed_, id), noise_, config_);
}

void validate_correspondences(const CorrespondenceSet& c) {
  std::set<std::size_t> src;
  std::set<std::size_t> dst;
  for (const auto& p : c) {
    if (!p.source.allFinite() || !p.target.allFinite()) {
      fail(ErrorCode::InvalidArgument, "non-finite correspondence coordinate");
    }
    if (!src.insert(p.source_index).second || !dst.insert(p.target_index).second) {
      fail(ErrorCode::InvalidArgument, "correspondence indices must be unique per side");
    }
  }
}

namespace {

CorrespondenceSet mutual_matches(const KeypointSet& a, const KeypointSet& b,
                                 const Eigen::MatrixXd& d) {
  const Eigen::Index n = d.rows();
  const Eigen::Index m = d.cols();
  std::vector<Eigen::Index> row_best(n, 0);
  std::vector<Eigen::Index> col_best(m, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 1; j < m; ++j) {
      if (d(i, j) < d(i, row_best[i])) row_best[i] = j;
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 1; i < n; ++i) {
      if (d(i, j) < d(col_best[j], j)) col_best[j] = i;
    }
  }
  CorrespondenceSet out;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = row_best[i];
    if (col_best[j] != i) continue;
    out.push_back({a.coords()[i], b.coords()[j], d(i, j), static_cast<std::size_t>(i),
                   static_cast<std::size_t>(j)});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.feature_distance < y.feature_distance;
  });
  return out;
}

}  // namespace

CorrespondenceSet match_features(const KeypointSet& a, const KeypointSet& b) {
  if (a.empty() || b.empty()) fail(ErrorCode::EmptyInput, "match_features: empty keypoint set");
  return mutual_matches(a, b, kernels::feature_distances(a.features(), b.features()));
}

CorrespondenceSet match_features_serial(const KeypointSet& a, const KeypointSet& b) {
  if (a.empty() || b.empty()) fail(ErrorCode::EmptyInput, "match_features: empty keypoint set");
  return mutual_matches(a, b, kernels::feature_distances_serial(a.features(), b.features()));
}

}  // namespace lvr
