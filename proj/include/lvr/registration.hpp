#pragma once

#include "lvr/features.hpp"
#include "lvr/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace lvr {

struct RegistrationConfig {
  double d_thr = 0.5;
  double tau = 0.05;
  std::size_t power_iters_max = 100;
  double power_tol = 1e-8;
  std::size_t min_correspondences = 3;

  void validate() const;
};

struct RansacConfig {
  std::size_t iterations = 1000;
  double inlier_eps = 0.6;
  std::uint64_t seed = 0;
};

struct RegistrationResult {
  RigidTransform transform;
  std::vector<double> inlier_weights;  ///< max-normalized; empty for RANSAC
  std::size_t kept_count = 0;
  bool converged = false;
  double elapsed_seconds = 0.0;
};

/// Dense symmetric consistency matrix over correspondences (entries in [0, 1],
/// unit diagonal). Throws EmptyInput for an empty set.
Eigen::MatrixXd build_consistency_matrix(const CorrespondenceSet& c, double d_thr);
Eigen::MatrixXd build_consistency_matrix_serial(const CorrespondenceSet& c, double d_thr);

struct Eigenvector {
  Eigen::VectorXd values;  ///< nonnegative, max entry = 1
  bool converged = false;
  std::size_t iterations = 0;
};

/// Power iteration from the all-ones vector. Stops when successive
/// max-normalized iterates differ by less than `tol` in the ∞-norm.
Eigenvector leading_eigenvector(const Eigen::MatrixXd& m, std::size_t max_iters, double tol);

/// Weighted rigid fit (Kabsch/Umeyama, squared residuals) over correspondences
/// whose max-normalized weight exceeds `tau`. Maps source onto target.
RigidTransform weighted_lsq_fit(const CorrespondenceSet& c, std::span<const double> weights,
                                double tau, std::size_t min_correspondences = 3);

/// Spectral geometric-consistency registration on given correspondences.
RegistrationResult register_spectral(const CorrespondenceSet& c, const RegistrationConfig& cfg);
/// Matches features first, then registers. The result maps `query` coordinates
/// into the `candidate` frame.
RegistrationResult register_spectral(const KeypointSet& query, const KeypointSet& candidate,
                                     const RegistrationConfig& cfg);

/// 3-point hypothesize-and-verify baseline with a final refit on the best
/// consensus set. Deterministic for a fixed seed.
RegistrationResult register_ransac(const CorrespondenceSet& c, const RansacConfig& cfg);
RegistrationResult register_ransac(const KeypointSet& query, const KeypointSet& candidate,
                                   const RansacConfig& cfg);

}  // namespace lvr
