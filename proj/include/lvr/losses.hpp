#pragma once

#include "lvr/features.hpp"
#include "lvr/geometry.hpp"
#include "lvr/kernels.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace lvr {

struct LossConfig {
  double margin = 0.2;
  /// Use exp(−distance) inside the softmax (conventional contrastive form)
  /// instead of exp(+distance) as written in the loss.
  bool descriptor_loss_negate_distances = false;

  void validate() const;
};

struct TripletResult {
  double value = 0.0;
  Eigen::VectorXd grad_anchor;
  Eigen::VectorXd grad_positive;
  Eigen::VectorXd grad_negative;
};

/// max(‖a − p‖ − ‖a − n‖ + margin, 0) with analytic subgradients. At the hinge
/// (value exactly 0) and where a norm vanishes the zero branch is taken.
TripletResult triplet_loss(const Eigen::VectorXd& anchor, const Eigen::VectorXd& positive,
                           const Eigen::VectorXd& negative, double margin);
TripletResult triplet_loss(const GlobalDescriptor& anchor, const GlobalDescriptor& positive,
                           const GlobalDescriptor& negative, double margin);

/// −(1/N′) Σᵢ ln( exp(‖aᵢ − p_nn(i)‖) / Σⱼ exp(‖aᵢ − pⱼ‖) ), evaluated with
/// log-sum-exp. `anchor_matched` holds the N′ anchor features that have a
/// correspondence; `nn_map[i]` indexes its partner row in `positive_all`.
double descriptor_loss(const FeatureMatrix& anchor_matched, const FeatureMatrix& positive_all,
                       std::span<const std::size_t> nn_map, bool negate_distances = false);

/// Probabilistic chamfer loss between keypoint sets with saliencies.
double prob_chamfer_loss(std::span<const Vec3> qa, std::span<const Vec3> qp,
                         std::span<const double> sa, std::span<const double> sp);

/// Σᵢ min_{p ∈ cloud_a} ‖qaᵢ − p‖ + Σⱼ min_{p ∈ cloud_b} ‖qbⱼ − p‖.
double point_to_point_loss(std::span<const Vec3> qa, std::span<const Vec3> cloud_a,
                           std::span<const Vec3> qb, std::span<const Vec3> cloud_b);

struct LossTerms {
  double triplet = 0.0;
  double descriptor = 0.0;
  double chamfer = 0.0;
  double point_to_point = 0.0;
};

double total_loss(const LossTerms& t);

}  // namespace lvr
