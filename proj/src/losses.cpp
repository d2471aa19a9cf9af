#include "lvr/losses.hpp"

#include "lvr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lvr {

void LossConfig::validate() const {
  if (!(margin > 0.0)) fail(ErrorCode::InvalidArgument, "margin must be > 0");
}

TripletResult triplet_loss(const Eigen::VectorXd& anchor, const Eigen::VectorXd& positive,
                           const Eigen::VectorXd& negative, double margin) {
  if (anchor.size() != positive.size() || anchor.size() != negative.size()) {
    fail(ErrorCode::DimensionMismatch, "triplet_loss: descriptor sizes differ");
  }
  const Eigen::VectorXd ap = anchor - positive;
  const Eigen::VectorXd an = anchor - negative;
  const double d_ap = ap.norm();
  const double d_an = an.norm();

  TripletResult r;
  r.grad_anchor = Eigen::VectorXd::Zero(anchor.size());
  r.grad_positive = Eigen::VectorXd::Zero(anchor.size());
  r.grad_negative = Eigen::VectorXd::Zero(anchor.size());
  const double raw = d_ap - d_an + margin;
  if (!(raw > 0.0)) return r;
  r.value = raw;

  if (d_ap > 0.0) {
    const Eigen::VectorXd u = ap / d_ap;
    r.grad_anchor += u;
    r.grad_positive -= u;
  }
  if (d_an > 0.0) {
    const Eigen::VectorXd u = an / d_an;
    r.grad_anchor -= u;
    r.grad_negative += u;
  }
  return r;
}

TripletResult triplet_loss(const GlobalDescriptor& anchor, const GlobalDescriptor& positive,
                           const GlobalDescriptor& negative, double margin) {
  return triplet_loss(anchor.values(), positive.values(), negative.values(), margin);
}

double descriptor_loss(const FeatureMatrix& anchor_matched, const FeatureMatrix& positive_all,
                       std::span<const std::size_t> nn_map, bool negate_distances) {
  const Eigen::Index n = anchor_matched.rows();
  const Eigen::Index m = positive_all.rows();
  if (n < 1 || m < 1) fail(ErrorCode::EmptyInput, "descriptor_loss: need N' >= 1 and M >= 1");
  if (static_cast<Eigen::Index>(nn_map.size()) != n) {
    fail(ErrorCode::DimensionMismatch, "descriptor_loss: nn_map length must equal N'");
  }
  if (anchor_matched.cols() != positive_all.cols()) {
    fail(ErrorCode::DimensionMismatch, "descriptor_loss: feature widths differ");
  }
  for (std::size_t k : nn_map) {
    if (k >= static_cast<std::size_t>(m)) {
      fail(ErrorCode::IndexOutOfRange, "descriptor_loss: nn_map entry out of range");
    }
  }
  const double sign = negate_distances ? -1.0 : 1.0;
  const Eigen::MatrixXd d = kernels::feature_distances(anchor_matched, positive_all);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd logits = sign * d.row(i).transpose();
    const double top = logits.maxCoeff();
    const double lse = top + std::log((logits.array() - top).exp().sum());
    sum += lse - logits[static_cast<Eigen::Index>(nn_map[static_cast<std::size_t>(i)])];
  }
  return sum / static_cast<double>(n);
}

double prob_chamfer_loss(std::span<const Vec3> qa, std::span<const Vec3> qp,
                         std::span<const double> sa, std::span<const double> sp) {
  if (qa.empty() || qp.empty()) fail(ErrorCode::EmptyInput, "prob_chamfer_loss: empty keypoints");
  if (qa.size() != sa.size() || qp.size() != sp.size()) {
    fail(ErrorCode::DimensionMismatch, "prob_chamfer_loss: saliency length mismatch");
  }
  const auto positive = [](double s) { return s > 0.0; };
  if (!std::all_of(sa.begin(), sa.end(), positive) || !std::all_of(sp.begin(), sp.end(), positive)) {
    fail(ErrorCode::NonPositiveSaliency, "prob_chamfer_loss: saliency must be > 0");
  }
  const auto one_side = [](std::span<const Vec3> from, std::span<const Vec3> to,
                           std::span<const double> s_from, std::span<const double> s_to) {
    const auto nn = kernels::nearest_neighbors(from, to);
    double sum = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
      const double s = 0.5 * (s_from[i] + s_to[nn[i].index]);
      sum += std::log(s) + nn[i].distance / s;
    }
    return sum;
  };
  return one_side(qa, qp, sa, sp) + one_side(qp, qa, sp, sa);
}

double point_to_point_loss(std::span<const Vec3> qa, std::span<const Vec3> cloud_a,
                           std::span<const Vec3> qb, std::span<const Vec3> cloud_b) {
  const auto one_side = [](std::span<const Vec3> q, std::span<const Vec3> cloud) {
    if (q.empty()) return 0.0;
    if (cloud.empty()) fail(ErrorCode::EmptyInput, "point_to_point_loss: empty cloud");
    double sum = 0.0;
    for (const auto& nn : kernels::nearest_neighbors(q, cloud)) sum += nn.distance;
    return sum;
  };
  if (cloud_a.empty() || cloud_b.empty()) {
    fail(ErrorCode::EmptyInput, "point_to_point_loss: empty cloud");
  }
  return one_side(qa, cloud_a) + one_side(qb, cloud_b);
}

double total_loss(const LossTerms& t) {
  return t.triplet + t.descriptor + t.chamfer + t.point_to_point;
}

}  // namespace lvr
