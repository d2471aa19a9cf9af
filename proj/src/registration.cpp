#include "lvr/registration.hpp"

#include "lvr/errors.hpp"
#include "lvr/kernels.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace lvr {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void split(const CorrespondenceSet& c, std::vector<Vec3>& src, std::vector<Vec3>& dst) {
  src.reserve(c.size());
  dst.reserve(c.size());
  for (const auto& p : c) {
    src.push_back(p.source);
    dst.push_back(p.target);
  }
}

// Weighted Kabsch on parallel arrays; weights must be positive.
RigidTransform kabsch(std::span<const Vec3> src, std::span<const Vec3> dst,
                      std::span<const double> w) {
  double wsum = 0.0;
  Vec3 cs = Vec3::Zero();
  Vec3 cd = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    wsum += w[i];
    cs += w[i] * src[i];
    cd += w[i] * dst[i];
  }
  cs /= wsum;
  cd /= wsum;
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    h += w[i] * (src[i] - cs) * (dst[i] - cd).transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 s = svd.singularValues();
  if (!(s[0] > 0.0) || s[1] <= 1e-12 * s[0]) {
    fail(ErrorCode::DegenerateGeometry, "weighted covariance has rank < 2");
  }
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  RigidTransform t;
  t.rotation = v * d * u.transpose();
  t.translation = cd - t.rotation * cs;
  return t;
}

}  // namespace

void RegistrationConfig::validate() const {
  if (!(d_thr > 0.0)) fail(ErrorCode::InvalidArgument, "d_thr must be > 0");
  if (!(tau >= 0.0 && tau < 1.0)) fail(ErrorCode::InvalidArgument, "tau must lie in [0, 1)");
  if (min_correspondences < 3) fail(ErrorCode::InvalidArgument, "min_correspondences must be >= 3");
  if (power_iters_max < 1) fail(ErrorCode::InvalidArgument, "power_iters_max must be >= 1");
}

Eigen::MatrixXd build_consistency_matrix(const CorrespondenceSet& c, double d_thr) {
  if (c.empty()) fail(ErrorCode::EmptyInput, "build_consistency_matrix: no correspondences");
  std::vector<Vec3> src;
  std::vector<Vec3> dst;
  split(c, src, dst);
  return kernels::consistency_matrix(src, dst, d_thr);
}

Eigen::MatrixXd build_consistency_matrix_serial(const CorrespondenceSet& c, double d_thr) {
  if (c.empty()) fail(ErrorCode::EmptyInput, "build_consistency_matrix: no correspondences");
  std::vector<Vec3> src;
  std::vector<Vec3> dst;
  split(c, src, dst);
  return kernels::consistency_matrix_serial(src, dst, d_thr);
}

Eigenvector leading_eigenvector(const Eigen::MatrixXd& m, std::size_t max_iters, double tol) {
  const Eigen::Index n = m.rows();
  if (n < 1 || m.cols() != n) fail(ErrorCode::InvalidArgument, "leading_eigenvector: need square n >= 1");
  Eigenvector out;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd next(n);
  for (std::size_t it = 0; it < max_iters; ++it) {
    next.noalias() = m * v;
    Eigen::Index arg = 0;
    next.cwiseAbs().maxCoeff(&arg);
    const double scale = next[arg];
    if (scale == 0.0) break;  // v lies in the null space; keep the previous iterate
    next /= scale;
    const double delta = (next - v).lpNorm<Eigen::Infinity>();
    v.swap(next);
    out.iterations = it + 1;
    if (delta < tol) {
      out.converged = true;
      break;
    }
  }
  // Sign is fixed by the max-magnitude entry; clip the remaining negatives
  // (only possible for matrices that are not entrywise nonnegative).
  out.values = v.cwiseMax(0.0);
  const double top = out.values.maxCoeff();
  if (top > 0.0) out.values /= top;
  return out;
}

RigidTransform weighted_lsq_fit(const CorrespondenceSet& c, std::span<const double> weights,
                                double tau, std::size_t min_correspondences) {
  if (weights.size() != c.size()) {
    fail(ErrorCode::DimensionMismatch, "weighted_lsq_fit: one weight per correspondence");
  }
  double top = 0.0;
  for (double w : weights) top = std::max(top, w);
  std::vector<Vec3> src;
  std::vector<Vec3> dst;
  std::vector<double> w;
  if (top > 0.0) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double e = weights[i] / top;
      if (e > tau) {
        src.push_back(c[i].source);
        dst.push_back(c[i].target);
        w.push_back(e);
      }
    }
  }
  if (src.size() < std::max<std::size_t>(3, min_correspondences)) {
    fail(ErrorCode::InsufficientCorrespondences,
         "weighted_lsq_fit: " + std::to_string(src.size()) + " correspondences above tau");
  }
  return kabsch(src, dst, w);
}

RegistrationResult register_spectral(const CorrespondenceSet& c, const RegistrationConfig& cfg) {
  const auto t0 = Clock::now();
  if (c.size() < cfg.min_correspondences) {
    fail(ErrorCode::InsufficientCorrespondences,
         "register_spectral: only " + std::to_string(c.size()) + " correspondences");
  }
  const Eigen::MatrixXd m = build_consistency_matrix(c, cfg.d_thr);
  const Eigenvector e = leading_eigenvector(m, cfg.power_iters_max, cfg.power_tol);
  RegistrationResult r;
  r.inlier_weights.assign(e.values.data(), e.values.data() + e.values.size());
  r.transform = weighted_lsq_fit(c, r.inlier_weights, cfg.tau, cfg.min_correspondences);
  r.kept_count = static_cast<std::size_t>(
      std::count_if(r.inlier_weights.begin(), r.inlier_weights.end(),
                    [&](double w) { return w > cfg.tau; }));
  r.converged = e.converged;
  r.elapsed_seconds = seconds_since(t0);
  return r;
}

RegistrationResult register_spectral(const KeypointSet& query, const KeypointSet& candidate,
                                     const RegistrationConfig& cfg) {
  const auto t0 = Clock::now();
  RegistrationResult r = register_spectral(match_features(query, candidate), cfg);
  r.elapsed_seconds = seconds_since(t0);
  return r;
}

RegistrationResult register_ransac(const CorrespondenceSet& c, const RansacConfig& cfg) {
  const auto t0 = Clock::now();
  const std::size_t n = c.size();
  if (n < 3) {
    fail(ErrorCode::InsufficientCorrespondences,
         "register_ransac: only " + std::to_string(n) + " correspondences");
  }
  std::vector<Vec3> src;
  std::vector<Vec3> dst;
  split(c, src, dst);
  const double eps2 = cfg.inlier_eps * cfg.inlier_eps;
  const std::array<double, 3> ones{1.0, 1.0, 1.0};

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  RigidTransform best;
  std::size_t best_count = 0;
  bool have_model = false;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    std::size_t i0 = pick(rng);
    std::size_t i1 = pick(rng);
    std::size_t i2 = pick(rng);
    if (i0 == i1 || i0 == i2 || i1 == i2) continue;
    const std::array<Vec3, 3> s{src[i0], src[i1], src[i2]};
    const std::array<Vec3, 3> d{dst[i0], dst[i1], dst[i2]};
    RigidTransform model;
    try {
      model = kabsch(s, d, ones);
    } catch (const Error&) {
      continue;
    }
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if ((model.rotation * src[k] + model.translation - dst[k]).squaredNorm() < eps2) ++count;
    }
    if (!have_model || count > best_count) {
      best = model;
      best_count = count;
      have_model = true;
    }
  }
  if (!have_model) {
    fail(ErrorCode::DegenerateGeometry, "register_ransac: every sample was degenerate");
  }

  RegistrationResult r;
  r.transform = best;
  r.kept_count = best_count;
  if (best_count >= 3) {
    std::vector<Vec3> in_src;
    std::vector<Vec3> in_dst;
    for (std::size_t k = 0; k < n; ++k) {
      if ((best.rotation * src[k] + best.translation - dst[k]).squaredNorm() < eps2) {
        in_src.push_back(src[k]);
        in_dst.push_back(dst[k]);
      }
    }
    const std::vector<double> w(in_src.size(), 1.0);
    try {
      r.transform = kabsch(in_src, in_dst, w);
    } catch (const Error&) {
      // Collinear consensus set: keep the minimal-sample model.
    }
  }
  r.converged = true;
  r.elapsed_seconds = seconds_since(t0);
  return r;
}

RegistrationResult register_ransac(const KeypointSet& query, const KeypointSet& candidate,
                                   const RansacConfig& cfg) {
  const auto t0 = Clock::now();
  RegistrationResult r = register_ransac(match_features(query, candidate), cfg);
  r.elapsed_seconds = seconds_since(t0);
  return r;
}

}  // namespace lvr
