#include "lvr/geometry.hpp"

#include "lvr/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace lvr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonPositiveSaliency: return "NonPositiveSaliency";
    case ErrorCode::InsufficientCorrespondences: return "InsufficientCorrespondences";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Format: return "Format";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

RigidTransform RigidTransform::from_translation(const Vec3& t) {
  RigidTransform out;
  out.translation = t;
  return out;
}

RigidTransform RigidTransform::from_rotation(const Mat3& r) {
  RigidTransform out;
  out.rotation = r;
  return out;
}

RigidTransform RigidTransform::from_tum(const Vec3& t, double qx, double qy, double qz,
                                        double qw) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  if (!(q.norm() > 0.0)) fail(ErrorCode::Format, "zero-norm quaternion");
  RigidTransform out;
  out.rotation = q.normalized().toRotationMatrix();
  out.translation = t;
  return out;
}

Eigen::Quaterniond RigidTransform::quaternion() const {
  Eigen::Quaterniond q(rotation);
  q.normalize();
  // Canonical hemisphere so serialization is unique.
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return q;
}

double RigidTransform::orthonormality_error() const {
  return (rotation.transpose() * rotation - Mat3::Identity()).norm();
}

bool RigidTransform::is_valid(double tol) const {
  return rotation.allFinite() && translation.allFinite() && orthonormality_error() < tol &&
         std::abs(rotation.determinant() - 1.0) < tol;
}

Mat3 rot_x(double a) { return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix(); }
Mat3 rot_y(double a) { return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix(); }
Mat3 rot_z(double a) { return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix(); }
double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

Mat3 project_to_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return u * d * v.transpose();
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  if (out.orthonormality_error() > 1e-12) out.rotation = project_to_rotation(out.rotation);
  return out;
}

RigidTransform inverse(const RigidTransform& t) {
  RigidTransform out;
  out.rotation = t.rotation.transpose();
  out.translation = -(out.rotation * t.translation);
  return out;
}

PointCloud transform_points(const RigidTransform& t, std::span<const Vec3> cloud) {
  PointCloud out;
  out.reserve(cloud.size());
  for (const Vec3& p : cloud) out.push_back(t.rotation * p + t.translation);
  return out;
}

double rre(const RigidTransform& pred, const RigidTransform& gt) {
  const Mat3 rel = pred.rotation * gt.rotation.transpose();
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  return rad2deg(std::acos(c));
}

double rte(const RigidTransform& pred, const RigidTransform& gt) {
  return compose(inverse(gt), pred).translation.norm();
}

bool is_success(const RigidTransform& pred, const RigidTransform& gt) {
  return rre(pred, gt) <= kSuccessRreDeg && rte(pred, gt) <= kSuccessRteM;
}

Trajectory::Trajectory(std::vector<StampedPose> poses) {
  for (auto& p : poses) push_back(p.timestamp, p.pose);
}

void Trajectory::push_back(double timestamp, const RigidTransform& pose) {
  if (!poses_.empty() && !(timestamp > poses_.back().timestamp)) {
    fail(ErrorCode::InvalidArgument, "trajectory timestamps must be strictly increasing");
  }
  poses_.push_back({timestamp, pose});
}

std::string format_tum_line(double timestamp, const RigidTransform& pose) {
  const Eigen::Quaterniond q = pose.quaternion();
  const Vec3& t = pose.translation;
  // Shortest representation that parses back to the same double.
  std::string out;
  char buf[32];
  for (double v : {timestamp, t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w()}) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (!out.empty()) out += ' ';
    out.append(buf, res.ptr);
  }
  return out;
}

StampedPose parse_tum_line(const std::string& line) {
  std::istringstream ss(line);
  double v[8];
  for (double& x : v) {
    if (!(ss >> x)) fail(ErrorCode::Format, "malformed TUM line: '" + line + "'");
  }
  std::string extra;
  if (ss >> extra) fail(ErrorCode::Format, "trailing fields in TUM line: '" + line + "'");
  return {v[0], RigidTransform::from_tum({v[1], v[2], v[3]}, v[4], v[5], v[6], v[7])};
}

void write_tum(std::ostream& os, const Trajectory& trajectory) {
  for (const auto& p : trajectory.poses()) os << format_tum_line(p.timestamp, p.pose) << '\n';
}

Trajectory read_tum(std::istream& is) {
  Trajectory out;
  std::string line;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto p = parse_tum_line(line);
    out.push_back(p.timestamp, p.pose);
  }
  return out;
}

}  // namespace lvr
