#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lvr {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Ordered list of 3-D points in meters.
using PointCloud = std::vector<Vec3>;

/// Rigid SE(3) transform. Maps a point p to rotation * p + translation.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(const Vec3& t);
  static RigidTransform from_rotation(const Mat3& r);
  /// Quaternion in (x, y, z, w) order as used by TUM trajectory files.
  static RigidTransform from_tum(const Vec3& t, double qx, double qy, double qz, double qw);

  Eigen::Quaterniond quaternion() const;
  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

  /// ‖RᵀR − I‖_F
  double orthonormality_error() const;
  bool is_valid(double tol = 1e-9) const;
};

Mat3 rot_x(double radians);
Mat3 rot_y(double radians);
Mat3 rot_z(double radians);
double deg2rad(double deg);
double rad2deg(double rad);

/// Closest rotation matrix in the Frobenius sense (SVD projection, det = +1).
Mat3 project_to_rotation(const Mat3& m);

/// Applies b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& t);
PointCloud transform_points(const RigidTransform& t, std::span<const Vec3> cloud);

/// Relative rotation error in degrees, range [0, 180].
double rre(const RigidTransform& pred, const RigidTransform& gt);
/// Relative translation error in meters: ‖translation(inverse(gt) ∘ pred)‖.
double rte(const RigidTransform& pred, const RigidTransform& gt);

inline constexpr double kSuccessRreDeg = 5.0;
inline constexpr double kSuccessRteM = 2.0;

/// Registration success: rre ≤ 5° and rte ≤ 2 m, both inclusive.
bool is_success(const RigidTransform& pred, const RigidTransform& gt);

struct StampedPose {
  double timestamp = 0.0;
  RigidTransform pose;
};

/// Timestamped poses, strictly increasing in time.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<StampedPose> poses);

  void push_back(double timestamp, const RigidTransform& pose);
  const std::vector<StampedPose>& poses() const { return poses_; }
  std::size_t size() const { return poses_.size(); }
  bool empty() const { return poses_.empty(); }
  const StampedPose& operator[](std::size_t i) const { return poses_[i]; }

 private:
  std::vector<StampedPose> poses_;
};

/// One TUM line: `timestamp tx ty tz qx qy qz qw`.
std::string format_tum_line(double timestamp, const RigidTransform& pose);
StampedPose parse_tum_line(const std::string& line);

void write_tum(std::ostream& os, const Trajectory& trajectory);
Trajectory read_tum(std::istream& is);

}  // namespace lvr
