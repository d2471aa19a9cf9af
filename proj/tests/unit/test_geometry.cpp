#include "lvr/errors.hpp"
#include "lvr/geometry.hpp"
#include "support/test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace lvr {
namespace {

using test::Rng;

bool near(const RigidTransform& a, const RigidTransform& b, double tol) {
  return (a.rotation - b.rotation).norm() < tol && (a.translation - b.translation).norm() < tol;
}

TEST(Geometry, ComposeWithIdentity) {
  Rng rng(1);
  const RigidTransform t = test::random_transform(rng);
  EXPECT_TRUE(near(compose(RigidTransform::identity(), t), t, 1e-15));
}

TEST(Geometry, ComposeWithInverseIsIdentity) {
  Rng rng(2);
  const RigidTransform t = test::random_transform(rng);
  EXPECT_TRUE(near(compose(t, inverse(t)), RigidTransform::identity(), 1e-9));
}

TEST(Geometry, ComposeRotationsAboutZ) {
  const auto a = RigidTransform::from_rotation(rot_z(deg2rad(30)));
  const auto b = RigidTransform::from_rotation(rot_z(deg2rad(60)));
  EXPECT_TRUE(near(compose(a, b), RigidTransform::from_rotation(rot_z(deg2rad(90))), 1e-12));
}

TEST(Geometry, ComposeAppliesRightOperandFirst) {
  const auto r = RigidTransform::from_rotation(rot_z(deg2rad(90)));
  const auto t = RigidTransform::from_translation({1, 0, 0});
  // r ∘ t: translate then rotate, so the origin goes to (0, 1, 0).
  EXPECT_LT((compose(r, t) * Vec3::Zero() - Vec3(0, 1, 0)).norm(), 1e-12);
}

TEST(Geometry, InverseExamples) {
  EXPECT_TRUE(near(inverse(RigidTransform::identity()), RigidTransform::identity(), 1e-15));
  const auto inv = inverse(RigidTransform::from_translation({1, 2, 3}));
  EXPECT_EQ(inv.rotation, Mat3::Identity());
  EXPECT_EQ(inv.translation, Vec3(-1, -2, -3));
  Rng rng(3);
  const RigidTransform t = test::random_transform(rng);
  EXPECT_TRUE(near(inverse(inverse(t)), t, 1e-12));
}

TEST(Geometry, TransformPointsExamples) {
  Rng rng(4);
  const PointCloud c = test::random_cloud(rng, 20, 5.0);
  EXPECT_EQ(transform_points(RigidTransform::identity(), c), c);

  const PointCloud origin{Vec3::Zero()};
  const PointCloud up = transform_points(RigidTransform::from_translation({0, 0, 1}), origin);
  ASSERT_EQ(up.size(), 1u);
  EXPECT_EQ(up[0], Vec3(0, 0, 1));

  const PointCloud x{Vec3(1, 0, 0)};
  const PointCloud y = transform_points(RigidTransform::from_rotation(rot_z(deg2rad(90))), x);
  EXPECT_LT((y[0] - Vec3(0, 1, 0)).norm(), 1e-12);
}

TEST(Geometry, RreExamples) {
  const auto I = RigidTransform::identity();
  EXPECT_EQ(rre(I, I), 0.0);
  EXPECT_NEAR(rre(I, RigidTransform::from_rotation(rot_z(deg2rad(30)))), 30.0, 1e-9);
  EXPECT_NEAR(rre(RigidTransform::from_rotation(rot_x(deg2rad(10))), RigidTransform::from_rotation(rot_x(deg2rad(-10)))),
              20.0, 1e-9);
}

TEST(Geometry, RreRangeIncludesHalfTurn) {
  const auto half = RigidTransform::from_rotation(rot_y(deg2rad(180)));
  EXPECT_NEAR(rre(RigidTransform::identity(), half), 180.0, 1e-6);
}

TEST(Geometry, RteExamples) {
  Rng rng(5);
  const RigidTransform t = test::random_transform(rng);
  EXPECT_NEAR(rte(t, t), 0.0, 1e-12);
  EXPECT_NEAR(rte(RigidTransform::from_translation({3, 4, 0}), RigidTransform::identity()), 5.0, 1e-12);
  EXPECT_NEAR(rte(RigidTransform::identity(), RigidTransform::from_translation({0, 0, 2})), 2.0, 1e-12);
}

TEST(Geometry, SuccessThresholdsAreInclusive) {
  Rng rng(6);
  const RigidTransform gt = test::random_transform(rng);
  EXPECT_TRUE(is_success(gt, gt));

  // Exactly 5° about z and exactly 2 m along x relative to identity ground truth.
  RigidTransform edge = RigidTransform::from_rotation(rot_z(deg2rad(5.0)));
  edge.translation = Vec3(2.0, 0, 0);
  const double e_rre = rre(edge, RigidTransform::identity());
  const double e_rte = rte(edge, RigidTransform::identity());
  ASSERT_LE(std::abs(e_rre - 5.0), 1e-9);
  ASSERT_EQ(e_rte, 2.0);
  // Round-off may put the computed angle a hair above 5; the predicate must
  // use ≤ on whatever it computes, so check it against the computed values.
  EXPECT_EQ(is_success(edge, RigidTransform::identity()), e_rre <= 5.0 && e_rte <= 2.0);
  RigidTransform exact;
  exact.translation = Vec3(0, 2.0, 0);
  EXPECT_TRUE(is_success(exact, RigidTransform::identity()));

  EXPECT_FALSE(is_success(RigidTransform::from_rotation(rot_z(deg2rad(6.0))), RigidTransform::identity()));
  EXPECT_FALSE(is_success(RigidTransform::from_translation({0, 0, 2.0001}), RigidTransform::identity()));
}

TEST(GeometryProperty, AssociativityAndInverse) {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const auto a = test::random_transform(rng);
    const auto b = test::random_transform(rng);
    const auto c = test::random_transform(rng);
    ASSERT_TRUE(near(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-9));
    ASSERT_TRUE(near(compose(inverse(a), a), RigidTransform::identity(), 1e-9));
    ASSERT_TRUE(compose(a, b).is_valid(1e-9));
  }
}

TEST(GeometryProperty, RreSymmetricAndLeftInvariant) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const auto a = test::random_transform(rng);
    const auto b = test::random_transform(rng);
    const auto g = test::random_transform(rng);
    ASSERT_NEAR(rre(a, b), rre(b, a), 1e-9);
    ASSERT_NEAR(rre(compose(g, a), compose(g, b)), rre(a, b), 1e-9);
  }
}

TEST(GeometryProperty, RteInvariantUnderPureMotions) {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const auto a = test::random_transform(rng);
    const auto b = test::random_transform(rng);
    const auto shift = RigidTransform::from_translation(test::random_point(rng, 10));
    const auto turn = RigidTransform::from_rotation(test::random_rotation_matrix(rng));
    ASSERT_NEAR(rte(compose(shift, a), compose(shift, b)), rte(a, b), 1e-9);
    ASSERT_NEAR(rte(compose(turn, a), compose(turn, b)), rte(a, b), 1e-9);
  }
}

TEST(GeometryProperty, TransformPreservesDistances) {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = test::random_transform(rng);
    const PointCloud c = test::random_cloud(rng, 30, 20.0);
    const PointCloud d = transform_points(t, c);
    ASSERT_EQ(d.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        ASSERT_NEAR((d[i] - d[j]).norm(), (c[i] - c[j]).norm(), 1e-9);
      }
    }
  }
}

TEST(Geometry, ProjectToRotationFixesReflections) {
  Mat3 m = Mat3::Identity();
  m(2, 2) = -1.0;
  const Mat3 r = project_to_rotation(m);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  EXPECT_LT((r.transpose() * r - Mat3::Identity()).norm(), 1e-12);
}

TEST(Geometry, TumRoundTrip) {
  Rng rng(11);
  Trajectory traj;
  for (int i = 0; i < 20; ++i) traj.push_back(0.1 * i + 0.05, test::random_transform(rng, 50));
  std::stringstream ss;
  write_tum(ss, traj);
  const Trajectory back = read_tum(ss);
  ASSERT_EQ(back.size(), traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    EXPECT_EQ(back[i].timestamp, traj[i].timestamp);
    EXPECT_TRUE(near(back[i].pose, traj[i].pose, 1e-12));
  }
}

TEST(Geometry, TumLineFormat) {
  const std::string line = format_tum_line(1.5, RigidTransform::from_translation({1, 2, 3}));
  std::istringstream is(line);
  double v[8];
  for (double& x : v) ASSERT_TRUE(is >> x);
  EXPECT_EQ(v[0], 1.5);
  EXPECT_EQ(v[1], 1.0);
  EXPECT_EQ(v[3], 3.0);
  EXPECT_EQ(v[7], 1.0);  // qw of the identity
  const StampedPose p = parse_tum_line("2 0 0 0 0 0 0.7071067811865476 0.7071067811865476");
  EXPECT_NEAR(rre(p.pose, RigidTransform::from_rotation(rot_z(deg2rad(90)))), 0.0, 1e-6);
}

TEST(Geometry, TrajectoryRejectsNonIncreasingTime) {
  Trajectory t;
  t.push_back(1.0, RigidTransform::identity());
  EXPECT_THROW(t.push_back(1.0, RigidTransform::identity()), Error);
  std::istringstream bad("0 0 0 0 0 0 0 1\n0 0 0 0 0 0 0 1\n");
  EXPECT_THROW(read_tum(bad), Error);
}

TEST(Geometry, MalformedTumLineIsFormatError) {
  try {
    parse_tum_line("1 2 3");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Format);
  }
}

}  // namespace
}  // namespace lvr
