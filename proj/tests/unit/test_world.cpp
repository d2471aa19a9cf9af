#include "lvr/errors.hpp"
#include "lvr/world.hpp"
#include "support/scenes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace lvr {
namespace {

bool same_images(const DepthImage& a, const DepthImage& b) {
  return a.height == b.height && a.width == b.width && a.depth == b.depth && a.pose.rotation == b.pose.rotation &&
         a.pose.translation == b.pose.translation && a.timestamp == b.timestamp;
}

TEST(World, SameSeedIsBitIdentical) {
  const SyntheticWorldConfig cfg = test::small_world_config(3);
  const SyntheticWorld a = generate_world(cfg);
  const SyntheticWorld b = generate_world(cfg);
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (std::size_t i = 0; i < a.frames.size(); ++i) ASSERT_TRUE(same_images(a.frames[i], b.frames[i]));
  ASSERT_EQ(a.scans.size(), b.scans.size());
  for (std::size_t i = 0; i < a.scans.size(); ++i) {
    ASSERT_EQ(a.scans[i].cloud, b.scans[i].cloud);
    ASSERT_EQ(a.scans[i].pose.translation, b.scans[i].pose.translation);
  }
  ASSERT_EQ(a.geometry.boxes.size(), b.geometry.boxes.size());
  for (std::size_t i = 0; i < a.geometry.boxes.size(); ++i) ASSERT_EQ(a.geometry.boxes[i].min, b.geometry.boxes[i].min);

  const SyntheticWorld c = generate_world(test::small_world_config(4));
  EXPECT_NE(a.geometry.boxes.front().min, c.geometry.boxes.front().min);
}

TEST(World, NoiseFreeDepthLiesOnSurfaces) {
  SyntheticWorldConfig cfg = test::small_world_config(5);
  cfg.depth_noise_sigma = 0.0;
  const SyntheticWorld w = generate_world(cfg);
  std::size_t checked = 0;
  for (std::size_t f = 0; f < w.frames.size(); f += 10) {
    const DepthImage& img = w.frames[f];
    for (const Vec3& p : project_depth(img, w.intrinsics)) {
      ASSERT_LT(w.geometry.distance_to_surface(img.pose * p), 1e-6);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(World, ScansStayInRangeAndCoverAllAzimuths) {
  const SyntheticWorld w = generate_world(test::small_world_config(6));
  ASSERT_FALSE(w.scans.empty());
  for (const LidarScan& s : w.scans) {
    std::vector<bool> bins(360, false);
    for (const Vec3& p : s.cloud) {
      ASSERT_LE(p.norm(), w.config.scan_range + 1e-9);
      // 1° bins centred on whole degrees, so rounding of beam azimuths cannot shift bins.
      const double az = std::atan2(p.y(), p.x()) * 180.0 / std::numbers::pi;
      bins[static_cast<std::size_t>(std::lround(az + 360.0)) % 360] = true;
    }
    std::size_t covered = 0;
    for (bool b : bins) covered += b;
    ASSERT_GT(covered, 350u) << "scan " << s.id;
  }
}

TEST(World, ScanPointsLieOnSurfaces) {
  const SyntheticWorld w = generate_world(test::small_world_config(7));
  const LidarScan& s = w.scans[w.scans.size() / 2];
  for (const Vec3& p : s.cloud) ASSERT_LT(w.geometry.distance_to_surface(s.pose * p), 1e-6);
}

TEST(World, ReverseRevisitsExist) {
  const SyntheticWorld w = generate_world(test::small_world_config(8));
  std::size_t reversed = 0;
  for (const LidarScan& a : w.scans)
    for (const LidarScan& b : w.scans) {
      const double planar = (a.pose.translation - b.pose.translation).head<2>().norm();
      const double cos_heading = a.pose.rotation.col(0).dot(b.pose.rotation.col(0));
      if (planar < w.config.scan_spacing && cos_heading < -0.9) ++reversed;
    }
  EXPECT_GT(reversed, 0u);
}

TEST(World, TrajectoryMatchesFrames) {
  const SyntheticWorld w = generate_world(test::small_world_config(9));
  ASSERT_EQ(w.trajectory.size(), w.frames.size());
  EXPECT_NEAR(double(w.frames.size()), w.config.trajectory_length / w.config.frame_spacing, 1.0);
  for (std::size_t i = 0; i < w.frames.size(); ++i) {
    ASSERT_EQ(w.frames[i].pose.translation, w.trajectory.poses()[i].pose.translation);
    ASSERT_TRUE(w.frames[i].pose.is_valid());
  }
}

TEST(World, ConfigValidation) {
  SyntheticWorldConfig cfg;
  cfg.extent = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.depth_noise_sigma = -1;
  EXPECT_THROW(generate_world(cfg), Error);
}

TEST(World, CastHitsGroundAndBoxes) {
  WorldGeometry g;
  g.boxes.push_back({Vec3(5, -1, 0), Vec3(6, 1, 2)});
  const auto ground = g.cast(Vec3(0, 0, 2), Vec3(0, 0, -1), 10);
  ASSERT_TRUE(ground);
  EXPECT_DOUBLE_EQ(*ground, 2.0);
  const auto box = g.cast(Vec3(0, 0, 1), Vec3(1, 0, 0), 10);
  ASSERT_TRUE(box);
  EXPECT_DOUBLE_EQ(*box, 5.0);
  EXPECT_FALSE(g.cast(Vec3(0, 0, 1), Vec3(-1, 0, 0), 10));
  EXPECT_FALSE(g.cast(Vec3(0, 0, 1), Vec3(1, 0, 0), 4));
}

}  // namespace
}  // namespace lvr
