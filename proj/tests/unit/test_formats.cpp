#include "lvr/errors.hpp"
#include "lvr/formats.hpp"
#include "support/test_util.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

namespace lvr {
namespace {

using test::Rng;

template <class Write>
std::string bytes(Write w) {
  std::ostringstream os(std::ios::binary);
  w(os);
  return os.str();
}

template <class Read>
void expect_format_error(const std::string& data, Read r) {
  std::istringstream is(data, std::ios::binary);
  try {
    r(is);
    FAIL() << "accepted " << data.size() << " bytes";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Format) << e.what();
  }
}

DepthImage sample_image(Rng& rng) {
  DepthImage img;
  img.height = 4;
  img.width = 6;
  img.timestamp = 12.5;
  img.pose = test::random_transform(rng);
  for (int i = 0; i < 24; ++i) img.depth.push_back(i % 5 == 0 ? 0.0 : test::uniform(rng, 0.5, 30));
  return img;
}

Description sample_description(Rng& rng) {
  return {test::random_descriptor(rng), test::random_keypoints(rng, 17, 10.0)};
}

TEST(Formats, DepthRoundTrip) {
  Rng rng(1);
  const DepthImage img = sample_image(rng);
  const std::string data = bytes([&](std::ostream& os) { formats::write_depth_image(os, img); });
  EXPECT_EQ(data.substr(0, 4), "DPTH");
  std::istringstream is(data, std::ios::binary);
  const DepthImage back = formats::read_depth_image(is);
  ASSERT_EQ(back.height, 4u);
  ASSERT_EQ(back.width, 6u);
  EXPECT_EQ(back.timestamp, 12.5);
  for (std::size_t i = 0; i < img.depth.size(); ++i) EXPECT_EQ(back.depth[i], double(float(img.depth[i])));
  EXPECT_LT((back.pose.rotation - img.pose.rotation).norm(), 1e-12);
  EXPECT_LT((back.pose.translation - img.pose.translation).norm(), 1e-12);
  // The pose goes through a quaternion, so only the depth payload is byte-stable.
  const std::string again = bytes([&](std::ostream& os) { formats::write_depth_image(os, back); });
  EXPECT_EQ(again.substr(80), data.substr(80));
}

TEST(Formats, DepthErrors) {
  Rng rng(2);
  const std::string data = bytes([&](std::ostream& os) { formats::write_depth_image(os, sample_image(rng)); });
  auto read = [](std::istream& is) { formats::read_depth_image(is); };
  for (std::size_t cut : {0u, 3u, 8u, 20u, 60u, 80u}) expect_format_error(data.substr(0, cut), read);
  expect_format_error(data.substr(0, data.size() - 1), read);
  std::string bad = data;
  bad[0] = 'X';
  expect_format_error(bad, read);
  bad = data;
  bad[4] = 9;  // version
  expect_format_error(bad, read);

  DepthImage wrong;
  wrong.height = 2;
  wrong.width = 2;
  wrong.depth = {1.0};
  std::ostringstream os;
  EXPECT_THROW(formats::write_depth_image(os, wrong), Error);
}

TEST(Formats, GridRoundTrip) {
  Rng rng(3);
  VoxelGrid g;
  for (int i = 0; i < 50; ++i) g.update(g.index_of(test::random_point(rng, 5)), test::uniform(rng, -1, 1));
  const std::string data = bytes([&](std::ostream& os) { formats::write_grid(os, g); });
  std::istringstream is(data, std::ios::binary);
  const VoxelGrid back = formats::read_grid(is);
  const auto a = g.sorted_cells();
  const auto b = back.sorted_cells();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].first, b[i].first);
    EXPECT_EQ(b[i].second, double(float(a[i].second)));
  }
  EXPECT_EQ(back.params().voxel_size, double(float(g.params().voxel_size)));
  EXPECT_EQ(bytes([&](std::ostream& os) { formats::write_grid(os, back); }), data);
  expect_format_error(data.substr(0, data.size() - 2), [](std::istream& s) { formats::read_grid(s); });
  expect_format_error("OCC", [](std::istream& s) { formats::read_grid(s); });
}

TEST(Formats, FeaturesRoundTrip) {
  Rng rng(4);
  const Description d = sample_description(rng);
  const std::string data = bytes([&](std::ostream& os) { formats::write_features(os, d); });
  EXPECT_EQ(data.size(), 4u + 4 + 4 + 256 * 4 + 17 * (3 + 128 + 1) * 4);
  std::istringstream is(data, std::ios::binary);
  const Description back = formats::read_features(is);
  EXPECT_LT((back.global.values() - d.global.values()).cwiseAbs().maxCoeff(), 1e-7);
  ASSERT_EQ(back.keypoints.size(), 17u);
  for (std::size_t i = 0; i < 17; ++i) {
    EXPECT_LT((back.keypoints.coords()[i] - d.keypoints.coords()[i]).norm(), 1e-5);
    EXPECT_EQ(back.keypoints.saliency()[i], double(float(d.keypoints.saliency()[i])));
  }
  EXPECT_EQ(bytes([&](std::ostream& os) { formats::write_features(os, back); }), data);
  auto read = [](std::istream& s) { formats::read_features(s); };
  for (std::size_t cut : {2u, 10u, 500u, 2000u}) expect_format_error(data.substr(0, cut), read);
  std::string bad = data;
  bad[1] = 'X';
  expect_format_error(bad, read);
}

TEST(Formats, PlyRoundTripBothEncodings) {
  Rng rng(5);
  const PointCloud cloud = test::random_cloud(rng, 40, 20.0);
  for (auto enc : {formats::PlyEncoding::Ascii, formats::PlyEncoding::BinaryLittleEndian}) {
    const std::string data = bytes([&](std::ostream& os) { formats::write_ply(os, cloud, enc); });
    std::istringstream is(data, std::ios::binary);
    const PointCloud back = formats::read_ply(is);
    ASSERT_EQ(back.size(), cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) EXPECT_LT((back[i] - cloud[i]).norm(), 1e-12);
  }
  expect_format_error("plx\n", [](std::istream& s) { formats::read_ply(s); });
}

TEST(Formats, PlyReadsFloatProperties) {
  const std::string text =
      "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\n"
      "property float intensity\nend_header\n1 2 3 9\n4 5 6 9\n";
  std::istringstream is(text);
  const PointCloud c = formats::read_ply(is);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1], Vec3(4, 5, 6));
}

TEST(Formats, PositionsCsv) {
  const std::vector<formats::PositionRecord> rows{{3, Vec3(1.5, -2, 0.25)}, {7, Vec3(100, 200, 300)}};
  std::ostringstream os;
  formats::write_positions_csv(os, rows);
  std::istringstream is(os.str());
  const auto back = formats::read_positions_csv(is);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].id, 3u);
  EXPECT_EQ(back[0].position, rows[0].position);
  EXPECT_EQ(back[1].position, rows[1].position);
  std::istringstream bad("id,x,y,z\n1,2,3\n");
  EXPECT_THROW(formats::read_positions_csv(bad), Error);
}

TEST(Formats, FileHelpers) {
  Rng rng(6);
  const auto dir = test::make_temp_dir("formats");
  const Description d = sample_description(rng);
  formats::save_features(dir / "a.feat", d);
  EXPECT_EQ(formats::load_features(dir / "a.feat").keypoints.size(), d.keypoints.size());
  const RigidTransform pose = test::random_transform(rng);
  formats::save_pose(dir / "p.txt", 3.0, pose);
  EXPECT_LT((formats::load_pose(dir / "p.txt").pose.translation - pose.translation).norm(), 1e-9);
  try {
    formats::load_features(dir / "missing.feat");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace lvr
