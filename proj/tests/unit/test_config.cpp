#include "lvr/config.hpp"
#include "lvr/errors.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

namespace lvr {
namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted: " << text;
  return ErrorCode::Io;
}

TEST(Config, DefaultsRoundTrip) {
  const PipelineConfig d;
  const std::string text = dump_config(d);
  EXPECT_TRUE(parse_config(text) == d);
  EXPECT_EQ(dump_config(parse_config(text)), text);
}

TEST(Config, ModifiedValuesRoundTrip) {
  PipelineConfig c;
  c.registration.d_thr = 0.75;
  c.tuples.alpha_pos_pr = 0.4;
  c.world.seed = 99;
  c.submap.require_both = true;
  c.oracle_noise.outlier_fraction = 0.3;
  c.provider_seed = 12;
  const PipelineConfig back = parse_config(dump_config(c));
  EXPECT_TRUE(back == c);
  EXPECT_FALSE(back == PipelineConfig{});
}

TEST(Config, HyperparameterDefaults) {
  const PipelineConfig c;
  EXPECT_EQ(c.loss.margin, 0.2);
  EXPECT_EQ(c.registration.d_thr, 0.5);
  EXPECT_EQ(c.registration.tau, 0.05);
  EXPECT_EQ(c.tuples.alpha_pos_pr, 0.3);
  EXPECT_EQ(c.tuples.alpha_pos_reg, 0.1);
}

TEST(Config, MissingKeysKeepDefaults) {
  const PipelineConfig c = parse_config(R"({"version": 1, "registration": {"tau": 0.1}})");
  EXPECT_EQ(c.registration.tau, 0.1);
  EXPECT_EQ(c.registration.d_thr, 0.5);
}

TEST(Config, Rejections) {
  EXPECT_EQ(code_of(R"({"version": 1, "registraton": {}})"), ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"version": 1, "registration": {"tua": 0.1}})"), ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"version": 2})"), ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"registration": {}})"), ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"version": 1, "registration": {"d_thr": -1}})"), ErrorCode::Config);
  EXPECT_EQ(code_of(R"({"version": 1, "registration": {"d_thr": "x"}})"), ErrorCode::Config);
  EXPECT_EQ(code_of("{not json"), ErrorCode::Config);
}

TEST(Config, WorldConfigDocument) {
  SyntheticWorldConfig w;
  w.seed = 5;
  w.trajectory_length = 123.0;
  const SyntheticWorldConfig back = parse_world_config(dump_world_config(w));
  EXPECT_EQ(back.seed, 5u);
  EXPECT_EQ(back.trajectory_length, 123.0);
  EXPECT_EQ(parse_world_config(R"({"seed": 3})").seed, 3u);
  EXPECT_THROW(parse_world_config(R"({"sed": 3})"), Error);
}

TEST(Config, DumpHasVersionAndAllSections) {
  const auto j = nlohmann::json::parse(dump_config(PipelineConfig{}));
  EXPECT_EQ(j.at("version"), kConfigVersion);
  for (const char* key : {"occupancy", "submap", "registration", "ransac", "tuples", "loss", "world"})
    EXPECT_TRUE(j.contains(key)) << key;
}

}  // namespace
}  // namespace lvr
