#pragma once

// Unified pipeline configuration, stored as JSON with a `version` field.
// Missing keys keep their defaults; unknown keys are rejected.

#include "lvr/correspond.hpp"
#include "lvr/depth_submap.hpp"
#include "lvr/features.hpp"
#include "lvr/losses.hpp"
#include "lvr/occupancy.hpp"
#include "lvr/registration.hpp"
#include "lvr/world.hpp"

#include <filesystem>
#include <string>

namespace lvr {

inline constexpr int kConfigVersion = 1;

struct PipelineConfig {
  OccupancyParams occupancy;
  SubmapPolicy submap;
  RegistrationConfig registration;
  RansacConfig ransac;
  TupleConfig tuples;
  LossConfig loss;
  SyntheticWorldConfig world;
  OracleNoise oracle_noise;
  OracleConfig oracle;
  std::uint64_t provider_seed = 0;

  /// Runs every component's validation.
  void validate() const;
};

std::string dump_config(const PipelineConfig& cfg);
/// Throws Error(Config) on malformed JSON, wrong version, unknown keys or
/// invalid values.
PipelineConfig parse_config(const std::string& json);
PipelineConfig load_config(const std::filesystem::path& p);

/// Parses a stand-alone world config document (same keys as the `world`
/// section, optional `version`).
SyntheticWorldConfig parse_world_config(const std::string& json);
std::string dump_world_config(const SyntheticWorldConfig& cfg);

bool operator==(const PipelineConfig& a, const PipelineConfig& b);

}  // namespace lvr
