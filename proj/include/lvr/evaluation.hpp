#pragma once

// Re-localisation evaluation: retrieval recall, the Top-1 and Comprehensive
// registration protocols, the success-versus-offset sweep and the
// spectral-versus-RANSAC timing benchmark.

#include "lvr/depth_submap.hpp"
#include "lvr/features.hpp"
#include "lvr/geometry.hpp"
#include "lvr/registration.hpp"
#include "lvr/world.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lvr {

inline constexpr double kPositiveRadius = 20.0;
inline constexpr double kNearRadius = 5.0;

/// A cloud in its local frame with its local → world pose.
struct EvalCloud {
  std::uint64_t id = 0;
  PointCloud cloud;
  RigidTransform pose;
};

struct DescribedItem {
  std::uint64_t id = 0;
  Description description;
  RigidTransform pose;
};

std::vector<DescribedItem> describe_all(std::span<const EvalCloud> clouds,
                                        const FeatureProvider& provider);

/// Camera submaps as queries, LiDAR scans as candidates.
struct EvalSet {
  std::vector<EvalCloud> queries;
  std::vector<EvalCloud> candidates;
};
EvalSet make_eval_set(const SyntheticWorld& world, const SubmapPolicy& policy,
                      const OccupancyParams& occupancy);

struct RegistrationOutcome {
  RigidTransform transform;  ///< identity when the registration failed
  bool ok = false;
  std::size_t kept_count = 0;
  double seconds = 0.0;
};

enum class Method { Spectral, Ransac };

struct MethodConfig {
  RegistrationConfig spectral;
  RansacConfig ransac;
};

/// Runs one method on given correspondences. Registration errors (too few
/// correspondences, degenerate geometry) give ok = false.
RegistrationOutcome run_method(Method m, const CorrespondenceSet& c, const MethodConfig& cfg);

/// Registers query keypoints into the candidate frame.
using Registrar = std::function<RegistrationOutcome(const KeypointSet& query, const KeypointSet& candidate)>;
/// Mutual-NN matching followed by `m`.
Registrar make_registrar(Method m, MethodConfig cfg);

struct PairRecord {
  std::uint64_t query = 0;
  std::uint64_t candidate = 0;
  double distance = 0.0;  ///< planar distance between the two poses (m)
  bool registered = false;
  double rre_deg = 0.0;
  double rte_m = 0.0;
  bool success = false;
};

struct RecallReport {
  double r1_5m = 0.0;
  double r5_5m = 0.0;
  double r1_20m = 0.0;
  double r5_20m = 0.0;
  std::size_t queries_5m = 0;   ///< queries with at least one positive within 5 m
  std::size_t queries_20m = 0;
};

struct TimingStats {
  std::size_t count = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double max_ms = 0.0;
};

struct EvaluationReport {
  std::string protocol;
  std::size_t n_queries = 0;
  std::size_t n_candidates = 0;
  RecallReport recall;
  std::size_t registrations = 0;
  std::size_t successes = 0;
  double accuracy_pct = 0.0;
  /// Top-1: over successful registrations; Comprehensive: over all pairs.
  /// 0 when nothing qualifies.
  double mean_rre_deg = 0.0;
  double mean_rte_m = 0.0;
  std::vector<PairRecord> pairs;
  TimingStats timing;  ///< wall-clock, not reproducible
};

/// Retrieval recall@{1,5} at 5 m and 20 m.
RecallReport evaluate_recall(std::span<const DescribedItem> queries,
                             std::span<const DescribedItem> candidates);

/// Registers each query against its top-1 retrieval when that lies within
/// 20 m. Throws EmptyIndex without candidates.
EvaluationReport evaluate_top1(std::span<const DescribedItem> queries,
                               std::span<const DescribedItem> candidates, const Registrar& reg);
/// Registers each query against every candidate within 20 m.
EvaluationReport evaluate_comprehensive(std::span<const DescribedItem> queries,
                                        std::span<const DescribedItem> candidates,
                                        const Registrar& reg);

EvaluationReport evaluate_top1(std::span<const EvalCloud> queries, std::span<const EvalCloud> candidates,
                               const FeatureProvider& provider, const RegistrationConfig& cfg);
EvaluationReport evaluate_comprehensive(std::span<const EvalCloud> queries,
                                        std::span<const EvalCloud> candidates,
                                        const FeatureProvider& provider, const RegistrationConfig& cfg);

/// Reproducible part of the report (no timing). Key order is fixed.
std::string report_json(const EvaluationReport& r, bool include_pairs = true);
std::string timing_json(const TimingStats& t);
void write_pairs_csv(std::ostream& os, const EvaluationReport& r);

// ---- Sweep and benchmark ---------------------------------------------------

struct RegistrationPair {
  CorrespondenceSet correspondences;
  RigidTransform gt;  ///< query frame → candidate frame
};

/// (offset in meters, trial seed) → problem.
using PairGenerator = std::function<RegistrationPair(double offset, std::uint64_t seed)>;

/// Query scans cast `offset` meters further along the road than the candidate
/// scan, described by `provider` and matched by mutual NN.
PairGenerator world_pair_generator(const SyntheticWorld& world, const FeatureProvider& provider);

struct SweepPoint {
  double offset = 0.0;
  std::size_t trials = 0;
  std::size_t spectral_successes = 0;
  std::size_t ransac_successes = 0;
  double spectral_rate() const;
  double ransac_rate() const;
};

/// Both methods run on the same problem per trial. Requires trials ≥ 30.
std::vector<SweepPoint> sweep_success_vs_offset(const PairGenerator& gen, std::span<const double> offsets,
                                                std::size_t trials, const MethodConfig& cfg,
                                                std::uint64_t seed);
void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> curve);

struct BenchmarkReport {
  std::size_t n_corr = 0;
  double inlier_ratio = 0.0;
  std::size_t trials = 0;
  std::size_t ransac_iterations = 0;
  TimingStats spectral;
  TimingStats ransac;
  std::size_t spectral_successes = 0;
  std::size_t ransac_successes = 0;
  double speedup() const;  ///< mean RANSAC time / mean spectral time
};

/// Synthetic problems with paired seeds. Requires trials ≥ 50.
BenchmarkReport benchmark_registration(std::size_t n_corr, double inlier_ratio, std::size_t trials,
                                       std::uint64_t seed, std::size_t ransac_iterations = 10000,
                                       const RegistrationConfig& spectral = {});
std::string benchmark_json(const BenchmarkReport& r);

TimingStats timing_stats(std::vector<double> seconds);

}  // namespace lvr
