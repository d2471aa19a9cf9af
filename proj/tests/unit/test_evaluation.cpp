#include "lvr/errors.hpp"
#include "lvr/evaluation.hpp"
#include "lvr/retrieval.hpp"
#include "support/reference_evaluator.hpp"
#include "support/scenes.hpp"
#include "support/test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lvr {
namespace {

using test::Rng;

class EvalWorld : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    world_ = new SyntheticWorld(generate_world(test::small_world_config(11)));
    set_ = new EvalSet(make_eval_set(*world_, SubmapPolicy{}, OccupancyParams{}));
  }
  static void TearDownTestSuite() {
    delete set_;
    delete world_;
  }

  static std::pair<std::vector<DescribedItem>, std::vector<DescribedItem>> described(const OracleNoise& noise) {
    const OracleProvider provider(5, noise);
    return {describe_all(set_->queries, provider), describe_all(set_->candidates, provider)};
  }

  static SyntheticWorld* world_;
  static EvalSet* set_;
};

SyntheticWorld* EvalWorld::world_ = nullptr;
EvalSet* EvalWorld::set_ = nullptr;

TEST_F(EvalWorld, SetHasQueriesAndCandidates) {
  EXPECT_FALSE(set_->queries.empty());
  EXPECT_FALSE(set_->candidates.empty());
  for (const auto& q : set_->queries) EXPECT_FALSE(q.cloud.empty());
}

TEST_F(EvalWorld, ProtocolsMatchReferenceEvaluator) {
  for (const OracleNoise& noise : {OracleNoise{}, OracleNoise{0.05, 0.05, 0.3}}) {
    const auto [q, c] = described(noise);
    const Registrar reg = make_registrar(Method::Spectral, MethodConfig{});
    EXPECT_EQ(test::compare_reports(evaluate_top1(q, c, reg), test::reference_top1(q, c, reg)), "");
    EXPECT_EQ(test::compare_reports(evaluate_comprehensive(q, c, reg), test::reference_comprehensive(q, c, reg)), "");
  }
}

TEST_F(EvalWorld, Top1SuccessfulMeanNotAboveComprehensiveMean) {
  const auto [q, c] = described(OracleNoise{0.005, 0.05, 0.3});
  const Registrar reg = make_registrar(Method::Spectral, MethodConfig{});
  const EvaluationReport top1 = evaluate_top1(q, c, reg);
  const EvaluationReport all = evaluate_comprehensive(q, c, reg);
  EXPECT_LE(top1.mean_rre_deg, all.mean_rre_deg);
  EXPECT_GE(top1.registrations, 1u);
  EXPECT_GE(all.registrations, top1.registrations);
}

TEST_F(EvalWorld, RecallMatchesReference) {
  const auto [q, c] = described(OracleNoise{0.2, 0.0, 0.0});
  const RecallReport r = evaluate_recall(q, c);
  const auto ref = test::reference_top1(q, c, make_registrar(Method::Spectral, MethodConfig{}));
  EXPECT_NEAR(r.r1_5m, ref.r1_5m, 1e-12);
  EXPECT_NEAR(r.r5_5m, ref.r5_5m, 1e-12);
  EXPECT_NEAR(r.r1_20m, ref.r1_20m, 1e-12);
  EXPECT_NEAR(r.r5_20m, ref.r5_20m, 1e-12);
  EXPECT_LE(r.queries_5m, r.queries_20m);
}

TEST_F(EvalWorld, RandomDescriptorsRetrieveAtChanceRate) {
  auto [q, c] = described(OracleNoise{});
  // Chance of a uniformly random top-1 being within 20 m, over queries with a positive.
  double chance = 0.0;
  std::size_t counted = 0;
  for (const auto& qi : q) {
    std::size_t pos = 0;
    for (const auto& ci : c) pos += planar_distance(qi.pose.translation, ci.pose.translation) <= 20.0;
    if (pos == 0) continue;
    chance += double(pos) / double(c.size());
    ++counted;
  }
  chance /= double(counted);

  Rng rng(12);
  double mean = 0.0;
  const int draws = 300;
  for (int d = 0; d < draws; ++d) {
    for (auto& x : q) x.description.global = test::random_descriptor(rng);
    for (auto& x : c) x.description.global = test::random_descriptor(rng);
    mean += evaluate_recall(q, c).r1_20m;
  }
  mean /= draws;
  const double se = std::sqrt(chance * (1 - chance) / double(counted * draws));
  EXPECT_NEAR(mean, chance, 4 * se + 1e-3);
}

TEST(Evaluation, ThreePositivesGiveThreeRegistrations) {
  Rng rng(1);
  const KeypointSet k = test::random_keypoints(rng, 20, 5.0);
  auto item = [&](std::uint64_t id, double x) {
    return DescribedItem{id, Description{test::random_descriptor(rng), k}, RigidTransform::from_translation(Vec3(x, 0, 0))};
  };
  const std::vector<DescribedItem> q{item(100, 0)};
  const std::vector<DescribedItem> c{item(1, 3), item(2, -12), item(3, 19.5), item(4, 20.5), item(5, 80)};
  std::size_t calls = 0;
  const Registrar reg = [&](const KeypointSet&, const KeypointSet&) {
#pragma omp atomic
    ++calls;
    return RegistrationOutcome{RigidTransform::identity(), true, 20, 0.0};
  };
  const EvaluationReport r = evaluate_comprehensive(q, c, reg);
  EXPECT_EQ(r.registrations, 3u);
  EXPECT_EQ(calls, 3u);
  ASSERT_EQ(r.pairs.size(), 3u);
  EXPECT_EQ(r.pairs[0].candidate, 1u);
  EXPECT_EQ(r.pairs[1].candidate, 2u);
  EXPECT_EQ(r.pairs[2].candidate, 3u);
  EXPECT_EQ(test::compare_reports(r, test::reference_comprehensive(q, c, reg)), "");
}

TEST(Evaluation, EmptyCandidatesRaiseEmptyIndex) {
  Rng rng(2);
  const std::vector<DescribedItem> q{{0, Description{test::random_descriptor(rng), test::random_keypoints(rng, 5, 1.0)}, {}}};
  try {
    evaluate_top1(q, std::vector<DescribedItem>{}, make_registrar(Method::Spectral, MethodConfig{}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyIndex);
  }
}

// Queries are displaced copies of candidates that sit more than 20 m apart,
// so every query has exactly one positive and it shares all keypoints.
std::pair<std::vector<DescribedItem>, std::vector<DescribedItem>> constructed_set(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DescribedItem> q, c;
  for (std::uint64_t i = 0; i < 8; ++i) {
    const KeypointSet k = test::random_keypoints(rng, 60, 15.0);
    const GlobalDescriptor g = test::random_descriptor(rng);
    const RigidTransform pc{rot_z(test::uniform(rng, -3, 3)), Vec3(50.0 * double(i), 0, 0)};
    const RigidTransform d{rot_z(test::uniform(rng, -3, 3)), Vec3(test::uniform(rng, -5, 5), test::uniform(rng, -5, 5), 0)};
    c.push_back({i, {g, k}, pc});
    q.push_back({100 + i, {g, k.transformed(inverse(d))}, compose(pc, d)});
  }
  return {q, c};
}

TEST(Evaluation, NoiseFreeConstructionIsFullyAccurate) {
  const auto [q, c] = constructed_set(3);
  for (Method m : {Method::Spectral, Method::Ransac}) {
    const Registrar reg = make_registrar(m, MethodConfig{});
    const EvaluationReport top1 = evaluate_top1(q, c, reg);
    const EvaluationReport all = evaluate_comprehensive(q, c, reg);
    EXPECT_EQ(top1.accuracy_pct, 100.0);
    EXPECT_EQ(all.accuracy_pct, 100.0);
    EXPECT_EQ(all.registrations, 8u);
    EXPECT_LT(all.mean_rre_deg, 1e-6);
    EXPECT_LT(all.mean_rte_m, 1e-6);
    EXPECT_EQ(top1.recall.r1_5m, 1.0);
  }
}

TEST(Evaluation, NoQualifyingPairsGiveZeroMeans) {
  Rng rng(4);
  const KeypointSet k = test::random_keypoints(rng, 10, 1.0);
  const std::vector<DescribedItem> q{{0, {test::random_descriptor(rng), k}, {}}};
  const std::vector<DescribedItem> c{{1, {test::random_descriptor(rng), k}, RigidTransform::from_translation(Vec3(100, 0, 0))}};
  const EvaluationReport r = evaluate_top1(q, c, make_registrar(Method::Spectral, MethodConfig{}));
  EXPECT_EQ(r.registrations, 0u);
  EXPECT_EQ(r.accuracy_pct, 0.0);
  EXPECT_EQ(r.mean_rre_deg, 0.0);
}

TEST(Evaluation, ReportJsonIsDeterministicAndOmitsTiming) {
  const auto [q, c] = constructed_set(5);
  const Registrar reg = make_registrar(Method::Spectral, MethodConfig{});
  const std::string a = report_json(evaluate_comprehensive(q, c, reg));
  const std::string b = report_json(evaluate_comprehensive(q, c, reg));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("mean_ms"), std::string::npos);
  std::ostringstream csv;
  write_pairs_csv(csv, evaluate_comprehensive(q, c, reg));
  EXPECT_NE(csv.str().find('\n'), std::string::npos);
}

TEST_F(EvalWorld, SweepBehaviour) {
  const OracleProvider provider(3, OracleNoise{});
  const PairGenerator gen = world_pair_generator(*world_, provider);
  const std::vector<double> offsets{0.0, 10.0, 20.0, 30.0};
  const auto curve = sweep_success_vs_offset(gen, offsets, 30, MethodConfig{}, 9);
  ASSERT_EQ(curve.size(), offsets.size());
  EXPECT_EQ(curve[0].spectral_rate(), 1.0);
  EXPECT_EQ(curve[0].ransac_rate(), 1.0);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    for (auto rate : {&SweepPoint::spectral_rate, &SweepPoint::ransac_rate}) {
      const double prev = (curve[i - 1].*rate)();
      const double cur = (curve[i].*rate)();
      const double sigma = std::sqrt(std::max(prev * (1 - prev), 0.25 / 30.0) / 30.0);
      EXPECT_LE(cur, prev + 2 * sigma) << "offset " << offsets[i];
    }
  }
  std::ostringstream csv;
  write_sweep_csv(csv, curve);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);

  EXPECT_THROW(sweep_success_vs_offset(gen, offsets, 29, MethodConfig{}, 9), Error);
}

// Measured on this world the spectral curve falls below RANSAC-1000 at large
// offsets; the check is kept as stated rather than loosened.
TEST_F(EvalWorld, SweepSpectralNotBelowRansacAtLargestOffset) {
  const OracleProvider provider(3, OracleNoise{});
  const std::vector<double> offsets{30.0};
  const auto curve = sweep_success_vs_offset(world_pair_generator(*world_, provider), offsets, 30, MethodConfig{}, 9);
  EXPECT_GE(curve.back().spectral_rate(), curve.back().ransac_rate());
}

TEST(Benchmark, DeterministicSuccessCountsAndSpeedOrdering) {
  const BenchmarkReport a = benchmark_registration(256, 0.3, 50, 7, 10000);
  const BenchmarkReport b = benchmark_registration(256, 0.3, 50, 7, 10000);
  EXPECT_EQ(a.spectral_successes, b.spectral_successes);
  EXPECT_EQ(a.ransac_successes, b.ransac_successes);
  EXPECT_EQ(a.trials, 50u);
  EXPECT_LT(a.spectral.mean_ms, a.ransac.mean_ms);
  EXPECT_GT(a.speedup(), 1.0);
  EXPECT_THROW(benchmark_registration(256, 0.3, 49, 7), Error);
}

TEST(Benchmark, TimingStats) {
  const TimingStats t = timing_stats({0.003, 0.001, 0.002, 0.010});
  EXPECT_EQ(t.count, 4u);
  EXPECT_NEAR(t.mean_ms, 4.0, 1e-12);
  EXPECT_NEAR(t.median_ms, 2.5, 1e-12);
  EXPECT_NEAR(t.max_ms, 10.0, 1e-12);
}

}  // namespace
}  // namespace lvr
