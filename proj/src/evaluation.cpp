#include "lvr/evaluation.hpp"

#include "lvr/errors.hpp"
#include "lvr/parallel.hpp"
#include "lvr/retrieval.hpp"
#include "lvr/synthetic.hpp"
#include "lvr/voxel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <numbers>
#include <ostream>
#include <random>

namespace lvr {
namespace {

using Clock = std::chrono::steady_clock;
using ordered_json = nlohmann::ordered_json;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

DescriptorIndex make_index(std::span<const DescribedItem> candidates) {
  DescriptorIndex index;
  for (const auto& c : candidates) index.add({c.id, c.description.global, c.pose.translation});
  return index;
}

const DescribedItem& find_item(std::span<const DescribedItem> items, std::uint64_t id) {
  const auto it = std::find_if(items.begin(), items.end(), [&](const auto& x) { return x.id == id; });
  if (it == items.end()) fail(ErrorCode::InvalidArgument, "unknown candidate id");
  return *it;
}

struct PendingPair {
  const DescribedItem* query;
  const DescribedItem* candidate;
};

// Runs all registrations (parallel), then aggregates in pair order.
std::vector<PairRecord> register_pairs(const std::vector<PendingPair>& pending, const Registrar& reg,
                                       std::vector<double>& seconds) {
  std::vector<PairRecord> records(pending.size());
  seconds.assign(pending.size(), 0.0);
  parallel_for(pending.size(), [&](std::size_t i) {
    const DescribedItem& q = *pending[i].query;
    const DescribedItem& c = *pending[i].candidate;
    const RegistrationOutcome out = reg(q.description.keypoints, c.description.keypoints);
    const RigidTransform gt = compose(inverse(c.pose), q.pose);
    PairRecord& r = records[i];
    r.query = q.id;
    r.candidate = c.id;
    r.distance = planar_distance(q.pose.translation, c.pose.translation);
    r.registered = out.ok;
    r.rre_deg = rre(out.transform, gt);
    r.rte_m = rte(out.transform, gt);
    r.success = out.ok && is_success(out.transform, gt);
    seconds[i] = out.seconds;
  });
  return records;
}

void summarize(EvaluationReport& rep, bool successful_only) {
  rep.registrations = rep.pairs.size();
  double sum_rre = 0.0;
  double sum_rte = 0.0;
  std::size_t n = 0;
  for (const PairRecord& p : rep.pairs) {
    if (p.success) ++rep.successes;
    if (successful_only && !p.success) continue;
    sum_rre += p.rre_deg;
    sum_rte += p.rte_m;
    ++n;
  }
  rep.accuracy_pct = rep.registrations == 0
                         ? 0.0
                         : 100.0 * static_cast<double>(rep.successes) / static_cast<double>(rep.registrations);
  rep.mean_rre_deg = n == 0 ? 0.0 : sum_rre / static_cast<double>(n);
  rep.mean_rte_m = n == 0 ? 0.0 : sum_rte / static_cast<double>(n);
}

ordered_json timing_object(const TimingStats& t) {
  ordered_json j;
  j["count"] = t.count;
  j["mean_ms"] = t.mean_ms;
  j["median_ms"] = t.median_ms;
  j["max_ms"] = t.max_ms;
  return j;
}

}  // namespace

std::vector<DescribedItem> describe_all(std::span<const EvalCloud> clouds, const FeatureProvider& provider) {
  std::vector<DescribedItem> out(clouds.size());
  parallel_for(clouds.size(), [&](std::size_t i) {
    const EvalCloud& c = clouds[i];
    out[i] = {c.id, provider.describe(c.cloud, c.pose, c.id), c.pose};
  });
  return out;
}

EvalSet make_eval_set(const SyntheticWorld& world, const SubmapPolicy& policy,
                      const OccupancyParams& occupancy) {
  EvalSet set;
  for (Submap& s : accumulate(world.frames, world.intrinsics, policy, occupancy)) {
    set.queries.push_back({s.id, std::move(s.cloud), s.reference_pose});
  }
  for (const LidarScan& s : world.scans) set.candidates.push_back({s.id, s.cloud, s.pose});
  return set;
}

RegistrationOutcome run_method(Method m, const CorrespondenceSet& c, const MethodConfig& cfg) {
  RegistrationOutcome out;
  const auto t0 = Clock::now();
  try {
    const RegistrationResult r =
        m == Method::Spectral ? register_spectral(c, cfg.spectral) : register_ransac(c, cfg.ransac);
    out.transform = r.transform;
    out.kept_count = r.kept_count;
    out.ok = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientCorrespondences && e.code() != ErrorCode::DegenerateGeometry &&
        e.code() != ErrorCode::EmptyInput) {
      throw;
    }
  }
  out.seconds = seconds_since(t0);
  return out;
}

Registrar make_registrar(Method m, MethodConfig cfg) {
  return [m, cfg](const KeypointSet& q, const KeypointSet& c) {
    const auto t0 = Clock::now();
    RegistrationOutcome out = run_method(m, match_features(q, c), cfg);
    out.seconds = seconds_since(t0);
    return out;
  };
}

RecallReport evaluate_recall(std::span<const DescribedItem> queries, std::span<const DescribedItem> candidates) {
  const DescriptorIndex index = make_index(candidates);
  if (index.empty()) fail(ErrorCode::EmptyIndex, "no candidates to retrieve from");
  std::vector<GlobalDescriptor> qd;
  qd.reserve(queries.size());
  for (const auto& q : queries) qd.push_back(q.description.global);
  const auto hits = query_topk_batch(index, qd, std::min<std::size_t>(5, index.size()));
  std::vector<std::set<std::uint64_t>> near(queries.size());
  std::vector<std::set<std::uint64_t>> far(queries.size());
  RecallReport r;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    near[i] = positives_by_radius(queries[i].pose.translation, index, kNearRadius);
    far[i] = positives_by_radius(queries[i].pose.translation, index, kPositiveRadius);
    r.queries_5m += near[i].empty() ? 0 : 1;
    r.queries_20m += far[i].empty() ? 0 : 1;
  }
  r.r1_5m = recall_at_n(hits, near, 1);
  r.r5_5m = recall_at_n(hits, near, 5);
  r.r1_20m = recall_at_n(hits, far, 1);
  r.r5_20m = recall_at_n(hits, far, 5);
  return r;
}

EvaluationReport evaluate_top1(std::span<const DescribedItem> queries, std::span<const DescribedItem> candidates,
                               const Registrar& reg) {
  EvaluationReport rep;
  rep.protocol = "top1";
  rep.n_queries = queries.size();
  rep.n_candidates = candidates.size();
  rep.recall = evaluate_recall(queries, candidates);

  const DescriptorIndex index = make_index(candidates);
  std::vector<PendingPair> pending;
  for (const DescribedItem& q : queries) {
    const auto top = query_topk(index, q.description.global, 1);
    const DescribedItem& c = find_item(candidates, top.front().id);
    if (planar_distance(q.pose.translation, c.pose.translation) <= kPositiveRadius) {
      pending.push_back({&q, &c});
    }
  }
  std::vector<double> secs;
  rep.pairs = register_pairs(pending, reg, secs);
  summarize(rep, true);
  rep.timing = timing_stats(std::move(secs));
  return rep;
}

EvaluationReport evaluate_comprehensive(std::span<const DescribedItem> queries,
                                        std::span<const DescribedItem> candidates, const Registrar& reg) {
  EvaluationReport rep;
  rep.protocol = "comprehensive";
  rep.n_queries = queries.size();
  rep.n_candidates = candidates.size();
  rep.recall = evaluate_recall(queries, candidates);

  const DescriptorIndex index = make_index(candidates);
  std::vector<PendingPair> pending;
  for (const DescribedItem& q : queries) {
    for (std::uint64_t id : positives_by_radius(q.pose.translation, index, kPositiveRadius)) {
      pending.push_back({&q, &find_item(candidates, id)});
    }
  }
  std::vector<double> secs;
  rep.pairs = register_pairs(pending, reg, secs);
  summarize(rep, false);
  rep.timing = timing_stats(std::move(secs));
  return rep;
}

EvaluationReport evaluate_top1(std::span<const EvalCloud> queries, std::span<const EvalCloud> candidates,
                               const FeatureProvider& provider, const RegistrationConfig& cfg) {
  if (candidates.empty()) fail(ErrorCode::EmptyIndex, "no candidates to retrieve from");
  const auto q = describe_all(queries, provider);
  const auto c = describe_all(candidates, provider);
  return evaluate_top1(q, c, make_registrar(Method::Spectral, {cfg, {}}));
}

EvaluationReport evaluate_comprehensive(std::span<const EvalCloud> queries,
                                        std::span<const EvalCloud> candidates,
                                        const FeatureProvider& provider, const RegistrationConfig& cfg) {
  if (candidates.empty()) fail(ErrorCode::EmptyIndex, "no candidates to retrieve from");
  const auto q = describe_all(queries, provider);
  const auto c = describe_all(candidates, provider);
  return evaluate_comprehensive(q, c, make_registrar(Method::Spectral, {cfg, {}}));
}

std::string report_json(const EvaluationReport& r, bool include_pairs) {
  ordered_json j;
  j["protocol"] = r.protocol;
  j["queries"] = r.n_queries;
  j["candidates"] = r.n_candidates;
  j["recall"] = {{"r1_5m", r.recall.r1_5m},
                 {"r5_5m", r.recall.r5_5m},
                 {"r1_20m", r.recall.r1_20m},
                 {"r5_20m", r.recall.r5_20m},
                 {"queries_5m", r.recall.queries_5m},
                 {"queries_20m", r.recall.queries_20m}};
  j["registrations"] = r.registrations;
  j["successes"] = r.successes;
  j["accuracy_pct"] = r.accuracy_pct;
  j["mean_rre_deg"] = r.mean_rre_deg;
  j["mean_rte_m"] = r.mean_rte_m;
  if (include_pairs) {
    ordered_json pairs = ordered_json::array();
    for (const PairRecord& p : r.pairs) {
      pairs.push_back({{"query", p.query},
                       {"candidate", p.candidate},
                       {"distance_m", p.distance},
                       {"registered", p.registered},
                       {"rre_deg", p.rre_deg},
                       {"rte_m", p.rte_m},
                       {"success", p.success}});
    }
    j["pairs"] = std::move(pairs);
  }
  return j.dump(2) + "\n";
}

std::string timing_json(const TimingStats& t) { return timing_object(t).dump(2) + "\n"; }

void write_pairs_csv(std::ostream& os, const EvaluationReport& r) {
  os << "query,candidate,distance_m,registered,rre_deg,rte_m,success\n";
  char buf[256];
  for (const PairRecord& p : r.pairs) {
    std::snprintf(buf, sizeof(buf), "%llu,%llu,%.17g,%d,%.17g,%.17g,%d\n",
                  static_cast<unsigned long long>(p.query), static_cast<unsigned long long>(p.candidate),
                  p.distance, p.registered ? 1 : 0, p.rre_deg, p.rte_m, p.success ? 1 : 0);
    os << buf;
  }
}

PairGenerator world_pair_generator(const SyntheticWorld& world, const FeatureProvider& provider) {
  return [&world, &provider](double offset, std::uint64_t seed) {
    const SyntheticWorldConfig& cfg = world.config;
    std::mt19937_64 rng(mix64(seed));
    const double margin = cfg.scan_range / 4.0;
    const double hi = std::max(margin, cfg.trajectory_length - margin - offset);
    std::uniform_real_distribution<double> pos(margin, hi);
    std::uniform_real_distribution<double> yaw(-std::numbers::pi, std::numbers::pi);
    const double s = pos(rng);
    const RigidTransform cand_pose = lidar_pose_at(cfg, s, false);
    const RigidTransform query_pose =
        compose(lidar_pose_at(cfg, s + offset, false), RigidTransform::from_rotation(rot_z(yaw(rng))));
    const PointCloud cc = cast_scan(world.geometry, cand_pose, cfg.scan_range, cfg.scan_points, cfg.lidar_beams);
    const PointCloud qc = cast_scan(world.geometry, query_pose, cfg.scan_range, cfg.scan_points, cfg.lidar_beams);
    const std::uint64_t base = hash_combine(seed, 0x5ee9ULL);
    const Description cd = provider.describe(cc, cand_pose, base);
    const Description qd = provider.describe(qc, query_pose, base + 1);
    return RegistrationPair{match_features(qd.keypoints, cd.keypoints), compose(inverse(cand_pose), query_pose)};
  };
}

double SweepPoint::spectral_rate() const {
  return trials == 0 ? 0.0 : static_cast<double>(spectral_successes) / static_cast<double>(trials);
}
double SweepPoint::ransac_rate() const {
  return trials == 0 ? 0.0 : static_cast<double>(ransac_successes) / static_cast<double>(trials);
}

std::vector<SweepPoint> sweep_success_vs_offset(const PairGenerator& gen, std::span<const double> offsets,
                                                std::size_t trials, const MethodConfig& cfg,
                                                std::uint64_t seed) {
  if (trials < 30) fail(ErrorCode::InvalidArgument, "sweep needs at least 30 trials per offset");
  std::vector<SweepPoint> curve(offsets.size());
  for (std::size_t o = 0; o < offsets.size(); ++o) {
    std::vector<char> spec(trials, 0);
    std::vector<char> ran(trials, 0);
    parallel_for(trials, [&](std::size_t t) {
      const RegistrationPair p = gen(offsets[o], hash_combine(hash_combine(seed, o), t));
      const RegistrationOutcome a = run_method(Method::Spectral, p.correspondences, cfg);
      const RegistrationOutcome b = run_method(Method::Ransac, p.correspondences, cfg);
      spec[t] = a.ok && is_success(a.transform, p.gt);
      ran[t] = b.ok && is_success(b.transform, p.gt);
    });
    SweepPoint& pt = curve[o];
    pt.offset = offsets[o];
    pt.trials = trials;
    pt.spectral_successes = static_cast<std::size_t>(std::count(spec.begin(), spec.end(), 1));
    pt.ransac_successes = static_cast<std::size_t>(std::count(ran.begin(), ran.end(), 1));
  }
  return curve;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> curve) {
  os << "offset_m,trials,spectral_success_rate,ransac_success_rate\n";
  char buf[160];
  for (const SweepPoint& p : curve) {
    std::snprintf(buf, sizeof(buf), "%.17g,%zu,%.17g,%.17g\n", p.offset, p.trials, p.spectral_rate(),
                  p.ransac_rate());
    os << buf;
  }
}

double BenchmarkReport::speedup() const {
  return spectral.mean_ms > 0.0 ? ransac.mean_ms / spectral.mean_ms : 0.0;
}

BenchmarkReport benchmark_registration(std::size_t n_corr, double inlier_ratio, std::size_t trials,
                                       std::uint64_t seed, std::size_t ransac_iterations,
                                       const RegistrationConfig& spectral) {
  if (trials < 50) fail(ErrorCode::InvalidArgument, "benchmark needs at least 50 trials");
  BenchmarkReport rep;
  rep.n_corr = n_corr;
  rep.inlier_ratio = inlier_ratio;
  rep.trials = trials;
  rep.ransac_iterations = ransac_iterations;
  MethodConfig cfg;
  cfg.spectral = spectral;
  cfg.ransac.iterations = ransac_iterations;
  std::vector<double> ts;
  std::vector<double> tr;
  // Timed serially so the two methods see the same machine load.
  for (std::size_t t = 0; t < trials; ++t) {
    SyntheticCorrespondenceConfig sc;
    sc.n = n_corr;
    sc.inlier_ratio = inlier_ratio;
    sc.seed = hash_combine(seed, t);
    const SyntheticProblem p = make_correspondence_problem(sc);
    cfg.ransac.seed = sc.seed;
    const RegistrationOutcome a = run_method(Method::Spectral, p.correspondences, cfg);
    const RegistrationOutcome b = run_method(Method::Ransac, p.correspondences, cfg);
    ts.push_back(a.seconds);
    tr.push_back(b.seconds);
    rep.spectral_successes += a.ok && is_success(a.transform, p.gt);
    rep.ransac_successes += b.ok && is_success(b.transform, p.gt);
  }
  rep.spectral = timing_stats(std::move(ts));
  rep.ransac = timing_stats(std::move(tr));
  return rep;
}

std::string benchmark_json(const BenchmarkReport& r) {
  ordered_json j;
  j["n_corr"] = r.n_corr;
  j["inlier_ratio"] = r.inlier_ratio;
  j["trials"] = r.trials;
  j["ransac_iterations"] = r.ransac_iterations;
  j["spectral"] = timing_object(r.spectral);
  j["ransac"] = timing_object(r.ransac);
  j["speedup"] = r.speedup();
  j["spectral_successes"] = r.spectral_successes;
  j["ransac_successes"] = r.ransac_successes;
  return j.dump(2) + "\n";
}

TimingStats timing_stats(std::vector<double> seconds) {
  TimingStats t;
  t.count = seconds.size();
  if (seconds.empty()) return t;
  double sum = 0.0;
  for (double s : seconds) sum += s;
  std::sort(seconds.begin(), seconds.end());
  const std::size_t n = seconds.size();
  const double median = n % 2 == 1 ? seconds[n / 2] : 0.5 * (seconds[n / 2 - 1] + seconds[n / 2]);
  t.mean_ms = 1e3 * sum / static_cast<double>(n);
  t.median_ms = 1e3 * median;
  t.max_ms = 1e3 * seconds.back();
  return t;
}

}  // namespace lvr
