#include "commands.hpp"

#include "lvr/config.hpp"
#include "lvr/correspond.hpp"
#include "lvr/errors.hpp"
#include "lvr/evaluation.hpp"
#include "lvr/formats.hpp"
#include "lvr/losses.hpp"
#include "lvr/parallel.hpp"
#include "lvr/registration.hpp"
#include "lvr/retrieval.hpp"
#include "lvr/world.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

namespace lvr::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Options {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
  int jobs = 0;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, Options& o, bool need_out) {
  o.seed_opt = cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--config", o.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  auto* out = cmd->add_option("--out", o.out, "Output directory");
  if (need_out) out->required();
}

bool seed_given(const Options& o) { return o.seed_opt != nullptr && o.seed_opt->count() > 0; }

PipelineConfig pipeline(const Options& o) { return o.config.empty() ? PipelineConfig{} : load_config(o.config); }

fs::path out_dir(const Options& o) {
  const fs::path p(o.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + p.string() + ": " + ec.message());
  return p;
}

fs::path sub_dir(const fs::path& base, const char* name) {
  const fs::path p = base / name;
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + p.string() + ": " + ec.message());
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot open for writing: " + p.string());
  os << text;
  if (!os) fail(ErrorCode::Io, "write failed: " + p.string());
}

std::string read_text(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot open for reading: " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string id_name(std::uint64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06llu", static_cast<unsigned long long>(id));
  return buf;
}

void apply_jobs(const Options& o) {
  if (o.jobs < 0) fail(ErrorCode::InvalidArgument, "--jobs must be positive");
  if (o.jobs > 0) set_thread_count(o.jobs);
}

// A collection directory holds `<id><ext>` payloads, each with a `<id>.tum`
// pose sidecar.
struct Member {
  std::uint64_t id = 0;
  fs::path path;
  StampedPose pose;
};

std::vector<Member> list_collection(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) fail(ErrorCode::Io, "not a directory: " + dir.string());
  std::vector<Member> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ext) continue;
    const std::string stem = e.path().stem().string();
    std::uint64_t id = 0;
    const auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), id);
    if (ec != std::errc{} || ptr != stem.data() + stem.size()) continue;
    fs::path pose = e.path();
    pose.replace_extension(".tum");
    out.push_back({id, e.path(), formats::load_pose(pose)});
  }
  std::sort(out.begin(), out.end(), [](const Member& a, const Member& b) { return a.id < b.id; });
  if (out.empty()) fail(ErrorCode::EmptyInput, "no " + ext + " files in " + dir.string());
  return out;
}

void write_member(const fs::path& dir, std::uint64_t id, double timestamp, const RigidTransform& pose) {
  formats::save_pose(dir / (id_name(id) + ".tum"), timestamp, pose);
}

void write_positions(const fs::path& dir, const std::vector<formats::PositionRecord>& rows) {
  std::ostringstream ss;
  formats::write_positions_csv(ss, rows);
  write_text(dir / "positions.csv", ss.str());
}

std::vector<DescribedItem> load_described(const fs::path& dir) {
  std::vector<DescribedItem> out;
  for (const Member& m : list_collection(dir, ".feat")) {
    out.push_back({m.id, formats::load_features(m.path), m.pose.pose});
  }
  return out;
}

RigidTransform sidecar_pose_or_identity(const fs::path& payload) {
  fs::path p = payload;
  p.replace_extension(".tum");
  return fs::exists(p) ? formats::load_pose(p).pose : RigidTransform::identity();
}

json intrinsics_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics parse_intrinsics(const std::string& text) {
  try {
    const json j = json::parse(text);
    CameraIntrinsics k;
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.width = j.at("width").get<std::uint32_t>();
    k.height = j.at("height").get<std::uint32_t>();
    k.validate();
    return k;
  } catch (const json::exception& e) {
    fail(ErrorCode::Format, std::string("bad intrinsics: ") + e.what());
  }
}

SyntheticWorldConfig world_config(const Options& o, const PipelineConfig& cfg, const std::string& world_path) {
  SyntheticWorldConfig w = world_path.empty() ? cfg.world : parse_world_config(read_text(world_path));
  if (seed_given(o)) w.seed = o.seed;
  w.validate();
  return w;
}

OracleProvider make_provider(const Options& o, const PipelineConfig& cfg) {
  return OracleProvider(seed_given(o) ? o.seed : cfg.provider_seed, cfg.oracle_noise, cfg.oracle);
}

Method parse_method(const std::string& m) { return m == "ransac" ? Method::Ransac : Method::Spectral; }

// ---- subcommands ------------------------------------------------------------

void gen_world(const Options& o, const std::string& world_path) {
  const PipelineConfig cfg = pipeline(o);
  const SyntheticWorld w = generate_world(world_config(o, cfg, world_path));
  const fs::path out = out_dir(o);
  write_text(out / "world.json", dump_world_config(w.config));
  write_text(out / "intrinsics.json", intrinsics_json(w.intrinsics).dump(2) + "\n");
  formats::save_trajectory(out / "trajectory.tum", w.trajectory);
  const fs::path frames = sub_dir(out, "frames");
  for (std::size_t i = 0; i < w.frames.size(); ++i) {
    formats::save_depth_image(frames / (id_name(i) + ".dpth"), w.frames[i]);
  }
  const fs::path scans = sub_dir(out, "scans");
  std::vector<formats::PositionRecord> rows;
  for (const LidarScan& s : w.scans) {
    formats::save_ply(scans / (id_name(s.id) + ".ply"), s.cloud);
    write_member(scans, s.id, s.timestamp, s.pose);
    rows.push_back({s.id, s.pose.translation});
  }
  write_positions(scans, rows);
  std::printf("world: %zu frames, %zu scans -> %s\n", w.frames.size(), w.scans.size(), o.out.c_str());
}

void build_submaps(const Options& o, const std::string& world_dir) {
  const PipelineConfig cfg = pipeline(o);
  const fs::path wd(world_dir);
  const CameraIntrinsics k = parse_intrinsics(read_text(wd / "intrinsics.json"));
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(wd / "frames")) {
    if (e.path().extension() == ".dpth") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) fail(ErrorCode::EmptyInput, "no depth frames in " + (wd / "frames").string());

  SubmapBuilder builder(k, cfg.submap, cfg.occupancy);
  std::vector<Submap> submaps;
  for (const fs::path& p : paths) {
    for (Submap& s : builder.push(formats::load_depth_image(p))) submaps.push_back(std::move(s));
  }
  for (Submap& s : builder.finish()) submaps.push_back(std::move(s));

  const fs::path out = out_dir(o);
  std::vector<formats::PositionRecord> rows;
  json index = json::array();
  for (const Submap& s : submaps) {
    formats::save_ply(out / (id_name(s.id) + ".ply"), s.cloud);
    write_member(out, s.id, static_cast<double>(s.id), s.reference_pose);
    rows.push_back({s.id, s.reference_pose.translation});
    index.push_back({{"id", s.id}, {"points", s.cloud.size()}, {"frames", s.source_frame_ids}});
  }
  write_positions(out, rows);
  write_text(out / "submaps.json", index.dump(2) + "\n");
  std::printf("submaps: %zu from %zu frames (%zu partials)\n", submaps.size(), paths.size(),
              builder.finalized_partials());
}

void describe(const Options& o, const std::string& input) {
  const PipelineConfig cfg = pipeline(o);
  const OracleProvider provider = make_provider(o, cfg);
  const auto members = list_collection(input, ".ply");
  std::vector<EvalCloud> clouds;
  for (const Member& m : members) clouds.push_back({m.id, formats::load_ply(m.path), m.pose.pose});
  const auto described = describe_all(clouds, provider);
  const fs::path out = out_dir(o);
  std::vector<formats::PositionRecord> rows;
  for (std::size_t i = 0; i < described.size(); ++i) {
    const DescribedItem& d = described[i];
    formats::save_features(out / (id_name(d.id) + ".feat"), d.description);
    write_member(out, d.id, members[i].pose.timestamp, d.pose);
    rows.push_back({d.id, d.pose.translation});
  }
  write_positions(out, rows);
  std::printf("described: %zu clouds\n", described.size());
}

void retrieve(const Options& o, const std::string& queries, const std::string& database, std::size_t k) {
  const auto q = load_described(queries);
  const auto c = load_described(database);
  DescriptorIndex index;
  for (const auto& x : c) index.add({x.id, x.description.global, x.pose.translation});
  std::vector<GlobalDescriptor> qd;
  for (const auto& x : q) qd.push_back(x.description.global);
  const auto hits = query_topk_batch(index, qd, std::min(k, index.size()));
  std::string lines;
  for (std::size_t i = 0; i < q.size(); ++i) {
    json h = json::array();
    for (const RetrievalHit& hit : hits[i]) h.push_back({{"id", hit.id}, {"distance", hit.distance}});
    lines += json{{"query", q[i].id}, {"topk", h}}.dump() + "\n";
  }
  const RecallReport r = evaluate_recall(q, c);
  const fs::path out = out_dir(o);
  write_text(out / "retrieval.jsonl", lines);
  write_text(out / "recall.json",
             json{{"r1_5m", r.r1_5m}, {"r5_5m", r.r5_5m}, {"r1_20m", r.r1_20m}, {"r5_20m", r.r5_20m}}.dump(2) + "\n");
  std::fputs(lines.c_str(), stdout);
}

void register_pair(const Options& o, const std::string& qpath, const std::string& cpath,
                   const std::string& method) {
  const PipelineConfig cfg = pipeline(o);
  const Description q = formats::load_features(qpath);
  const Description c = formats::load_features(cpath);
  const RigidTransform gt = compose(inverse(sidecar_pose_or_identity(cpath)), sidecar_pose_or_identity(qpath));
  MethodConfig mc{cfg.registration, cfg.ransac};
  if (seed_given(o)) mc.ransac.seed = o.seed;
  const CorrespondenceSet matches = match_features(q.keypoints, c.keypoints);
  const RegistrationOutcome out = run_method(parse_method(method), matches, mc);
  if (!out.ok) fail(ErrorCode::InsufficientCorrespondences, "registration failed");
  json doc;
  doc["method"] = method;
  json rot = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rot.push_back(out.transform.rotation(r, c));
  }
  doc["rotation"] = std::move(rot);
  doc["translation"] = {out.transform.translation.x(), out.transform.translation.y(), out.transform.translation.z()};
  doc["correspondences"] = matches.size();
  doc["kept_count"] = out.kept_count;
  doc["rre_deg"] = rre(out.transform, gt);
  doc["rte_m"] = rte(out.transform, gt);
  doc["success"] = is_success(out.transform, gt);
  doc["elapsed_ms"] = 1e3 * out.seconds;
  const std::string text = doc.dump(2) + "\n";
  if (!o.out.empty()) write_text(out_dir(o) / "registration.json", text);
  std::fputs(text.c_str(), stdout);
}

void tuples(const Options& o, const std::string& input, const std::string& database) {
  const PipelineConfig cfg = pipeline(o);
  auto to_entries = [](const std::vector<DescribedItem>& items) {
    std::vector<TupleEntry> e;
    for (const auto& x : items) e.push_back({x.id, x.description.keypoints, x.pose});
    return e;
  };
  const auto anchors = to_entries(load_described(input));
  const auto result = database.empty() ? build_tuples(anchors, cfg.tuples)
                                       : build_tuples(anchors, to_entries(load_described(database)), cfg.tuples);
  std::string lines;
  for (const TrainingTuple& t : result) {
    lines += json{{"anchor", t.anchor},
                  {"positives_pr", t.positives_pr},
                  {"positives_reg", t.positives_reg},
                  {"negatives", t.negatives}}
                 .dump() +
             "\n";
  }
  write_text(out_dir(o) / "tuples.jsonl", lines);
  std::printf("tuples: %zu anchors\n", result.size());
}

struct LossInputs {
  std::string action, anchor, positive, negative, anchor_cloud, positive_cloud;
};

void losses(const Options& o, const LossInputs& in) {
  const PipelineConfig cfg = pipeline(o);
  const Description a = formats::load_features(in.anchor);
  const Description p = formats::load_features(in.positive);

  const RigidTransform gt = compose(inverse(sidecar_pose_or_identity(in.positive)), sidecar_pose_or_identity(in.anchor));

  LossTerms terms;
  if (!in.negative.empty()) {
    const Description n = formats::load_features(in.negative);
    terms.triplet = triplet_loss(a.global, p.global, n.global, cfg.loss.margin).value;
  }

  // Anchor keypoints with a positive keypoint within the inlier distance
  // after alignment form the matched set of the descriptor loss.
  const KeypointSet aligned = a.keypoints.transformed(gt);
  std::vector<Eigen::Index> rows;
  std::vector<std::size_t> nn;
  for (std::size_t i = 0; i < aligned.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < p.keypoints.size(); ++j) {
      const double d = (aligned.coords()[i] - p.keypoints.coords()[j]).norm();
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    if (best <= cfg.tuples.inlier_distance) {
      rows.push_back(static_cast<Eigen::Index>(i));
      nn.push_back(arg);
    }
  }
  if (!rows.empty()) {
    FeatureMatrix matched(static_cast<Eigen::Index>(rows.size()), kLocalDim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      matched.row(static_cast<Eigen::Index>(r)) = a.keypoints.features().row(rows[r]);
    }
    terms.descriptor = descriptor_loss(matched, p.keypoints.features(), nn,
                                       cfg.loss.descriptor_loss_negate_distances);
  }
  if (!aligned.empty() && !p.keypoints.empty()) {
    terms.chamfer = prob_chamfer_loss(aligned.coords(), p.keypoints.coords(), aligned.saliency(),
                                      p.keypoints.saliency());
  }
  if (!in.anchor_cloud.empty() && !in.positive_cloud.empty()) {
    const PointCloud ca = formats::load_ply(in.anchor_cloud);
    const PointCloud cp = formats::load_ply(in.positive_cloud);
    terms.point_to_point = point_to_point_loss(a.keypoints.coords(), ca, p.keypoints.coords(), cp);
  }
  json doc;
  doc["triplet"] = terms.triplet;
  doc["descriptor"] = terms.descriptor;
  doc["descriptor_matches"] = rows.size();
  doc["chamfer"] = terms.chamfer;
  doc["point_to_point"] = terms.point_to_point;
  doc["total"] = total_loss(terms);
  const std::string text = doc.dump(2) + "\n";
  if (!o.out.empty()) write_text(out_dir(o) / "losses.json", text);
  std::fputs(text.c_str(), stdout);
}

struct EvalInputs {
  std::string protocol = "comprehensive";
  std::string world_config;
  std::string queries;
  std::string database;
  std::string method = "spectral";
};

void eval(const Options& o, const EvalInputs& in) {
  apply_jobs(o);
  const PipelineConfig cfg = pipeline(o);
  std::vector<DescribedItem> q;
  std::vector<DescribedItem> c;
  if (!in.queries.empty() || !in.database.empty()) {
    if (in.queries.empty() || in.database.empty()) {
      fail(ErrorCode::InvalidArgument, "--queries and --database go together");
    }
    q = load_described(in.queries);
    c = load_described(in.database);
  } else {
    const SyntheticWorld w = generate_world(world_config(o, cfg, in.world_config));
    const EvalSet set = make_eval_set(w, cfg.submap, cfg.occupancy);
    const OracleProvider provider = make_provider(o, cfg);
    q = describe_all(set.queries, provider);
    c = describe_all(set.candidates, provider);
  }
  MethodConfig mc{cfg.registration, cfg.ransac};
  if (seed_given(o)) mc.ransac.seed = o.seed;
  const Registrar reg = make_registrar(parse_method(in.method), mc);
  const EvaluationReport rep =
      in.protocol == "top1" ? evaluate_top1(q, c, reg) : evaluate_comprehensive(q, c, reg);
  const fs::path out = out_dir(o);
  write_text(out / "report.json", report_json(rep));
  std::ostringstream csv;
  write_pairs_csv(csv, rep);
  write_text(out / "pairs.csv", csv.str());
  write_text(out / "timing.json", timing_json(rep.timing));
  std::printf("%s: %zu queries, %zu registrations, accuracy %.1f%%, RRE %.3f deg, RTE %.3f m\n",
              rep.protocol.c_str(), rep.n_queries, rep.registrations, rep.accuracy_pct, rep.mean_rre_deg,
              rep.mean_rte_m);
}

struct BenchInputs {
  bool sweep = false;
  std::size_t trials = 0;
  std::size_t n_corr = 256;
  double inlier_ratio = 0.3;
  std::size_t ransac_iterations = 10000;
  std::vector<double> offsets{0, 5, 10, 15, 20, 25, 30, 35, 40};
  std::string world_config;
};

void bench(const Options& o, const BenchInputs& in) {
  apply_jobs(o);
  const PipelineConfig cfg = pipeline(o);
  const fs::path out = out_dir(o);
  if (!in.sweep) {
    const BenchmarkReport r = benchmark_registration(in.n_corr, in.inlier_ratio, in.trials ? in.trials : 100,
                                                     o.seed, in.ransac_iterations, cfg.registration);
    write_text(out / "bench.json", benchmark_json(r));
    std::printf("spectral %.3f ms, ransac-%zu %.3f ms, speedup %.1fx\n", r.spectral.mean_ms,
                r.ransac_iterations, r.ransac.mean_ms, r.speedup());
    return;
  }
  const SyntheticWorld w = generate_world(world_config(o, cfg, in.world_config));
  const OracleProvider provider = make_provider(o, cfg);
  MethodConfig mc{cfg.registration, cfg.ransac};
  mc.ransac.seed = o.seed;
  const auto curve = sweep_success_vs_offset(world_pair_generator(w, provider), in.offsets,
                                             in.trials ? in.trials : 30, mc, o.seed);
  std::ostringstream csv;
  write_sweep_csv(csv, curve);
  write_text(out / "sweep.csv", csv.str());
  std::fputs(csv.str().c_str(), stdout);
}

void config_dump(const Options& o) {
  const std::string text = dump_config(pipeline(o));
  if (!o.out.empty()) write_text(out_dir(o) / "config.json", text);
  std::fputs(text.c_str(), stdout);
}

}  // namespace

std::function<void()> register_commands(CLI::App& app) {
  auto action = std::make_shared<std::function<void()>>();
  auto set = [action](std::function<void()> f) { return [action, f] { *action = f; }; };
  const std::vector<std::string> methods{"spectral", "ransac"};

  {
    auto opts = std::make_shared<Options>();
    auto* cmd = app.add_subcommand("gen-world", "Generate a synthetic world (depth frames and LiDAR scans)");
    add_common(cmd, *opts, true);
    auto world = std::make_shared<std::string>();
    cmd->add_option("--world-config", *world, "World config (JSON)")->check(CLI::ExistingFile);
    cmd->callback(set([opts, world] { gen_world(*opts, *world); }));
  }
  {
    auto opts = std::make_shared<Options>();
    auto* cmd = app.add_subcommand("build-submaps", "Fuse depth frames into submaps");
    add_common(cmd, *opts, true);
    auto world = std::make_shared<std::string>();
    cmd->add_option("--world", *world, "Directory written by gen-world")->required()->check(CLI::ExistingDirectory);
    cmd->callback(set([opts, world] { build_submaps(*opts, *world); }));
  }
  {
    auto opts = std::make_shared<Options>();
    auto* cmd = app.add_subcommand("describe", "Compute global descriptors and keypoints for clouds");
    add_common(cmd, *opts, true);
    auto input = std::make_shared<std::string>();
    cmd->add_option("--input", *input, "Directory of <id>.ply clouds with <id>.tum poses")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd->callback(set([opts, input] { describe(*opts, *input); }));
  }
  {
    auto opts = std::make_shared<Options>();
    auto* cmd = app.add_subcommand("retrieve", "Top-k place retrieval");
    add_common(cmd, *opts, true);
    auto q = std::make_shared<std::string>();
    auto db = std::make_shared<std::string>();
    auto k = std::make_shared<std::size_t>(5);
    cmd->add_option("--queries", *q, "Directory of query .feat files")->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--database", *db, "Directory of database .feat files")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--k", *k, "Hits per query")->check(CLI::PositiveNumber);
    cmd->callback(set([opts, q, db, k] { retrieve(*opts, *q, *db, *k); }));
  }
  {
    auto opts = std::make_shared<Options>();
    auto* cmd = app.add_subcommand("register", "Register a query FEAT file against a candidate");
    add_common(cmd, *opts, false);
    auto q = std::make_shared<std::string>();
    auto c = std::make_shared<std::string>();
    auto m = std::make_shared<std::string>("spectral");
    cmd->add_option("--query", *q, "Query .feat")->required()->check(CLI::ExistingFile);
    cmd->add_option("--candidate", *c, "Candidate .feat")->required()->check(CLI::ExistingFile);
    cmd->add_option("--method", *m, "spectral or ransac")->check(CLI::IsMember(methods));
    cmd->callback(set([opts, q, c, m] { register_pair(*opts, *q, *c, *m); }));
  }
  {
    auto opts = std::make_shared<Options>();
    auto* cmd = app.add_subcommand("tuples", "Label training tuples by inlier ratio");
    add_common(cmd, *opts, true);
    auto in = std::make_shared<std::string>();
    auto db = std::make_shared<std::string>();
    cmd->add_option("--input", *in, "Directory of anchor .feat files")->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--database", *db, "Candidate directory (default: the anchors themselves)")
        ->check(CLI::ExistingDirectory);
    cmd->callback(set([opts, in, db] { tuples(*opts, *in, *db); }));
  }
  {
    auto opts = std::make_shared<Options>();
    auto* cmd = app.add_subcommand("losses", "Evaluate the training losses on one tuple");
    add_common(cmd, *opts, false);
    auto in = std::make_shared<LossInputs>();
    cmd->add_option("--anchor", in->anchor, "Anchor .feat")->required()->check(CLI::ExistingFile);
    cmd->add_option("--positive", in->positive, "Positive .feat")->required()->check(CLI::ExistingFile);
    cmd->add_option("action", in->action, "Only 'eval' is supported")->check(CLI::IsMember({"eval"}));
    cmd->add_option("--negative", in->negative, "Negative .feat (enables the triplet term)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--anchor-cloud", in->anchor_cloud, "Anchor dense cloud (.ply)")->check(CLI::ExistingFile);
    cmd->add_option("--positive-cloud", in->positive_cloud, "Positive dense cloud (.ply)")
        ->check(CLI::ExistingFile);
    cmd->callback(set([opts, in] { losses(*opts, *in); }));
  }
  {
    auto opts = std::make_shared<Options>();
    auto* cmd = app.add_subcommand("eval", "Run an evaluation protocol");
    add_common(cmd, *opts, true);
    auto in = std::make_shared<EvalInputs>();
    cmd->add_option("--protocol", in->protocol, "top1 or comprehensive")
        ->check(CLI::IsMember({"top1", "comprehensive"}));
    cmd->add_option("--world-config", in->world_config, "World config (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--queries", in->queries, "Described query directory")->check(CLI::ExistingDirectory);
    cmd->add_option("--database", in->database, "Described database directory")->check(CLI::ExistingDirectory);
    cmd->add_option("--method", in->method, "spectral or ransac")->check(CLI::IsMember(methods));
    cmd->add_option("--jobs", opts->jobs, "Worker threads");
    cmd->callback(set([opts, in] { eval(*opts, *in); }));
  }
  {
    auto opts = std::make_shared<Options>();
    auto* cmd = app.add_subcommand("bench", "Spectral vs RANSAC timing, or the success-vs-offset sweep");
    add_common(cmd, *opts, true);
    auto in = std::make_shared<BenchInputs>();
    cmd->add_flag("--sweep", in->sweep, "Sweep success rate over query-candidate offsets");
    cmd->add_option("--trials", in->trials, "Trials (per offset when sweeping)");
    cmd->add_option("--n-corr", in->n_corr, "Correspondences per problem")->check(CLI::PositiveNumber);
    cmd->add_option("--inlier-ratio", in->inlier_ratio, "Inlier ratio")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--ransac-iterations", in->ransac_iterations, "RANSAC iterations")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--offsets", in->offsets, "Offsets in meters");
    cmd->add_option("--world-config", in->world_config, "World config (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--jobs", opts->jobs, "Worker threads");
    cmd->callback(set([opts, in] { bench(*opts, *in); }));
  }
  {
    auto opts = std::make_shared<Options>();
    auto* cmd = app.add_subcommand("config", "Configuration utilities");
    cmd->require_subcommand(1);
    auto* dump = cmd->add_subcommand("dump", "Print the effective configuration");
    add_common(dump, *opts, false);
    dump->callback(set([opts] { config_dump(*opts); }));
  }
  return [action] {
    if (*action) (*action)();
  };
}

}  // namespace lvr::cli
