#include "lvr/retrieval.hpp"

#include "lvr/errors.hpp"
#include "lvr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace lvr {

DescriptorIndex::DescriptorIndex(std::vector<IndexEntry> entries) {
  for (auto& e : entries) add(std::move(e));
}

void DescriptorIndex::add(IndexEntry entry) {
  if (!ids_.insert(entry.id).second) {
    fail(ErrorCode::InvalidArgument, "duplicate index id " + std::to_string(entry.id));
  }
  entries_.push_back(std::move(entry));
}

std::vector<RetrievalHit> query_topk(const DescriptorIndex& index, const GlobalDescriptor& q,
                                     std::size_t k) {
  if (index.empty()) fail(ErrorCode::EmptyIndex, "query_topk: empty index");
  if (k < 1) fail(ErrorCode::InvalidArgument, "query_topk: k must be >= 1");
  std::vector<RetrievalHit> hits;
  hits.reserve(index.size());
  for (const auto& e : index.entries()) hits.push_back({e.id, e.descriptor.distance(q)});
  const auto less = [](const RetrievalHit& a, const RetrievalHit& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  };
  const std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), less);
  hits.resize(keep);
  return hits;
}

std::vector<std::vector<RetrievalHit>> query_topk_batch(const DescriptorIndex& index,
                                                        std::span<const GlobalDescriptor> queries,
                                                        std::size_t k) {
  if (index.empty()) fail(ErrorCode::EmptyIndex, "query_topk: empty index");
  std::vector<std::vector<RetrievalHit>> out(queries.size());
  parallel_for(queries.size(), [&](std::size_t i) { out[i] = query_topk(index, queries[i], k); });
  return out;
}

double recall_at_n(std::span<const std::vector<RetrievalHit>> results,
                   std::span<const std::set<std::uint64_t>> positives, std::size_t n) {
  if (results.size() != positives.size()) {
    fail(ErrorCode::DimensionMismatch, "recall_at_n: one positive set per query");
  }
  std::size_t counted = 0;
  std::size_t hit = 0;
  for (std::size_t q = 0; q < results.size(); ++q) {
    if (positives[q].empty()) continue;
    ++counted;
    const std::size_t upto = std::min(n, results[q].size());
    for (std::size_t r = 0; r < upto; ++r) {
      if (positives[q].count(results[q][r].id)) {
        ++hit;
        break;
      }
    }
  }
  return counted == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(counted);
}

double planar_distance(const Vec3& a, const Vec3& b) { return (a - b).head<2>().norm(); }

std::set<std::uint64_t> positives_by_radius(const Vec3& query_pos, const DescriptorIndex& index,
                                            double radius) {
  if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "positives_by_radius: radius must be > 0");
  std::set<std::uint64_t> out;
  for (const auto& e : index.entries()) {
    if (planar_distance(query_pos, e.world_position) <= radius) out.insert(e.id);
  }
  return out;
}

}  // namespace lvr
