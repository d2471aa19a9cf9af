#pragma once

#include "lvr/features.hpp"
#include "lvr/geometry.hpp"

#include <cstdint>
#include <set>
#include <span>
#include <vector>

namespace lvr {

struct IndexEntry {
  std::uint64_t id = 0;
  GlobalDescriptor descriptor;
  Vec3 world_position = Vec3::Zero();
};

/// Exhaustive-search database of global descriptors. Immutable once queried;
/// concurrent queries are fine, concurrent insert-and-query is not.
class DescriptorIndex {
 public:
  DescriptorIndex() = default;
  explicit DescriptorIndex(std::vector<IndexEntry> entries);

  /// Throws InvalidArgument on a duplicate id.
  void add(IndexEntry entry);
  const std::vector<IndexEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<IndexEntry> entries_;
  std::set<std::uint64_t> ids_;
};

struct RetrievalHit {
  std::uint64_t id = 0;
  double distance = 0.0;

  friend bool operator==(const RetrievalHit&, const RetrievalHit&) = default;
};

/// Top-k by ascending Euclidean distance, ties by ascending id.
std::vector<RetrievalHit> query_topk(const DescriptorIndex& index, const GlobalDescriptor& q,
                                     std::size_t k);

/// query_topk for many queries (parallel over queries).
std::vector<std::vector<RetrievalHit>> query_topk_batch(const DescriptorIndex& index,
                                                        std::span<const GlobalDescriptor> queries,
                                                        std::size_t k);

/// Fraction of queries whose first n hits contain a positive. Queries with an
/// empty positive set are left out of the denominator; returns 0 when none remain.
double recall_at_n(std::span<const std::vector<RetrievalHit>> results,
                   std::span<const std::set<std::uint64_t>> positives, std::size_t n);

/// Ids within `radius` (inclusive) of `query_pos`, measured in the x-y plane.
std::set<std::uint64_t> positives_by_radius(const Vec3& query_pos, const DescriptorIndex& index,
                                            double radius);

double planar_distance(const Vec3& a, const Vec3& b);

}  // namespace lvr
